#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dkt/errors.hpp"

namespace dkt {

// Exact GP regression with an anisotropic RBF kernel
//   k(x, x') = s2 * exp(-1/2 sum_a (x_a - x'_a)^2 / l_a^2)
// predicting one target from a vector of inputs.  Mean function: the training
// target mean.
struct GPRegressor {
    double signal_variance = 1.0;
    std::vector<double> length_scales;
    double noise_variance = 1e-2;
    double mean = 0.0;
    double jitter = 0.0;          // diagonal jitter needed for the final factorization
    double log_marginal = 0.0;    // log marginal likelihood at the fitted hyperparameters
    std::vector<std::vector<double>> inputs;
    std::vector<double> alpha;    // (K + noise I)^-1 (y - mean)
    std::vector<double> chol;     // lower Cholesky factor, row-major n x n
};

struct GPFitOptions {
    int restarts = 3;
    int max_iterations = 200;
    std::uint64_t seed = 0;
    bool optimize_hyperparameters = true;
};

// Hyperparameters by marginal-likelihood maximization (shared simplex solver,
// log-space), then the standard closed-form posterior.  Escalates diagonal
// jitter up to 1e-4 before reporting a singular kernel.
GPRegressor gp_fit(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                   const GPFitOptions& options = {});

// Predictive mean and latent-function variance at one input.
std::pair<double, double> gp_predict(const GPRegressor& model, std::span<const double> x);

// Log marginal likelihood of the data under the given hyperparameters; the
// ascent property of gp_fit is asserted against this.
double gp_log_marginal(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                       double signal_variance, std::span<const double> length_scales,
                       double noise_variance);

}  // namespace dkt
