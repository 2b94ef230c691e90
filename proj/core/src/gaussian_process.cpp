#include "dkt/gaussian_process.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "dkt/nelder_mead.hpp"

namespace dkt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxJitter = 1e-4;

double rbf(const std::vector<double>& a, const std::vector<double>& b, double s2,
           std::span<const double> ls) {
    double q = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = (a[i] - b[i]) / ls[i];
        q += d * d;
    }
    return s2 * std::exp(-0.5 * q);
}

Eigen::MatrixXd kernel_matrix(const std::vector<std::vector<double>>& X, double s2,
                              std::span<const double> ls, double noise) {
    const int n = static_cast<int>(X.size());
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double v = rbf(X[i], X[j], s2, ls);
            K(i, j) = v;
            K(j, i) = v;
        }
        K(i, i) += noise;
    }
    return K;
}

// Cholesky with escalating diagonal jitter; returns the jitter used or -1.
double robust_llt(Eigen::MatrixXd K, Eigen::LLT<Eigen::MatrixXd>& llt) {
    double jitter = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::MatrixXd Kj = K;
        if (jitter > 0.0) Kj.diagonal().array() += jitter;
        llt.compute(Kj);
        if (llt.info() == Eigen::Success) return jitter;
        jitter = jitter == 0.0 ? 1e-12 : jitter * 10.0;
        if (jitter > kMaxJitter) break;
    }
    return -1.0;
}

double log_marginal_impl(const std::vector<std::vector<double>>& X, const Eigen::VectorXd& y0,
                         double s2, std::span<const double> ls, double noise) {
    Eigen::LLT<Eigen::MatrixXd> llt;
    if (robust_llt(kernel_matrix(X, s2, ls, noise), llt) < 0.0) return -kInf;
    const Eigen::VectorXd alpha = llt.solve(y0);
    double log_det = 0.0;
    for (int i = 0; i < y0.size(); ++i) log_det += std::log(llt.matrixL()(i, i));
    return -0.5 * y0.dot(alpha) - log_det -
           0.5 * y0.size() * std::log(2.0 * std::numbers::pi);
}

}  // namespace

double gp_log_marginal(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                       double signal_variance, std::span<const double> length_scales,
                       double noise_variance) {
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
    Eigen::VectorXd y0(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) y0[i] = y[i] - mean;
    return log_marginal_impl(X, y0, signal_variance, length_scales, noise_variance);
}

GPRegressor gp_fit(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                   const GPFitOptions& options) {
    const int n = static_cast<int>(X.size());
    if (n < 2 || y.size() != X.size()) throw UsageError("gp_fit: need >= 2 training points");
    const int dim = static_cast<int>(X[0].size());
    if (dim < 1) throw UsageError("gp_fit: empty input vectors");
    for (const auto& row : X) {
        if (static_cast<int>(row.size()) != dim)
            throw UsageError("gp_fit: ragged input matrix");
        for (double v : row)
            if (!std::isfinite(v)) throw NumericalError("gp_fit: non-finite input");
    }
    for (double v : y)
        if (!std::isfinite(v)) throw NumericalError("gp_fit: non-finite target");

    GPRegressor model;
    model.mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
    Eigen::VectorXd y0(n);
    for (int i = 0; i < n; ++i) y0[i] = y[i] - model.mean;
    const double var_y = std::max(y0.squaredNorm() / n, 1e-8);

    // Initial scales: per-dimension data spread, signal at target variance,
    // noise at a tenth of it.
    std::vector<double> ls0(dim);
    for (int a = 0; a < dim; ++a) {
        double lo = kInf, hi = -kInf;
        for (const auto& row : X) {
            lo = std::min(lo, row[a]);
            hi = std::max(hi, row[a]);
        }
        ls0[a] = std::max((hi - lo) * 0.5, 1e-3);
    }

    const int np = dim + 2;  // log s2, log l_1..d, log noise
    std::vector<double> z0(np);
    z0[0] = std::log(var_y);
    for (int a = 0; a < dim; ++a) z0[1 + a] = std::log(ls0[a]);
    z0[np - 1] = std::log(0.1 * var_y);

    const Objective nlml = [&](std::span<const double> z) {
        for (double v : z)
            if (std::fabs(v) > 25.0) return kInf;
        std::vector<double> ls(dim);
        for (int a = 0; a < dim; ++a) ls[a] = std::exp(z[1 + a]);
        return -log_marginal_impl(X, y0, std::exp(z[0]), ls, std::exp(z[np - 1]));
    };

    std::vector<double> zbest = z0;
    if (options.optimize_hyperparameters) {
        SolverOptions solver;
        solver.max_iterations = options.max_iterations;
        std::vector<double> step(np, 0.7);
        std::vector<Prior> priors(np, Prior::flat());
        rng::Stream stream(rng::derive(options.seed, 0x69D0));
        const SolverResult res = minimize_with_restarts(nlml, z0, step, priors,
                                                        std::max(options.restarts, 1), stream,
                                                        solver);
        zbest = res.x;
    }

    model.signal_variance = std::exp(zbest[0]);
    model.length_scales.resize(dim);
    for (int a = 0; a < dim; ++a) model.length_scales[a] = std::exp(zbest[1 + a]);
    model.noise_variance = std::exp(zbest[np - 1]);
    model.inputs = X;

    Eigen::LLT<Eigen::MatrixXd> llt;
    const double jitter = robust_llt(
        kernel_matrix(X, model.signal_variance, model.length_scales, model.noise_variance), llt);
    if (jitter < 0.0)
        throw NumericalError("gp_fit: kernel matrix not positive definite after jitter up to 1e-4");
    model.jitter = jitter;

    const Eigen::VectorXd alpha = llt.solve(y0);
    model.alpha.assign(alpha.data(), alpha.data() + n);
    const Eigen::MatrixXd L = llt.matrixL();
    model.chol.resize(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) model.chol[static_cast<std::size_t>(i) * n + j] = L(i, j);

    double log_det = 0.0;
    for (int i = 0; i < n; ++i) log_det += std::log(L(i, i));
    model.log_marginal =
        -0.5 * y0.dot(alpha) - log_det - 0.5 * n * std::log(2.0 * std::numbers::pi);
    return model;
}

std::pair<double, double> gp_predict(const GPRegressor& model, std::span<const double> x) {
    const int n = static_cast<int>(model.inputs.size());
    const int dim = static_cast<int>(model.length_scales.size());
    if (static_cast<int>(x.size()) != dim)
        throw UsageError("gp_predict: input dimension mismatch");
    std::vector<double> probe(x.begin(), x.end());

    Eigen::VectorXd k_star(n);
    for (int i = 0; i < n; ++i)
        k_star[i] = rbf(model.inputs[i], probe, model.signal_variance, model.length_scales);

    double mean = model.mean;
    for (int i = 0; i < n; ++i) mean += k_star[i] * model.alpha[i];

    // var = k(x,x) - ||L^-1 k*||^2
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> L(
        model.chol.data(), n, n);
    const Eigen::VectorXd v =
        L.triangularView<Eigen::Lower>().solve(k_star);
    const double variance = std::max(model.signal_variance - v.squaredNorm(), 0.0);
    return {mean, variance};
}

}  // namespace dkt
