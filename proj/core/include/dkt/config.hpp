#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dkt/errors.hpp"
#include "dkt/rng.hpp"

namespace dkt {

enum class PriorKind { Flat, Gaussian };

// Prior on one scalar parameter.  Gaussian priors may be truncated to the
// positive half line (the truncation renormalization constant is dropped; it
// does not depend on the parameter).
struct Prior {
    PriorKind kind = PriorKind::Flat;
    double mean = 0.0;
    double stddev = 1.0;
    bool positive = false;

    static Prior flat(bool positive = false) {
        Prior p;
        p.positive = positive;
        return p;
    }

    static Prior gaussian(double mean, double stddev, bool positive = false);

    double neg_log_density(double x) const;

    // Tie-break target and restart anchor; 0 for flat priors.
    double reference() const { return kind == PriorKind::Gaussian ? mean : 0.0; }

    // Restart seed: from the prior when informative, jitter around the
    // incumbent otherwise.
    double sample(rng::Stream& stream, double incumbent, double scale) const;
};

struct PriorSpec {
    std::array<Prior, 4> theta;   // amplitude, slope, center, offset
    std::array<Prior, 4> lambda;  // amplitude, slope, center, offset
    Prior beta;

    // Weak identifiability anchors: beta ~ N(0, 10 yr); lambda slope
    // ~ N(0.25, 0.5) truncated positive, center ~ N(0, 10); theta flat with
    // slope restricted positive.
    static PriorSpec defaults();
    static PriorSpec all_flat();
};

struct OptimizerSpec {
    double sweep_tol = 1e-6;  // convergence: absolute objective decrease per sweep
    int max_sweeps = 100;
    int restarts = 5;          // simplex restarts per block update (incumbent included)
    int max_iterations = 600;  // simplex iteration cap per restart
    int stage_seeds = 64;      // grid seeds for the 1-D time-shift search
    int threads = 1;
    std::uint64_t seed = 0;
    bool track_blocks = false;  // sequential sweeps + per-block objective trace

    void validate() const {
        if (!(sweep_tol > 0.0)) throw UsageError("OptimizerSpec: sweep_tol must be > 0");
        if (max_sweeps < 1) throw UsageError("OptimizerSpec: max_sweeps must be >= 1");
        if (restarts < 1) throw UsageError("OptimizerSpec: restarts must be >= 1");
        if (stage_seeds < 2) throw UsageError("OptimizerSpec: stage_seeds must be >= 2");
        if (threads < 1) throw UsageError("OptimizerSpec: threads must be >= 1");
    }
};

// Everything the fit needs besides the data: the biomarker-to-unit map psi,
// disease labels, lambda shape constraint, priors and optimizer settings.
struct ModelConfig {
    std::vector<int> unit_allocation;    // psi: biomarker index -> unit index
    std::vector<std::string> diseases;   // disease labels, index order
    bool fixed_lambda_shape = true;      // force lambda (a, d) = (1, 0)
    PriorSpec priors = PriorSpec::defaults();
    OptimizerSpec optimizer;

    int num_units() const;
    void validate(int num_biomarkers) const;
};

}  // namespace dkt
