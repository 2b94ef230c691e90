#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dkt/errors.hpp"
#include "dkt/sigmoid.hpp"

namespace dkt {

// Spearman rank correlation: Pearson correlation of mid-ranks (ties get the
// average rank).  Degenerate (constant) inputs are an error.
double spearman(std::span<const double> x, std::span<const double> y);

struct BootstrapResult {
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> samples;
    int degenerate_skipped = 0;
};

// Rank correlation over index resamples with replacement; degenerate
// resamples are skipped and counted, more than 50% of them is an error.
BootstrapResult bootstrap_corr(std::span<const double> pred, std::span<const double> meas,
                               int resamples, std::uint64_t seed);

// Mean absolute difference of curve values on a grid, averaged over the
// family; value-space comparison sidesteps parameter non-identifiability.
double trajectory_mae(std::span<const SigmoidParams> truth, std::span<const SigmoidParams> estimate,
                      std::span<const double> grid);

std::vector<double> linspace(double lo, double hi, int n);

// R^2 of the least-squares regression of true shifts on estimated shifts; the
// affine indeterminacy of the latent stage axis is absorbed by the regression.
double shift_r2(std::span<const double> true_beta, std::span<const double> estimated_beta);

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    double p_raw = 1.0;
    double p_bonferroni = 1.0;
    bool significant = false;  // at 0.05 after correction
};

// Two-sample two-tailed Welch t-test on bootstrap correlation samples;
// Bonferroni multiplies the p-value by `comparisons`, capped at 1.
WelchResult compare_models(std::span<const double> samples_a, std::span<const double> samples_b,
                           int comparisons, double alpha = 0.05);

struct EvalCell {
    std::string model;
    std::string region;
    double point_corr = 0.0;
    double boot_mean = 0.0;
    double boot_std = 0.0;
    int n = 0;
    int degenerate_skipped = 0;
    bool has_significance = false;
    double p_bonferroni = 1.0;
    bool significant = false;
};

struct RecoveryBlock {
    std::vector<std::pair<std::string, double>> trajectory_mae;  // per biomarker family entry
    std::vector<std::pair<std::string, double>> shift_r2;        // per disease
};

// Per (model, region) rank correlations with bootstrap spread plus the
// recovery block; serializes to CSV and an aligned text table.
struct EvalReport {
    std::vector<EvalCell> cells;
    RecoveryBlock recovery;
    int bootstrap_resamples = 100;
    std::string reference_model;  // significance is vs this model; empty = none

    void write_csv(std::ostream& out) const;
    void write_table(std::ostream& out) const;
};

}  // namespace dkt
