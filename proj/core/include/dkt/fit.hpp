#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dkt/model.hpp"

namespace dkt {

// One cell of a subject's data subset, used for out-of-sample staging.
struct Observation {
    double months = 0.0;
    int biomarker = 0;
    double value = 0.0;
};

struct FitDiagnostics {
    int sweeps = 0;
    bool converged = false;
    std::vector<double> objective_trace;  // length sweeps + 1
    // (disease, unit) blocks with no measurements; their lambda stays at the
    // prior mean.  Expected for withheld modalities only when a whole unit is
    // unobserved for that disease.
    std::vector<std::pair<int, int>> empty_units;
    // Objective after every block update; filled only when
    // optimizer.track_blocks is set (forces sequential sweeps).
    std::vector<double> block_trace;
};

struct FitResult {
    FittedModel model;
    FitDiagnostics diagnostics;
};

// Variance floor applied when the objective is evaluated, so noise-free
// cohorts (exact-zero mean squared residual) keep a finite trace.  Stored
// epsilon values are the exact mean squared residuals.
inline constexpr double kNoiseFloor = 1e-12;

// Objective used for the trace and convergence: neg_log_posterior with
// epsilon floored at kNoiseFloor, accumulated in canonical measurement order.
double fit_objective(const CohortDataset& data, const FittedModel& model,
                     const ModelConfig& config);

// Stage-1 estimate: rank-heuristic time shifts, identity-like dysfunction
// curves, per-biomarker trajectory fits, residual noise.
FittedModel initialize(const CohortDataset& data, const ModelConfig& config);

// Single-block coordinate updates (the fit sweeps cycle through these).
// Each minimizes the unweighted penalized squared-residual objective of its
// block, holding everything else fixed; the returned block never scores worse
// than the incoming one.
SigmoidParams fit_trajectory(int k, const FittedModel& state, const CohortDataset& data,
                             const ModelConfig& config);
double update_noise(int k, const FittedModel& state, const CohortDataset& data,
                    const ModelConfig& config);
SigmoidParams fit_dysfunction(int disease, int unit, const FittedModel& state,
                              const CohortDataset& data, const ModelConfig& config);
double fit_subject_shift(int i, const FittedModel& state, const CohortDataset& data,
                         const ModelConfig& config);

// Full alternating-minimization fit: initialize, then sweeps of trajectory,
// noise, dysfunction and time-shift updates until the objective decrease per
// sweep drops below optimizer.sweep_tol (or max_sweeps).  Non-convergence is
// reported in diagnostics, not an error.
FitResult fit(const CohortDataset& data, const ModelConfig& config);

// Time shift of a new subject from any subset of its data, all model
// parameters frozen.
double stage_subject(const FittedModel& model, const ModelConfig& config, int disease,
                     std::span<const Observation> subset);

// Trajectory value of biomarker k for a subject of the given disease at the
// given shift/visit; used to infer modalities never observed for the disease.
double predict_missing(const FittedModel& model, const ModelConfig& config, int disease,
                       double beta_years, double months, int k);

}  // namespace dkt
