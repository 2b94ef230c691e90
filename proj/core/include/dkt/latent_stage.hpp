#pragma once

#include <span>
#include <vector>

#include "dkt/fit.hpp"

namespace dkt {

// Single-level baseline: each biomarker trajectory is a sigmoid directly in
// disease stage, one shared stage axis, no disease-specific layer.
struct LatentStageModel {
    std::vector<SigmoidParams> theta;  // per biomarker, input axis: stage (years)
    std::vector<double> beta;          // per subject, years
    std::vector<double> epsilon;       // per biomarker, noise variance
    std::vector<double> trace;
};

struct LatentFitResult {
    LatentStageModel model;
    FitDiagnostics diagnostics;
};

// Alternates per-biomarker sigmoid fits and per-subject shifts with the same
// solver, priors (theta/beta families) and convergence contracts as the
// two-level fit.  unit_allocation and lambda priors in the config are unused.
LatentFitResult latent_stage_fit(const CohortDataset& data, const ModelConfig& config);

double latent_stage_subject(const LatentStageModel& model, const ModelConfig& config,
                            std::span<const Observation> subset);

inline double latent_predict(const LatentStageModel& model, double beta_years, double months,
                             int k) {
    return sigmoid_eval(disease_stage(beta_years, months), model.theta.at(k));
}

}  // namespace dkt
