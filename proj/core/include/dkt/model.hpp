#pragma once

#include <vector>

#include "dkt/config.hpp"
#include "dkt/dataset.hpp"
#include "dkt/sigmoid.hpp"

namespace dkt {

// All estimated parameters of the two-level model.
struct FittedModel {
    std::vector<SigmoidParams> theta;                // per biomarker
    std::vector<std::vector<SigmoidParams>> lambda;  // [disease][unit]
    std::vector<double> beta;                        // per subject, years
    std::vector<double> epsilon;                     // per biomarker, noise variance
    std::vector<double> trace;                       // objective per sweep (first entry: after init)
};

inline double months_to_years(double months) { return months / 12.0; }

// Stage of one subject-visit: time shift plus months since baseline (years).
inline double disease_stage(double beta_years, double months) {
    return beta_years + months_to_years(months);
}

// Dysfunction score of one agnostic unit at one subject-visit.
inline double dysfunction_score(double beta_years, double months, const SigmoidParams& lambda) {
    return sigmoid_eval(disease_stage(beta_years, months), lambda);
}

// Two-level composition: unit trajectory evaluated at the dysfunction score.
inline double biomarker_predict(double beta_years, double months, const SigmoidParams& lambda,
                                const SigmoidParams& theta) {
    return sigmoid_eval(dysfunction_score(beta_years, months, lambda), theta);
}

// Gaussian measurement likelihood summed over all observations plus prior
// terms: sum [(y - yhat)^2 / (2 eps_k) + 0.5 log(2 pi eps_k)] - sum log-priors.
double neg_log_posterior(const CohortDataset& data, const FittedModel& model,
                         const ModelConfig& config);

// Prior terms alone (negated log-densities over free parameters).
double prior_neg_log_density(const FittedModel& model, const ModelConfig& config);

}  // namespace dkt
