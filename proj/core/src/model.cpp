#include "dkt/model.hpp"

#include <cmath>
#include <numbers>

namespace dkt {

double prior_neg_log_density(const FittedModel& model, const ModelConfig& config) {
    const PriorSpec& priors = config.priors;
    double total = 0.0;
    for (const SigmoidParams& t : model.theta) {
        total += priors.theta[0].neg_log_density(t.amplitude);
        total += priors.theta[1].neg_log_density(t.slope);
        total += priors.theta[2].neg_log_density(t.center);
        total += priors.theta[3].neg_log_density(t.offset);
    }
    for (const auto& per_disease : model.lambda) {
        for (const SigmoidParams& l : per_disease) {
            if (!config.fixed_lambda_shape) {
                total += priors.lambda[0].neg_log_density(l.amplitude);
                total += priors.lambda[3].neg_log_density(l.offset);
            }
            total += priors.lambda[1].neg_log_density(l.slope);
            total += priors.lambda[2].neg_log_density(l.center);
        }
    }
    for (double b : model.beta) total += priors.beta.neg_log_density(b);
    return total;
}

double neg_log_posterior(const CohortDataset& data, const FittedModel& model,
                         const ModelConfig& config) {
    config.validate(data.num_biomarkers());
    constexpr double half_log_2pi = 0.91893853320467274178;  // 0.5 * log(2 pi)

    double total = 0.0;
    for (const Measurement& m : data.measurements()) {
        const Subject& subj = data.subject(m.subject);
        const int unit = config.unit_allocation[m.biomarker];
        const double yhat = biomarker_predict(model.beta[m.subject], subj.months[m.visit],
                                              model.lambda[subj.disease][unit],
                                              model.theta[m.biomarker]);
        const double residual = m.value - yhat;
        const double eps = model.epsilon[m.biomarker];
        if (!(eps > 0.0)) {
            if (residual != 0.0)
                throw NumericalError("neg_log_posterior: zero noise variance with nonzero "
                                     "residual for biomarker '" +
                                     data.biomarker_names()[m.biomarker] + "'");
            continue;  // exactly-on-curve measurement under a point-mass noise model
        }
        total += residual * residual / (2.0 * eps) + half_log_2pi + 0.5 * std::log(eps);
    }
    return total + prior_neg_log_density(model, config);
}

}  // namespace dkt
