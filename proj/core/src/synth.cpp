#include "dkt/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dkt/model.hpp"

namespace dkt {

void SynthSpec::validate() const {
    if (diseases.empty() || diseases.size() != subject_counts.size())
        throw UsageError("SynthSpec: diseases and subject_counts must align");
    for (int n : subject_counts)
        if (n <= 0) throw UsageError("SynthSpec: subject counts must be positive");
    if (!(beta_high > beta_low)) throw UsageError("SynthSpec: empty beta range");
    if (visits_per_subject < 1) throw UsageError("SynthSpec: need at least one visit");
    if (!(visit_spacing_months > 0.0)) throw UsageError("SynthSpec: visit spacing must be > 0");
    const std::size_t k = theta.size();
    if (k == 0 || biomarker_names.size() != k || noise_std.size() != k ||
        unit_allocation.size() != k)
        throw UsageError("SynthSpec: per-biomarker fields must align with theta");
    for (double s : noise_std)
        if (s < 0.0) throw UsageError("SynthSpec: noise std must be >= 0");
    int units = 0;
    for (int u : unit_allocation) units = std::max(units, u + 1);
    if (lambda.size() != diseases.size())
        throw UsageError("SynthSpec: lambda must have one row per disease");
    for (const auto& row : lambda)
        if (static_cast<int>(row.size()) != units)
            throw UsageError("SynthSpec: lambda rows must cover every unit");
    if (withheld.size() != diseases.size())
        throw UsageError("SynthSpec: withheld must have one entry per disease");
}

SynthSpec default_spec() {
    SynthSpec spec;
    spec.diseases = {"synthetic_AD", "synthetic_PCA"};
    spec.subject_counts = {100, 50};
    spec.beta_low = -13.0;
    spec.beta_high = 10.0;
    spec.visits_per_subject = 4;
    spec.visit_spacing_months = 12.0;
    spec.biomarker_names = {"k0", "k1", "k2", "k3", "k4", "k5"};
    spec.noise_std.assign(6, 0.05);
    spec.unit_allocation = {0, 1, 0, 1, 0, 1};
    spec.theta = {
        SigmoidParams(1.0, 5.0, 0.20, 0.0),  SigmoidParams(1.0, 10.0, 0.20, 0.0),
        SigmoidParams(1.0, 5.0, 0.55, 0.0),  SigmoidParams(1.0, 10.0, 0.55, 0.0),
        SigmoidParams(1.0, 5.0, 0.90, 0.0),  SigmoidParams(1.0, 10.0, 0.90, 0.0),
    };
    spec.lambda = {
        {SigmoidParams(1.0, 0.3, -4.0, 0.0), SigmoidParams(1.0, 0.2, 6.0, 0.0)},
        {SigmoidParams(1.0, 0.3, 6.0, 0.0), SigmoidParams(1.0, 0.2, -4.0, 0.0)},
    };
    spec.withheld = {{}, {0, 1, 4, 5}};
    return spec;
}

ModelConfig config_for_spec(const SynthSpec& spec) {
    ModelConfig config;
    config.unit_allocation = spec.unit_allocation;
    config.diseases = spec.diseases;
    config.fixed_lambda_shape = true;
    return config;
}

double control_probability(double beta_years, const SynthSpec& spec) {
    const double mid = 0.5 * (spec.beta_low + spec.beta_high);
    const double half = 0.5 * (spec.beta_high - spec.beta_low);
    const double z = std::clamp((beta_years - mid) / half, -1.0, 1.0);
    const double s = spec.diagnosis_sharpness;
    const double e_control = std::exp(-s * z);
    const double e_patient = std::exp(s * z);
    return e_control / (e_control + e_patient);
}

std::string assign_diagnosis(double beta_years, const SynthSpec& spec, rng::Stream& stream) {
    return stream.uniform() < control_probability(beta_years, spec) ? "control" : "patient";
}

std::pair<CohortDataset, GroundTruth> generate(const SynthSpec& spec) {
    spec.validate();
    const int num_biomarkers = static_cast<int>(spec.theta.size());
    CohortDataset data(spec.biomarker_names, spec.diseases);
    GroundTruth truth;

    int global_index = 0;
    for (std::size_t d = 0; d < spec.diseases.size(); ++d) {
        std::vector<bool> dropped(num_biomarkers, false);
        for (int k : spec.withheld[d]) {
            if (k < 0 || k >= num_biomarkers)
                throw UsageError("SynthSpec: withheld biomarker index out of range");
            dropped[k] = true;
        }
        for (int s = 0; s < spec.subject_counts[d]; ++s, ++global_index) {
            // One derived stream per subject: generation is reproducible under
            // any parallel schedule.
            rng::Stream stream(rng::derive(spec.seed, 0x5EED, global_index));
            const double beta = stream.uniform(spec.beta_low, spec.beta_high);
            const std::string diagnosis = assign_diagnosis(beta, spec, stream);

            char suffix[16];
            std::snprintf(suffix, sizeof suffix, "_%03d", s);
            const int i =
                data.add_subject(spec.diseases[d] + suffix, static_cast<int>(d), diagnosis);
            truth.beta.push_back(beta);
            truth.values.emplace_back();

            for (int j = 0; j < spec.visits_per_subject; ++j) {
                const double months = j * spec.visit_spacing_months;
                const int visit = data.add_visit(i, months);
                truth.values.back().emplace_back(num_biomarkers, 0.0);
                for (int k = 0; k < num_biomarkers; ++k) {
                    const double clean = biomarker_predict(
                        beta, months, spec.lambda[d][spec.unit_allocation[k]], spec.theta[k]);
                    truth.values.back().back()[k] = clean;
                    // Noise is drawn for every cell, withheld or not, so the
                    // visible cells are identical with and without withholding.
                    const double noisy = clean + spec.noise_std[k] * stream.normal();
                    if (!dropped[k]) data.add_measurement(i, visit, k, noisy);
                }
            }
        }
    }
    return {std::move(data), std::move(truth)};
}

}  // namespace dkt
