#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dkt/config.hpp"
#include "dkt/dataset.hpp"
#include "dkt/sigmoid.hpp"

namespace dkt {

// Recipe for a ground-truth cohort: two-level sigmoid model sampled with
// Gaussian measurement noise, with whole modalities withheld per disease.
struct SynthSpec {
    std::vector<std::string> diseases;
    std::vector<int> subject_counts;                 // per disease
    double beta_low = -13.0;                         // years
    double beta_high = 10.0;                         // years
    int visits_per_subject = 4;
    double visit_spacing_months = 12.0;
    std::vector<double> noise_std;                   // per biomarker
    std::vector<SigmoidParams> theta;                // true biomarker trajectories
    std::vector<std::vector<SigmoidParams>> lambda;  // [disease][unit]
    std::vector<int> unit_allocation;
    std::vector<std::vector<int>> withheld;          // per disease: biomarker indices dropped
    std::vector<std::string> biomarker_names;
    double diagnosis_sharpness = 4.5;
    std::uint64_t seed = 0;

    void validate() const;
};

// True per-subject shifts and the complete noise-free measurement grid,
// including entries withheld from the dataset.
struct GroundTruth {
    std::vector<double> beta;                             // per subject
    std::vector<std::vector<std::vector<double>>> values; // [subject][visit][biomarker]
};

// The reference two-disease recipe: 100 + 50 subjects, six biomarkers in two
// units, beta ~ U(-13, 10) yr, 4 annual visits, noise std 0.05.
SynthSpec default_spec();

// Fit configuration matching a synthetic spec (allocation, disease labels,
// default priors/optimizer).
ModelConfig config_for_spec(const SynthSpec& spec);

// P(diagnosis = control) as a function of the subject's stage, logistic in
// the stage normalized to [-1, 1] over the beta range: early-stage subjects
// are controls, late-stage subjects patients.
double control_probability(double beta_years, const SynthSpec& spec);

std::string assign_diagnosis(double beta_years, const SynthSpec& spec, rng::Stream& stream);

std::pair<CohortDataset, GroundTruth> generate(const SynthSpec& spec);

}  // namespace dkt
