#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dkt/config.hpp"
#include "dkt/dataset.hpp"
#include "dkt/fit.hpp"
#include "dkt/synth.hpp"

namespace dkt {

// One row of an ingested longitudinal table: identifiers, covariates and the
// biomarker cells (empty cell = missing measurement).
struct RawRow {
    std::string subject_id;
    std::string disease;
    std::string diagnosis;
    double months = 0.0;
    std::optional<double> age;
    std::optional<double> gender;
    std::optional<double> tiv;
    std::optional<double> source;
    std::optional<double> true_beta;  // ground-truth files only
    std::vector<std::optional<double>> values;
};

struct RawTable {
    std::vector<std::string> biomarker_names;
    std::vector<RawRow> rows;
    bool has_true_beta = false;
};

// Dataset CSV schema (exact header, comma separated, UTF-8, '.' decimal):
//   subject_id,disease,diagnosis,months_since_baseline,age,gender,tiv,source,<biomarkers...>
// Ground-truth files carry an extra true_beta column between source and the
// biomarkers.  Empty cells are missing; non-finite numerics are row errors.
RawTable load_raw_csv(const std::string& path);

void save_dataset_csv(const std::string& path, const CohortDataset& data);
void save_ground_truth_csv(const std::string& path, const CohortDataset& data,
                           const GroundTruth& truth);

// Direct conversion, no preprocessing: every present cell becomes a
// measurement; diseases and subjects indexed in order of first appearance.
CohortDataset dataset_from_raw(const RawTable& table);
CohortDataset dataset_from_raw(const RawTable& table, const std::vector<std::string>& diseases);

struct BiomarkerNormalization {
    double min = 0.0;
    double max = 1.0;
    int direction = 1;  // +1 larger-is-abnormal, -1 flipped (volume-like)
    double control_mean = 0.0;
    std::vector<double> residual_coeffs;  // intercept then one per covariate; empty = none
};

struct NormalizationParams {
    std::vector<std::string> covariates;
    std::vector<BiomarkerNormalization> per_biomarker;  // empty = identity

    bool identity() const { return per_biomarker.empty(); }
};

// Per biomarker: ordinary least squares of value on the covariates, fitted on
// control rows only, applied to all rows (residual + control mean).
std::pair<RawTable, NormalizationParams> residualize(const RawTable& table,
                                                     const std::vector<std::string>& covariates);

// Min-max to [0,1] per biomarker with direction flips so larger = more
// abnormal.  `directions` is per biomarker (+1/-1), empty = all +1.  Pass the
// params returned by residualize to keep the coefficients together.
std::pair<CohortDataset, NormalizationParams> normalize(const RawTable& table,
                                                        const std::vector<int>& directions = {},
                                                        NormalizationParams params = {});

// Test-time reuse of frozen training parameters; values outside the training
// range are not clipped.
CohortDataset apply_preprocessing(const RawTable& table, const NormalizationParams& params,
                                  const std::vector<std::string>& diseases);

double denormalize(const NormalizationParams& params, int k, double normalized);

// Model file: JSON document with top-level fields schema_version, config,
// theta, lambda, beta, epsilon, normalization, diagnostics.
struct SavedModel {
    ModelConfig config;
    FittedModel model;
    NormalizationParams normalization;
    FitDiagnostics diagnostics;
    std::vector<std::string> biomarkers;
    std::vector<std::string> subject_ids;
};

void save_model(const std::string& path, const SavedModel& saved);
SavedModel load_model(const std::string& path);

// Long-format prediction CSV: subject_id,disease,months_since_baseline,biomarker,predicted
struct PredictionRow {
    std::string subject_id;
    std::string disease;
    double months = 0.0;
    std::string biomarker;
    double value = 0.0;
};

void save_predictions_csv(const std::string& path, const std::vector<PredictionRow>& rows);
std::vector<PredictionRow> load_predictions_csv(const std::string& path);

// Preprocessing requested in a run-spec file.
struct PreprocessSpec {
    bool residualize = false;
    std::vector<std::string> covariates;
    bool normalize = false;
    std::vector<std::string> decreasing;  // biomarkers measured as decreasing with disease
};

struct RunSpec {
    ModelConfig model;
    PreprocessSpec preprocess;
};

// Strict config parsing (unknown keys are errors) for the CLI config file;
// the same representation is embedded in saved models.
RunSpec parse_run_spec_file(const std::string& path);
SynthSpec parse_synth_spec_file(const std::string& path);

}  // namespace dkt
