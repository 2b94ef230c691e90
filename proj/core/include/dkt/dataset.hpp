#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "dkt/errors.hpp"

namespace dkt {

struct Subject {
    std::string id;
    int disease = 0;  // index into disease_labels()
    std::string diagnosis;
    std::vector<double> months;  // months since baseline, one per visit
};

struct Measurement {
    int subject = 0;
    int visit = 0;
    int biomarker = 0;
    double value = 0.0;  // normalized biomarker value
};

// Sparse longitudinal measurement set: (subject, visit, biomarker) -> value,
// plus per-subject disease index and per-visit months since baseline.
class CohortDataset {
public:
    CohortDataset(std::vector<std::string> biomarker_names,
                  std::vector<std::string> disease_labels);

    int add_subject(std::string id, int disease, std::string diagnosis);
    int add_visit(int subject, double months);
    void add_measurement(int subject, int visit, int biomarker, double value);

    int num_subjects() const { return static_cast<int>(subjects_.size()); }
    int num_biomarkers() const { return static_cast<int>(biomarker_names_.size()); }
    int num_diseases() const { return static_cast<int>(disease_labels_.size()); }
    bool empty() const { return measurements_.empty(); }

    const Subject& subject(int i) const { return subjects_.at(i); }
    const std::vector<Subject>& subjects() const { return subjects_; }
    const std::vector<Measurement>& measurements() const { return measurements_; }
    const Measurement& measurement(int m) const { return measurements_.at(m); }

    // Measurement indices of biomarker k (all subjects/visits), insertion order.
    const std::vector<int>& biomarker_measurements(int k) const { return by_biomarker_.at(k); }
    // Measurement indices of subject i (all visits/biomarkers), insertion order.
    const std::vector<int>& subject_measurements(int i) const { return by_subject_.at(i); }

    const std::vector<std::string>& biomarker_names() const { return biomarker_names_; }
    const std::vector<std::string>& disease_labels() const { return disease_labels_; }
    int biomarker_index(const std::string& name) const;  // -1 when unknown

    // Measurement indices ordered by (subject id, months, biomarker).  Stable
    // under permutations of insertion order; the fit engine sums residuals in
    // this order so fitted parameters do not depend on row order.
    std::vector<int> canonical_order() const;

    double min_months() const;
    double max_months() const;

private:
    std::vector<std::string> biomarker_names_;
    std::vector<std::string> disease_labels_;
    std::vector<Subject> subjects_;
    std::vector<Measurement> measurements_;
    std::vector<std::vector<int>> by_biomarker_;
    std::vector<std::vector<int>> by_subject_;
    std::unordered_set<std::uint64_t> keys_;  // duplicate (i,j,k) detection
};

}  // namespace dkt
