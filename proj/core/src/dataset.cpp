#include "dkt/dataset.hpp"

#include <algorithm>
#include <limits>

namespace dkt {

namespace {

std::uint64_t pack_key(int subject, int visit, int biomarker) {
    return (static_cast<std::uint64_t>(subject) << 40) |
           (static_cast<std::uint64_t>(visit) << 20) | static_cast<std::uint64_t>(biomarker);
}

}  // namespace

CohortDataset::CohortDataset(std::vector<std::string> biomarker_names,
                             std::vector<std::string> disease_labels)
    : biomarker_names_(std::move(biomarker_names)), disease_labels_(std::move(disease_labels)) {
    if (biomarker_names_.empty()) throw DataError("CohortDataset: no biomarkers");
    if (disease_labels_.empty()) throw DataError("CohortDataset: no diseases");
    by_biomarker_.resize(biomarker_names_.size());
}

int CohortDataset::add_subject(std::string id, int disease, std::string diagnosis) {
    if (disease < 0 || disease >= num_diseases())
        throw DataError("CohortDataset: disease index out of range for subject '" + id + "'");
    subjects_.push_back(Subject{std::move(id), disease, std::move(diagnosis), {}});
    by_subject_.emplace_back();
    return num_subjects() - 1;
}

int CohortDataset::add_visit(int subject, double months) {
    auto& s = subjects_.at(subject);
    s.months.push_back(months);
    return static_cast<int>(s.months.size()) - 1;
}

void CohortDataset::add_measurement(int subject, int visit, int biomarker, double value) {
    if (subject < 0 || subject >= num_subjects())
        throw DataError("CohortDataset: measurement references unknown subject");
    if (visit < 0 || visit >= static_cast<int>(subjects_[subject].months.size()))
        throw DataError("CohortDataset: measurement references unknown visit of subject '" +
                        subjects_[subject].id + "'");
    if (biomarker < 0 || biomarker >= num_biomarkers())
        throw DataError("CohortDataset: measurement references unknown biomarker");
    if (!keys_.insert(pack_key(subject, visit, biomarker)).second)
        throw DataError("CohortDataset: duplicate measurement for subject '" +
                        subjects_[subject].id + "', visit " + std::to_string(visit) +
                        ", biomarker '" + biomarker_names_[biomarker] + "'");
    const int idx = static_cast<int>(measurements_.size());
    measurements_.push_back(Measurement{subject, visit, biomarker, value});
    by_biomarker_[biomarker].push_back(idx);
    by_subject_[subject].push_back(idx);
}

int CohortDataset::biomarker_index(const std::string& name) const {
    for (int k = 0; k < num_biomarkers(); ++k)
        if (biomarker_names_[k] == name) return k;
    return -1;
}

std::vector<int> CohortDataset::canonical_order() const {
    std::vector<int> order(measurements_.size());
    for (std::size_t m = 0; m < order.size(); ++m) order[m] = static_cast<int>(m);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const Measurement& ma = measurements_[a];
        const Measurement& mb = measurements_[b];
        const std::string& ia = subjects_[ma.subject].id;
        const std::string& ib = subjects_[mb.subject].id;
        if (ia != ib) return ia < ib;
        const double ta = subjects_[ma.subject].months[ma.visit];
        const double tb = subjects_[mb.subject].months[mb.visit];
        if (ta != tb) return ta < tb;
        return ma.biomarker < mb.biomarker;
    });
    return order;
}

double CohortDataset::min_months() const {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& s : subjects_)
        for (double m : s.months) lo = std::min(lo, m);
    return lo;
}

double CohortDataset::max_months() const {
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& s : subjects_)
        for (double m : s.months) hi = std::max(hi, m);
    return hi;
}

}  // namespace dkt
