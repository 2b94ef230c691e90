#include "dkt/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace dkt {

Prior Prior::gaussian(double mean, double stddev, bool positive) {
    if (!(stddev > 0.0)) throw UsageError("Prior: standard deviation must be > 0");
    Prior p;
    p.kind = PriorKind::Gaussian;
    p.mean = mean;
    p.stddev = stddev;
    p.positive = positive;
    return p;
}

double Prior::neg_log_density(double x) const {
    if (positive && !(x > 0.0)) return std::numeric_limits<double>::infinity();
    if (kind == PriorKind::Flat) return 0.0;
    const double z = (x - mean) / stddev;
    return 0.5 * z * z + std::log(stddev * std::sqrt(2.0 * std::numbers::pi));
}

double Prior::sample(rng::Stream& stream, double incumbent, double scale) const {
    for (int attempt = 0; attempt < 32; ++attempt) {
        double x;
        if (kind == PriorKind::Gaussian) {
            x = mean + stddev * stream.normal();
        } else {
            x = incumbent + scale * stream.normal();
        }
        if (!positive || x > 0.0) return x;
    }
    // Positive-support fallback: reflect around zero, floor away from it.
    const double base = kind == PriorKind::Gaussian ? std::fabs(mean) + stddev : std::fabs(incumbent);
    return std::max(base, 1e-6 * std::max(scale, 1.0));
}

PriorSpec PriorSpec::defaults() {
    PriorSpec spec;
    // Trajectories of [0,1]-normalized biomarkers over a [0,1] dysfunction
    // axis: amplitude near 1, offset near 0, center inside the axis, slope of
    // a curve that completes its transition within the axis.  Without these
    // anchors the two-level composition can absorb arbitrary axis
    // reparameterizations (amplitude and slope drift to extreme values).
    spec.theta = {Prior::gaussian(1.0, 0.3, true), Prior::gaussian(6.0, 4.0, true),
                  Prior::gaussian(0.5, 0.5), Prior::gaussian(0.0, 0.3)};
    spec.lambda = {Prior::flat(true), Prior::gaussian(0.25, 0.5, true), Prior::gaussian(0.0, 10.0),
                   Prior::flat()};
    spec.beta = Prior::gaussian(0.0, 10.0);
    return spec;
}

PriorSpec PriorSpec::all_flat() {
    PriorSpec spec;
    spec.theta = {Prior::flat(true), Prior::flat(true), Prior::flat(), Prior::flat()};
    spec.lambda = {Prior::flat(true), Prior::flat(true), Prior::flat(), Prior::flat()};
    spec.beta = Prior::flat();
    return spec;
}

int ModelConfig::num_units() const {
    int hi = -1;
    for (int u : unit_allocation) hi = std::max(hi, u);
    return hi + 1;
}

void ModelConfig::validate(int num_biomarkers) const {
    if (static_cast<int>(unit_allocation.size()) != num_biomarkers)
        throw UsageError("ModelConfig: unit_allocation must cover every biomarker (" +
                         std::to_string(unit_allocation.size()) + " entries for " +
                         std::to_string(num_biomarkers) + " biomarkers)");
    for (int u : unit_allocation)
        if (u < 0) throw UsageError("ModelConfig: negative unit index");
    if (diseases.empty()) throw UsageError("ModelConfig: no diseases");
    optimizer.validate();
}

}  // namespace dkt
