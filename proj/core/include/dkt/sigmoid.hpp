#pragma once

#include <algorithm>
#include <cmath>

#include "dkt/errors.hpp"

namespace dkt {

// Four-parameter logistic curve: sigma(s) = a / (1 + exp(-b*(s - c))) + d.
// Shared shape for biomarker trajectories (input axis: dysfunction score) and
// dysfunction trajectories (input axis: disease stage in years).
struct SigmoidParams {
    double amplitude = 1.0;  // a > 0
    double slope = 1.0;      // b > 0, per unit of the input axis
    double center = 0.0;     // c, input-axis units
    double offset = 0.0;     // d

    SigmoidParams() = default;

    SigmoidParams(double a, double b, double c, double d)
        : amplitude(a), slope(b), center(c), offset(d) {
        validate();
    }

    void validate() const {
        if (!(amplitude > 0.0) || !std::isfinite(amplitude))
            throw NumericalError("SigmoidParams: amplitude must be positive and finite");
        if (!(slope > 0.0) || !std::isfinite(slope))
            throw NumericalError("SigmoidParams: slope must be positive and finite");
        if (!std::isfinite(center) || !std::isfinite(offset))
            throw NumericalError("SigmoidParams: center/offset must be finite");
    }
};

// Total on finite inputs: the exp argument is clamped to +-700 so saturation
// returns the asymptote instead of overflowing.
inline double sigmoid_eval(double s, const SigmoidParams& p) {
    const double t = std::clamp(-p.slope * (s - p.center), -700.0, 700.0);
    return p.amplitude / (1.0 + std::exp(t)) + p.offset;
}

}  // namespace dkt
