#pragma once

#include <span>
#include <vector>

#include "dkt/errors.hpp"

namespace dkt {

enum class RegressorKind { CubicSpline, Linear };

// One-input regressor: ordinary least squares line, or a least-squares
// B-spline with interior knots at data quantiles.
struct UnivariateRegressor {
    RegressorKind kind = RegressorKind::Linear;
    int degree = 1;
    std::vector<double> knots;         // full clamped knot vector (spline only)
    std::vector<double> coefficients;  // spline control values, or {intercept, slope}
};

// Least-squares B-spline of the given degree; evaluation outside the data
// range extends the boundary polynomial pieces.
UnivariateRegressor bspline_fit(std::span<const double> x, std::span<const double> y, int degree,
                                int interior_knots);

UnivariateRegressor spline_fit(std::span<const double> x, std::span<const double> y,
                               int interior_knots = 4);

UnivariateRegressor linear_fit(std::span<const double> x, std::span<const double> y);

double predict(const UnivariateRegressor& model, double x);

}  // namespace dkt
