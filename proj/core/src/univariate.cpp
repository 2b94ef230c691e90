#include "dkt/univariate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace dkt {

namespace {

// Index j with knots[j] <= x < knots[j+1], clamped to the valid piece range
// so that out-of-range x evaluates the boundary polynomial piece.
int find_span(const std::vector<double>& knots, int degree, double x) {
    const int last = static_cast<int>(knots.size()) - degree - 2;
    if (x >= knots[last + 1]) return last;
    if (x <= knots[degree]) return degree;
    const auto it = std::upper_bound(knots.begin() + degree, knots.begin() + last + 1, x);
    return static_cast<int>(it - knots.begin()) - 1;
}

// Nonzero basis values N_{span-degree..span} at x (Cox-de Boor triangle).
void basis_funs(const std::vector<double>& knots, int degree, int span, double x,
                std::vector<double>& out) {
    out.assign(degree + 1, 0.0);
    out[0] = 1.0;
    std::vector<double> left(degree + 1), right(degree + 1);
    for (int r = 1; r <= degree; ++r) {
        left[r] = x - knots[span + 1 - r];
        right[r] = knots[span + r] - x;
        double saved = 0.0;
        for (int c = 0; c < r; ++c) {
            const double denom = right[c + 1] + left[r - c];
            const double temp = denom != 0.0 ? out[c] / denom : 0.0;
            out[c] = saved + right[c + 1] * temp;
            saved = left[r - c] * temp;
        }
        out[r] = saved;
    }
}

void check_finite(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw UsageError("univariate fit: x/y length mismatch");
    for (double v : x)
        if (!std::isfinite(v)) throw NumericalError("univariate fit: non-finite x");
    for (double v : y)
        if (!std::isfinite(v)) throw NumericalError("univariate fit: non-finite y");
}

}  // namespace

UnivariateRegressor bspline_fit(std::span<const double> x, std::span<const double> y, int degree,
                                int interior_knots) {
    check_finite(x, y);
    const int n = static_cast<int>(x.size());
    if (degree < 1) throw UsageError("bspline_fit: degree must be >= 1");
    if (interior_knots < 0) throw UsageError("bspline_fit: negative knot count");
    if (n < interior_knots + degree + 1)
        throw UsageError("bspline_fit: need at least " +
                         std::to_string(interior_knots + degree + 1) + " points");

    std::vector<double> xs(x.begin(), x.end());
    std::sort(xs.begin(), xs.end());
    const double lo = xs.front(), hi = xs.back();
    if (!(hi > lo)) throw DegenerateInputError("bspline_fit: all x values identical");

    // Interior knots at data quantiles, kept strictly increasing inside
    // (lo, hi); collided quantiles (heavy ties) are dropped.
    std::vector<double> knots(degree + 1, lo);
    double prev = lo;
    for (int i = 1; i <= interior_knots; ++i) {
        const double q = static_cast<double>(i) / (interior_knots + 1);
        const double pos = q * (n - 1);
        const int base = static_cast<int>(pos);
        const double frac = pos - base;
        const double knot =
            base + 1 < n ? xs[base] + frac * (xs[base + 1] - xs[base]) : xs[base];
        if (knot > prev && knot < hi) {
            knots.push_back(knot);
            prev = knot;
        }
    }
    knots.insert(knots.end(), degree + 1, hi);

    const int nbasis = static_cast<int>(knots.size()) - degree - 1;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, nbasis);
    std::vector<double> basis;
    for (int i = 0; i < n; ++i) {
        const int span = find_span(knots, degree, x[i]);
        basis_funs(knots, degree, span, x[i], basis);
        for (int c = 0; c <= degree; ++c) A(i, span - degree + c) = basis[c];
    }
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = y[i];
    const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(rhs);

    UnivariateRegressor model;
    model.kind = RegressorKind::CubicSpline;
    model.degree = degree;
    model.knots = std::move(knots);
    model.coefficients.assign(coef.data(), coef.data() + nbasis);
    return model;
}

UnivariateRegressor spline_fit(std::span<const double> x, std::span<const double> y,
                               int interior_knots) {
    return bspline_fit(x, y, 3, interior_knots);
}

UnivariateRegressor linear_fit(std::span<const double> x, std::span<const double> y) {
    check_finite(x, y);
    const int n = static_cast<int>(x.size());
    if (n < 2) throw UsageError("linear_fit: need at least 2 points");
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw DegenerateInputError("linear_fit: all x values identical");

    UnivariateRegressor model;
    model.kind = RegressorKind::Linear;
    const double slope = sxy / sxx;
    model.coefficients = {my - slope * mx, slope};
    return model;
}

double predict(const UnivariateRegressor& model, double x) {
    if (model.kind == RegressorKind::Linear)
        return model.coefficients[0] + model.coefficients[1] * x;
    const int span = find_span(model.knots, model.degree, x);
    std::vector<double> basis;
    basis_funs(model.knots, model.degree, span, x, basis);
    double value = 0.0;
    for (int c = 0; c <= model.degree; ++c)
        value += basis[c] * model.coefficients[span - model.degree + c];
    return value;
}

}  // namespace dkt
