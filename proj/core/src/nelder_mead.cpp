#include "dkt/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dkt/errors.hpp"

namespace dkt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

SolverResult nelder_mead(const Objective& f, std::span<const double> x0,
                         std::span<const double> step, const SolverOptions& options) {
    const int n = static_cast<int>(x0.size());
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

    std::vector<std::vector<double>> x(n + 1, std::vector<double>(x0.begin(), x0.end()));
    std::vector<double> fx(n + 1);
    for (int j = 1; j <= n; ++j) x[j][j - 1] += step[j - 1];
    for (int j = 0; j <= n; ++j) fx[j] = f(x[j]);

    if (!std::isfinite(fx[0])) {
        SolverResult bad;
        bad.x.assign(x0.begin(), x0.end());
        bad.value = fx[0];
        return bad;
    }

    std::vector<int> order(n + 1);
    auto sort_simplex = [&] {
        for (int j = 0; j <= n; ++j) order[j] = j;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fx[a] < fx[b]; });
        std::vector<std::vector<double>> x2(n + 1);
        std::vector<double> fx2(n + 1);
        for (int j = 0; j <= n; ++j) {
            x2[j] = std::move(x[order[j]]);
            fx2[j] = fx[order[j]];
        }
        x = std::move(x2);
        fx = std::move(fx2);
    };

    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        sort_simplex();
        const double spread = fx[n] - fx[0];
        if (spread <= options.f_tol * (1.0 + std::fabs(fx[0])) && std::isfinite(fx[n])) break;

        for (int i = 0; i < n; ++i) {
            double c = 0.0;
            for (int j = 0; j < n; ++j) c += x[j][i];
            centroid[i] = c / n;
        }

        for (int i = 0; i < n; ++i) xr[i] = centroid[i] + alpha * (centroid[i] - x[n][i]);
        const double fr = f(xr);

        if (fr < fx[0]) {
            for (int i = 0; i < n; ++i) xe[i] = centroid[i] + gamma * (xr[i] - centroid[i]);
            const double fe = f(xe);
            if (fe < fr) {
                x[n] = xe;
                fx[n] = fe;
            } else {
                x[n] = xr;
                fx[n] = fr;
            }
        } else if (fr < fx[n - 1]) {
            x[n] = xr;
            fx[n] = fr;
        } else {
            const bool outside = fr < fx[n];
            const std::vector<double>& base = outside ? xr : x[n];
            for (int i = 0; i < n; ++i) xc[i] = centroid[i] + rho * (base[i] - centroid[i]);
            const double fc = f(xc);
            if (fc < (outside ? fr : fx[n])) {
                x[n] = xc;
                fx[n] = fc;
            } else {
                for (int j = 1; j <= n; ++j) {
                    for (int i = 0; i < n; ++i) x[j][i] = x[0][i] + sigma * (x[j][i] - x[0][i]);
                    fx[j] = f(x[j]);
                }
            }
        }
    }

    sort_simplex();
    SolverResult result;
    result.x = x[0];
    result.value = fx[0];
    result.iterations = iter;
    result.finite = std::isfinite(fx[0]);
    return result;
}

SolverResult minimize_with_restarts(const Objective& f, std::span<const double> x0,
                                    std::span<const double> step, std::span<const Prior> priors,
                                    int restarts, rng::Stream& stream,
                                    const SolverOptions& options) {
    const int n = static_cast<int>(x0.size());
    SolverResult best;
    best.value = kInf;

    std::vector<double> start(x0.begin(), x0.end());
    for (int r = 0; r < restarts; ++r) {
        if (r > 0) {
            for (int i = 0; i < n; ++i) start[i] = priors[i].sample(stream, x0[i], step[i]);
            if (!std::isfinite(f(start))) continue;
        }
        SolverResult candidate = nelder_mead(f, start, step, options);
        if (!candidate.finite) continue;
        if (candidate.value < best.value ||
            (candidate.value == best.value && (!best.finite || lex_less(candidate.x, best.x)))) {
            best = std::move(candidate);
        }
    }

    if (!best.finite) throw SolverFailureError("minimize_with_restarts: every restart diverged");

    // The incumbent is always a valid fallback: never return a worse point.
    const double f0 = f(x0);
    if (std::isfinite(f0) && f0 < best.value) {
        best.x.assign(x0.begin(), x0.end());
        best.value = f0;
    }
    return best;
}

double golden_section(const std::function<double(double)>& f, double lo, double hi,
                      int iterations) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iterations; ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? x1 : x2;
}

}  // namespace dkt
