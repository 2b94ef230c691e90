#include "fit_internal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "dkt/nelder_mead.hpp"

namespace dkt::detail {

std::vector<double> rank_stage_init(const CohortDataset& data) {
    const int n = data.num_subjects();
    std::vector<double> mean_abnormality(n, 0.0);
    std::vector<int> counts(n, 0);
    for (const Measurement& m : data.measurements()) {
        mean_abnormality[m.subject] += m.value;
        counts[m.subject] += 1;
    }
    for (int i = 0; i < n; ++i)
        if (counts[i] > 0) mean_abnormality[i] /= counts[i];

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (mean_abnormality[a] != mean_abnormality[b])
            return mean_abnormality[a] < mean_abnormality[b];
        return data.subject(a).id < data.subject(b).id;
    });

    // Mid-ranks over tied abnormality values keep the mapping independent of
    // subject ordering.
    std::vector<double> rank(n, 0.0);
    int pos = 0;
    while (pos < n) {
        int end = pos;
        while (end + 1 < n &&
               mean_abnormality[order[end + 1]] == mean_abnormality[order[pos]])
            ++end;
        const double mid = 0.5 * (pos + end);
        for (int j = pos; j <= end; ++j) rank[order[j]] = mid;
        pos = end + 1;
    }

    const double span_years = (data.max_months() - data.min_months()) / 12.0;
    const double half_width = std::max(5.0, 3.0 * span_years);
    std::vector<double> beta(n, 0.0);
    if (n > 1) {
        for (int i = 0; i < n; ++i)
            beta[i] = counts[i] > 0 ? -half_width + 2.0 * half_width * rank[i] / (n - 1) : 0.0;
    }
    return beta;
}

double stage_search_1d(const std::function<double(double)>& f, double lo, double hi, int n_seeds,
                       double tie_target, std::span<const double> extra_seeds) {
    const double spacing = n_seeds > 1 ? (hi - lo) / (n_seeds - 1) : (hi - lo);

    struct Seed {
        double x;
        double value;
    };
    std::vector<Seed> seeds;
    seeds.reserve(n_seeds + extra_seeds.size());
    for (int s = 0; s < n_seeds; ++s) {
        const double x = lo + s * spacing;
        seeds.push_back({x, f(x)});
    }
    for (double x : extra_seeds) seeds.push_back({x, f(x)});

    double best_value = std::numeric_limits<double>::infinity();
    for (const Seed& s : seeds) best_value = std::min(best_value, s.value);
    if (!std::isfinite(best_value))
        throw SolverFailureError("stage_search_1d: objective non-finite at every seed");

    // Plateau rule: among near-equal seeds, take the one closest to the prior
    // mean (then the smaller value, for determinism).
    const double tie_slack = 1e-12 * (1.0 + std::fabs(best_value));
    Seed best{0.0, std::numeric_limits<double>::infinity()};
    for (const Seed& s : seeds) {
        if (s.value > best_value + tie_slack) continue;
        if (!std::isfinite(best.value) ||
            std::fabs(s.x - tie_target) < std::fabs(best.x - tie_target) ||
            (std::fabs(s.x - tie_target) == std::fabs(best.x - tie_target) && s.x < best.x))
            best = s;
    }

    const double h = std::max(spacing, 1e-6);
    const double refined = golden_section(f, best.x - h, best.x + h);
    return f(refined) < best.value ? refined : best.x;
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    threads = std::min(threads, n);
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
            for (int i = w; i < n; i += threads) body(i);
        });
    }
    for (auto& t : workers) t.join();
}

}  // namespace dkt::detail
