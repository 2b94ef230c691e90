#include "dkt/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "dkt/rng.hpp"

namespace dkt {

namespace {

std::vector<double> midranks(std::span<const double> v) {
    const int n = static_cast<int>(v.size());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return v[a] < v[b]; });
    std::vector<double> rank(n);
    int pos = 0;
    while (pos < n) {
        int end = pos;
        while (end + 1 < n && v[order[end + 1]] == v[order[pos]]) ++end;
        const double mid = 1.0 + 0.5 * (pos + end);
        for (int j = pos; j <= end; ++j) rank[order[j]] = mid;
        pos = end + 1;
    }
    return rank;
}

bool is_constant(std::span<const double> v) {
    for (double x : v)
        if (x != v[0]) return false;
    return true;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const int n = static_cast<int>(a.size());
    double ma = 0.0, mb = 0.0;
    for (int i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double num = 0.0, da = 0.0, db = 0.0;
    for (int i = 0; i < n; ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        da += (a[i] - ma) * (a[i] - ma);
        db += (b[i] - mb) * (b[i] - mb);
    }
    return num / std::sqrt(da * db);
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw UsageError("spearman: length mismatch");
    if (x.size() < 3) throw UsageError("spearman: need at least 3 pairs");
    if (is_constant(x)) throw DegenerateInputError("spearman: first vector is constant");
    if (is_constant(y)) throw DegenerateInputError("spearman: second vector is constant");
    return pearson(midranks(x), midranks(y));
}

BootstrapResult bootstrap_corr(std::span<const double> pred, std::span<const double> meas,
                               int resamples, std::uint64_t seed) {
    if (pred.size() != meas.size()) throw UsageError("bootstrap_corr: length mismatch");
    const int n = static_cast<int>(pred.size());
    if (n < 5) throw UsageError("bootstrap_corr: need at least 5 pairs");
    if (resamples < 100) throw UsageError("bootstrap_corr: need at least 100 resamples");

    BootstrapResult result;
    result.samples.reserve(resamples);
    std::vector<double> rp(n), rm(n);
    for (int b = 0; b < resamples; ++b) {
        // Derived stream per resample; the sample list is schedule-independent.
        rng::Stream stream(rng::derive(seed, 0xB007, b));
        for (int i = 0; i < n; ++i) {
            const std::size_t j = stream.below(n);
            rp[i] = pred[j];
            rm[i] = meas[j];
        }
        if (is_constant(rp) || is_constant(rm)) {
            result.degenerate_skipped += 1;
            continue;
        }
        result.samples.push_back(pearson(midranks(rp), midranks(rm)));
    }
    if (result.degenerate_skipped * 2 > resamples)
        throw DegenerateInputError("bootstrap_corr: more than half of the resamples degenerate");

    const int m = static_cast<int>(result.samples.size());
    for (double s : result.samples) result.mean += s;
    result.mean /= m;
    if (m > 1) {
        double ss = 0.0;
        for (double s : result.samples) ss += (s - result.mean) * (s - result.mean);
        result.stddev = std::sqrt(ss / (m - 1));
    }
    return result;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i)
        grid[i] = n > 1 ? lo + (hi - lo) * i / (n - 1) : 0.5 * (lo + hi);
    return grid;
}

double trajectory_mae(std::span<const SigmoidParams> truth, std::span<const SigmoidParams> estimate,
                      std::span<const double> grid) {
    if (truth.size() != estimate.size()) throw UsageError("trajectory_mae: family size mismatch");
    if (truth.empty() || grid.empty()) throw UsageError("trajectory_mae: empty family or grid");
    double total = 0.0;
    for (std::size_t f = 0; f < truth.size(); ++f) {
        double sum = 0.0;
        for (double s : grid) sum += std::fabs(sigmoid_eval(s, truth[f]) - sigmoid_eval(s, estimate[f]));
        total += sum / static_cast<double>(grid.size());
    }
    return total / static_cast<double>(truth.size());
}

double shift_r2(std::span<const double> true_beta, std::span<const double> estimated_beta) {
    if (true_beta.size() != estimated_beta.size()) throw UsageError("shift_r2: length mismatch");
    if (true_beta.size() < 3) throw UsageError("shift_r2: need at least 3 subjects");
    if (is_constant(estimated_beta))
        throw DegenerateInputError("shift_r2: estimated shifts are constant");
    if (is_constant(true_beta)) throw DegenerateInputError("shift_r2: true shifts are constant");
    // R^2 of true ~ a + b*estimated equals the squared Pearson correlation.
    const double r = pearson(std::vector<double>(true_beta.begin(), true_beta.end()),
                             std::vector<double>(estimated_beta.begin(), estimated_beta.end()));
    return r * r;
}

WelchResult compare_models(std::span<const double> samples_a, std::span<const double> samples_b,
                           int comparisons, double alpha) {
    if (samples_a.size() < 2 || samples_b.size() < 2)
        throw UsageError("compare_models: need at least 2 samples per group");
    if (comparisons < 1) throw UsageError("compare_models: comparisons must be >= 1");

    const auto moments = [](std::span<const double> v) {
        const int n = static_cast<int>(v.size());
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= n;
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= (n - 1);
        return std::pair<double, double>{mean, var};
    };
    const auto [ma, va] = moments(samples_a);
    const auto [mb, vb] = moments(samples_b);
    const double na = static_cast<double>(samples_a.size());
    const double nb = static_cast<double>(samples_b.size());
    const double se2 = va / na + vb / nb;

    WelchResult result;
    if (!(se2 > 0.0)) {
        if (ma == mb) {
            // Both samples constant and equal: no evidence of a difference.
            throw DegenerateInputError("compare_models: both samples constant and equal");
        }
        result.t = ma < mb ? -1e300 : 1e300;
        result.df = na + nb - 2.0;
        result.p_raw = 0.0;
    } else {
        result.t = (ma - mb) / std::sqrt(se2);
        result.df = se2 * se2 /
                    (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
        const boost::math::students_t_distribution<double> dist(result.df);
        result.p_raw = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(result.t)));
    }
    result.p_bonferroni = std::min(1.0, result.p_raw * comparisons);
    result.significant = result.p_bonferroni < alpha;
    return result;
}

namespace {

std::string format_pm(double mean, double stddev) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << mean << " ± " << stddev;
    return os.str();
}

}  // namespace

void EvalReport::write_csv(std::ostream& out) const {
    out << "# spread: std over " << bootstrap_resamples << " bootstrap resamples of test cells\n";
    out << "model,region,point_corr,boot_mean,boot_std,n,degenerate_resamples,p_bonferroni,"
           "significant\n";
    out << std::setprecision(17);
    for (const EvalCell& c : cells) {
        out << c.model << ',' << c.region << ',' << c.point_corr << ',' << c.boot_mean << ','
            << c.boot_std << ',' << c.n << ',' << c.degenerate_skipped << ',';
        if (c.has_significance) out << c.p_bonferroni << ',' << (c.significant ? 1 : 0);
        else out << ",";
        out << '\n';
    }
    for (const auto& [name, mae] : recovery.trajectory_mae)
        out << "recovery_mae," << name << ',' << mae << ",,,,,,\n";
    for (const auto& [name, r2] : recovery.shift_r2)
        out << "recovery_r2," << name << ',' << r2 << ",,,,,,\n";
}

void EvalReport::write_table(std::ostream& out) const {
    out << "Rank correlation, mean ± std over " << bootstrap_resamples
        << " bootstrap resamples";
    if (!reference_model.empty())
        out << "; (*) significant difference vs " << reference_model
            << " (two-tailed Welch t-test, Bonferroni corrected)";
    out << "\n\n";

    std::vector<std::string> models, regions;
    for (const EvalCell& c : cells) {
        if (std::find(models.begin(), models.end(), c.model) == models.end())
            models.push_back(c.model);
        if (std::find(regions.begin(), regions.end(), c.region) == regions.end())
            regions.push_back(c.region);
    }
    std::map<std::pair<std::string, std::string>, const EvalCell*> by_key;
    for (const EvalCell& c : cells) by_key[{c.model, c.region}] = &c;

    constexpr int width = 16;
    out << std::left << std::setw(width) << "Model";
    for (const auto& r : regions) out << std::setw(width) << r;
    out << '\n';
    for (const auto& m : models) {
        out << std::setw(width) << m;
        for (const auto& r : regions) {
            const auto it = by_key.find({m, r});
            if (it == by_key.end()) {
                out << std::setw(width) << "-";
                continue;
            }
            std::string cell = format_pm(it->second->boot_mean, it->second->boot_std);
            if (it->second->has_significance && it->second->significant) cell += "*";
            out << std::setw(width) << cell;
        }
        out << '\n';
    }
    if (!recovery.trajectory_mae.empty() || !recovery.shift_r2.empty()) {
        out << '\n';
        for (const auto& [name, mae] : recovery.trajectory_mae)
            out << "trajectory MAE  " << name << ": " << std::fixed << std::setprecision(4) << mae
                << '\n';
        for (const auto& [name, r2] : recovery.shift_r2)
            out << "time-shift R^2  " << name << ": " << std::fixed << std::setprecision(4) << r2
                << '\n';
    }
}

}  // namespace dkt
