#include "dkt/latent_stage.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "dkt/nelder_mead.hpp"
#include "fit_internal.hpp"

namespace dkt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHalfLog2Pi = 0.91893853320467274178;
constexpr double kSupportReach = 7.6;

double floored(double eps) { return std::max(eps, kNoiseFloor); }

double raw_sigmoid(double s, double a, double b, double c, double d) {
    const double t = std::clamp(-b * (s - c), -700.0, 700.0);
    return a / (1.0 + std::exp(t)) + d;
}

struct LatentEngine {
    const CohortDataset& data;
    const ModelConfig& config;
    std::vector<int> canon;
    std::vector<std::vector<int>> omega_k;
    std::vector<std::vector<int>> omega_i;

    LatentEngine(const CohortDataset& d, const ModelConfig& c) : data(d), config(c) {
        config.optimizer.validate();
        canon = data.canonical_order();
        omega_k.resize(data.num_biomarkers());
        omega_i.resize(data.num_subjects());
        for (int mi : canon) {
            const Measurement& m = data.measurement(mi);
            omega_k[m.biomarker].push_back(mi);
            omega_i[m.subject].push_back(mi);
        }
    }

    double stage_of(const LatentStageModel& s, const Measurement& m) const {
        return disease_stage(s.beta[m.subject], data.subject(m.subject).months[m.visit]);
    }

    double objective(const LatentStageModel& s) const {
        double total = 0.0;
        for (int mi : canon) {
            const Measurement& m = data.measurement(mi);
            const double r = m.value - sigmoid_eval(stage_of(s, m), s.theta[m.biomarker]);
            const double eps = floored(s.epsilon[m.biomarker]);
            total += r * r / (2.0 * eps) + kHalfLog2Pi + 0.5 * std::log(eps);
        }
        const auto& tp = config.priors.theta;
        for (const SigmoidParams& t : s.theta)
            total += tp[0].neg_log_density(t.amplitude) + tp[1].neg_log_density(t.slope) +
                     tp[2].neg_log_density(t.center) + tp[3].neg_log_density(t.offset);
        for (double b : s.beta) total += config.priors.beta.neg_log_density(b);
        return total;
    }

    double msr(int k, const LatentStageModel& s) const {
        double ssr = 0.0;
        for (int mi : omega_k[k]) {
            const Measurement& m = data.measurement(mi);
            const double r = m.value - sigmoid_eval(stage_of(s, m), s.theta[k]);
            ssr += r * r;
        }
        return ssr / static_cast<double>(omega_k[k].size());
    }

    SigmoidParams theta_candidate(int k, const LatentStageModel& s,
                                  std::uint64_t block_seed) const {
        std::vector<std::pair<double, double>> pts;  // (stage, y)
        pts.reserve(omega_k[k].size());
        for (int mi : omega_k[k]) {
            const Measurement& m = data.measurement(mi);
            pts.emplace_back(stage_of(s, m), m.value);
        }
        const auto& priors = config.priors.theta;
        const Objective f = [&](std::span<const double> x) {
            if (!(x[0] > 0.0) || !(x[1] > 0.0)) return kInf;
            double nlp = 0.0;
            for (int c = 0; c < 4; ++c) nlp += priors[c].neg_log_density(x[c]);
            if (!std::isfinite(nlp)) return kInf;
            double ssr = 0.0;
            for (const auto& [stage, y] : pts) {
                const double r = y - raw_sigmoid(stage, x[0], x[1], x[2], x[3]);
                ssr += r * r;
            }
            return ssr + nlp;
        };
        const SigmoidParams& cur = s.theta[k];
        const std::array<double, 4> x0{cur.amplitude, cur.slope, cur.center, cur.offset};
        const std::array<double, 4> step{0.15 * std::max(std::fabs(cur.amplitude), 0.5),
                                         0.5 * std::max(std::fabs(cur.slope), 0.2), 1.0, 0.05};
        rng::Stream stream(block_seed);
        SolverOptions options;
        options.max_iterations = config.optimizer.max_iterations;
        const SolverResult res = minimize_with_restarts(f, x0, step, priors,
                                                        config.optimizer.restarts, stream, options);
        return SigmoidParams(res.x[0], res.x[1], res.x[2], res.x[3]);
    }

    std::pair<double, double> stage_support(const LatentStageModel& s) const {
        double lo = kInf, hi = -kInf;
        for (const SigmoidParams& t : s.theta) {
            lo = std::min(lo, t.center - kSupportReach / t.slope);
            hi = std::max(hi, t.center + kSupportReach / t.slope);
        }
        for (double b : s.beta) {
            lo = std::min(lo, b);
            hi = std::max(hi, b);
        }
        lo = std::max(lo, -150.0);
        hi = std::min(hi, 150.0);
        if (!(lo < hi)) {
            lo = -10.0;
            hi = 10.0;
        }
        return {lo, hi};
    }

    double beta_candidate(int i, const LatentStageModel& s) const {
        struct Pt {
            double months, y;
            const SigmoidParams* theta;
        };
        std::vector<Pt> pts;
        pts.reserve(omega_i[i].size());
        double max_months = 0.0;
        for (int mi : omega_i[i]) {
            const Measurement& m = data.measurement(mi);
            const double months = data.subject(i).months[m.visit];
            pts.push_back({months, m.value, &s.theta[m.biomarker]});
            max_months = std::max(max_months, months);
        }
        const Prior& prior = config.priors.beta;
        const auto f = [&](double b) {
            const double nlp = prior.neg_log_density(b);
            if (!std::isfinite(nlp)) return kInf;
            double ssr = 0.0;
            for (const Pt& p : pts) {
                const double r = p.y - sigmoid_eval(disease_stage(b, p.months), *p.theta);
                ssr += r * r;
            }
            return ssr + nlp;
        };
        const auto [lo, hi] = stage_support(s);
        const std::array<double, 1> extra{s.beta[i]};
        return detail::stage_search_1d(f, lo - months_to_years(max_months), hi,
                                       config.optimizer.stage_seeds, prior.reference(), extra);
    }

    double theta_local(int k, const LatentStageModel& s, const SigmoidParams& theta) const {
        const double w = 1.0 / (2.0 * floored(s.epsilon[k]));
        double ssr = 0.0;
        for (int mi : omega_k[k]) {
            const Measurement& m = data.measurement(mi);
            const double r = m.value - sigmoid_eval(stage_of(s, m), theta);
            ssr += r * r;
        }
        const auto& tp = config.priors.theta;
        return w * ssr + tp[0].neg_log_density(theta.amplitude) +
               tp[1].neg_log_density(theta.slope) + tp[2].neg_log_density(theta.center) +
               tp[3].neg_log_density(theta.offset);
    }

    double beta_local(int i, const LatentStageModel& s, double beta) const {
        double total = 0.0;
        for (int mi : omega_i[i]) {
            const Measurement& m = data.measurement(mi);
            const double months = data.subject(i).months[m.visit];
            const double r =
                m.value - sigmoid_eval(disease_stage(beta, months), s.theta[m.biomarker]);
            total += r * r / (2.0 * floored(s.epsilon[m.biomarker]));
        }
        return total + config.priors.beta.neg_log_density(beta);
    }
};

}  // namespace

LatentFitResult latent_stage_fit(const CohortDataset& data, const ModelConfig& config) {
    LatentEngine eng(data, config);
    if (data.empty()) throw InsufficientDataError("latent_stage_fit: dataset has no measurements");
    const int K = data.num_biomarkers();
    const int N = data.num_subjects();
    for (int k = 0; k < K; ++k)
        if (static_cast<int>(eng.omega_k[k].size()) < 5)
            throw InsufficientDataError("latent_stage_fit: biomarker '" +
                                        data.biomarker_names()[k] + "' has " +
                                        std::to_string(eng.omega_k[k].size()) +
                                        " measurements; need at least 5");

    LatentFitResult out;
    LatentStageModel& model = out.model;
    FitDiagnostics& diag = out.diagnostics;
    const OptimizerSpec& opt = config.optimizer;

    model.beta = detail::rank_stage_init(data);
    double median_stage = 0.0;
    {
        std::vector<double> stages;
        for (int i = 0; i < N; ++i)
            if (!eng.omega_i[i].empty())
                for (double m : data.subject(i).months)
                    stages.push_back(disease_stage(model.beta[i], m));
        if (!stages.empty()) {
            std::sort(stages.begin(), stages.end());
            median_stage = stages[stages.size() / 2];
        }
    }
    model.theta.assign(K, SigmoidParams(1.0, 0.5, median_stage, 0.0));
    detail::parallel_for(K, opt.threads, [&](int k) {
        model.theta[k] =
            eng.theta_candidate(k, model, rng::derive(opt.seed, detail::kSeedLatentTheta, 0, k));
    });
    model.epsilon.resize(K);
    for (int k = 0; k < K; ++k) model.epsilon[k] = eng.msr(k, model);

    model.trace.push_back(eng.objective(model));
    for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
        detail::parallel_for(K, opt.threads, [&](int k) {
            if (eng.omega_k[k].empty()) return;
            const SigmoidParams cand = eng.theta_candidate(
                k, model, rng::derive(opt.seed, detail::kSeedLatentTheta, sweep, k));
            if (eng.theta_local(k, model, cand) <= eng.theta_local(k, model, model.theta[k]))
                model.theta[k] = cand;
            model.epsilon[k] = eng.msr(k, model);
        });
        detail::parallel_for(N, opt.threads, [&](int i) {
            if (eng.omega_i[i].empty()) return;
            const double cand = eng.beta_candidate(i, model);
            if (eng.beta_local(i, model, cand) <= eng.beta_local(i, model, model.beta[i]))
                model.beta[i] = cand;
        });
        const double obj = eng.objective(model);
        model.trace.push_back(obj);
        diag.sweeps = sweep;
        if (model.trace[sweep - 1] - obj < opt.sweep_tol) {
            diag.converged = true;
            break;
        }
    }
    diag.objective_trace = model.trace;
    return out;
}

double latent_stage_subject(const LatentStageModel& model, const ModelConfig& config,
                            std::span<const Observation> subset) {
    if (subset.empty()) throw DataError("latent_stage_subject: empty data subset");
    const int K = static_cast<int>(model.theta.size());
    double max_months = 0.0;
    for (const Observation& obs : subset) {
        if (obs.biomarker < 0 || obs.biomarker >= K)
            throw DataError("latent_stage_subject: unknown biomarker index " +
                            std::to_string(obs.biomarker));
        max_months = std::max(max_months, obs.months);
    }
    const Prior& prior = config.priors.beta;
    const auto f = [&](double b) {
        const double nlp = prior.neg_log_density(b);
        if (!std::isfinite(nlp)) return kInf;
        double ssr = 0.0;
        for (const Observation& obs : subset) {
            const double r =
                obs.value - sigmoid_eval(disease_stage(b, obs.months), model.theta[obs.biomarker]);
            ssr += r * r;
        }
        return ssr + nlp;
    };
    double lo = kInf, hi = -kInf;
    for (const SigmoidParams& t : model.theta) {
        lo = std::min(lo, t.center - kSupportReach / t.slope);
        hi = std::max(hi, t.center + kSupportReach / t.slope);
    }
    for (double b : model.beta) {
        lo = std::min(lo, b);
        hi = std::max(hi, b);
    }
    lo = std::max(lo, -150.0);
    hi = std::min(hi, 150.0);
    if (!(lo < hi)) {
        lo = -10.0;
        hi = 10.0;
    }
    const std::array<double, 1> extra{prior.reference()};
    return detail::stage_search_1d(f, lo - months_to_years(max_months), hi,
                                   config.optimizer.stage_seeds, prior.reference(), extra);
}

}  // namespace dkt
