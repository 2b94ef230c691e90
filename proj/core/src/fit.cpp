#include "dkt/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "dkt/nelder_mead.hpp"
#include "fit_internal.hpp"

namespace dkt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHalfLog2Pi = 0.91893853320467274178;
// |b(s-c)| beyond which a sigmoid is within ~5e-4 of its asymptote; bounds the
// stage interval worth searching.
constexpr double kSupportReach = 7.6;

double floored(double eps) { return std::max(eps, kNoiseFloor); }

double raw_sigmoid(double s, double a, double b, double c, double d) {
    const double t = std::clamp(-b * (s - c), -700.0, 700.0);
    return a / (1.0 + std::exp(t)) + d;
}

struct Engine {
    const CohortDataset& data;
    const ModelConfig& config;
    int num_biomarkers;
    int num_diseases;
    int num_units;
    int num_subjects;
    std::vector<int> canon;
    std::vector<std::vector<int>> omega_k;
    std::vector<std::vector<int>> omega_i;
    std::vector<std::vector<std::vector<int>>> omega_dl;

    Engine(const CohortDataset& d, const ModelConfig& c)
        : data(d),
          config(c),
          num_biomarkers(d.num_biomarkers()),
          num_diseases(c.diseases.empty() ? d.num_diseases() : static_cast<int>(c.diseases.size())),
          num_units(c.num_units()),
          num_subjects(d.num_subjects()) {
        config.validate(num_biomarkers);
        if (d.num_diseases() > num_diseases)
            throw UsageError("fit: dataset references more diseases than the config lists");
        canon = data.canonical_order();
        omega_k.resize(num_biomarkers);
        omega_i.resize(num_subjects);
        omega_dl.assign(num_diseases, std::vector<std::vector<int>>(num_units));
        for (int mi : canon) {
            const Measurement& m = data.measurement(mi);
            omega_k[m.biomarker].push_back(mi);
            omega_i[m.subject].push_back(mi);
            omega_dl[data.subject(m.subject).disease][config.unit_allocation[m.biomarker]]
                .push_back(mi);
        }
    }

    double predict(const FittedModel& s, const Measurement& m) const {
        const Subject& subj = data.subject(m.subject);
        const int unit = config.unit_allocation[m.biomarker];
        return biomarker_predict(s.beta[m.subject], subj.months[m.visit],
                                 s.lambda[subj.disease][unit], s.theta[m.biomarker]);
    }

    // Trace/convergence objective: posterior with floored noise, canonical
    // accumulation order.
    double objective(const FittedModel& s) const {
        double total = 0.0;
        for (int mi : canon) {
            const Measurement& m = data.measurement(mi);
            const double r = m.value - predict(s, m);
            const double eps = floored(s.epsilon[m.biomarker]);
            total += r * r / (2.0 * eps) + kHalfLog2Pi + 0.5 * std::log(eps);
        }
        return total + prior_neg_log_density(s, config);
    }

    double msr(int k, const FittedModel& s) const {
        const auto& idx = omega_k[k];
        double ssr = 0.0;
        for (int mi : idx) {
            const Measurement& m = data.measurement(mi);
            const double r = m.value - predict(s, m);
            ssr += r * r;
        }
        return ssr / static_cast<double>(idx.size());
    }

    SigmoidParams theta_candidate(int k, const FittedModel& s, std::uint64_t block_seed) const {
        const auto& idx = omega_k[k];
        const int unit = config.unit_allocation[k];
        std::vector<std::pair<double, double>> pts;  // (dysfunction score, y)
        pts.reserve(idx.size());
        for (int mi : idx) {
            const Measurement& m = data.measurement(mi);
            const Subject& subj = data.subject(m.subject);
            pts.emplace_back(dysfunction_score(s.beta[m.subject], subj.months[m.visit],
                                               s.lambda[subj.disease][unit]),
                             m.value);
        }
        const auto& priors = config.priors.theta;
        const Objective f = [&](std::span<const double> x) {
            if (!(x[0] > 0.0) || !(x[1] > 0.0)) return kInf;
            double nlp = 0.0;
            for (int c = 0; c < 4; ++c) nlp += priors[c].neg_log_density(x[c]);
            if (!std::isfinite(nlp)) return kInf;
            double ssr = 0.0;
            for (const auto& [g, y] : pts) {
                const double r = y - raw_sigmoid(g, x[0], x[1], x[2], x[3]);
                ssr += r * r;
            }
            return ssr + nlp;
        };
        const SigmoidParams& cur = s.theta[k];
        const std::array<double, 4> x0{cur.amplitude, cur.slope, cur.center, cur.offset};
        const std::array<double, 4> step{0.15 * std::max(std::fabs(cur.amplitude), 0.5),
                                         0.3 * std::max(std::fabs(cur.slope), 1.0), 0.1, 0.05};
        rng::Stream stream(block_seed);
        SolverOptions options;
        options.max_iterations = config.optimizer.max_iterations;
        const SolverResult res = minimize_with_restarts(f, x0, step, priors,
                                                        config.optimizer.restarts, stream, options);
        return SigmoidParams(res.x[0], res.x[1], res.x[2], res.x[3]);
    }

    SigmoidParams lambda_candidate(int d, int l, const FittedModel& s,
                                   std::uint64_t block_seed) const {
        const auto& idx = omega_dl[d][l];
        struct Pt {
            double stage, y;
            const SigmoidParams* theta;
        };
        std::vector<Pt> pts;
        pts.reserve(idx.size());
        for (int mi : idx) {
            const Measurement& m = data.measurement(mi);
            const Subject& subj = data.subject(m.subject);
            pts.push_back({disease_stage(s.beta[m.subject], subj.months[m.visit]), m.value,
                           &s.theta[m.biomarker]});
        }
        const SigmoidParams& cur = s.lambda[d][l];
        const bool fixed = config.fixed_lambda_shape;
        const auto& priors = config.priors.lambda;

        const Objective f = [&](std::span<const double> x) {
            const double a = fixed ? 1.0 : x[0];
            const double b = fixed ? x[0] : x[1];
            const double c = fixed ? x[1] : x[2];
            const double off = fixed ? 0.0 : x[3];
            if (!(a > 0.0) || !(b > 0.0)) return kInf;
            double nlp = priors[1].neg_log_density(b) + priors[2].neg_log_density(c);
            if (!fixed) nlp += priors[0].neg_log_density(a) + priors[3].neg_log_density(off);
            if (!std::isfinite(nlp)) return kInf;
            double ssr = 0.0;
            for (const Pt& p : pts) {
                const double gamma = raw_sigmoid(p.stage, a, b, c, off);
                const double r = p.y - sigmoid_eval(gamma, *p.theta);
                ssr += r * r;
            }
            return ssr + nlp;
        };

        rng::Stream stream(block_seed);
        SolverOptions options;
        options.max_iterations = config.optimizer.max_iterations;
        if (fixed) {
            const std::array<double, 2> x0{cur.slope, cur.center};
            const std::array<double, 2> step{0.15 * std::max(std::fabs(cur.slope), 0.3), 1.0};
            const std::array<Prior, 2> free_priors{priors[1], priors[2]};
            const SolverResult res = minimize_with_restarts(
                f, x0, step, free_priors, config.optimizer.restarts, stream, options);
            return SigmoidParams(1.0, res.x[0], res.x[1], 0.0);
        }
        const std::array<double, 4> x0{cur.amplitude, cur.slope, cur.center, cur.offset};
        const std::array<double, 4> step{0.15 * std::max(std::fabs(cur.amplitude), 0.5),
                                         0.15 * std::max(std::fabs(cur.slope), 0.3), 1.0, 0.05};
        const SolverResult res =
            minimize_with_restarts(f, x0, step, priors, config.optimizer.restarts, stream, options);
        return SigmoidParams(res.x[0], res.x[1], res.x[2], res.x[3]);
    }

    std::pair<double, double> stage_support(const std::vector<SigmoidParams>& lambdas,
                                            const std::vector<double>& betas) const {
        double lo = kInf, hi = -kInf;
        for (const SigmoidParams& lam : lambdas) {
            lo = std::min(lo, lam.center - kSupportReach / lam.slope);
            hi = std::max(hi, lam.center + kSupportReach / lam.slope);
        }
        for (double b : betas) {
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

    double beta_candidate(int i, const FittedModel& s) const {
        const auto& idx = omega_i[i];
        const Subject& subj = data.subject(i);
        struct Pt {
            double months, y;
            const SigmoidParams* lambda;
            const SigmoidParams* theta;
        };
        std::vector<Pt> pts;
        pts.reserve(idx.size());
        double max_months = 0.0;
        for (int mi : idx) {
            const Measurement& m = data.measurement(mi);
            const int unit = config.unit_allocation[m.biomarker];
            pts.push_back({subj.months[m.visit], m.value, &s.lambda[subj.disease][unit],
                           &s.theta[m.biomarker]});
            max_months = std::max(max_months, subj.months[m.visit]);
        }
        const Prior& prior = config.priors.beta;
        const auto f = [&](double b) {
            const double nlp = prior.neg_log_density(b);
            if (!std::isfinite(nlp)) return kInf;
            double ssr = 0.0;
            for (const Pt& p : pts) {
                const double r = p.y - biomarker_predict(b, p.months, *p.lambda, *p.theta);
                ssr += r * r;
            }
            return ssr + nlp;
        };
        const auto [lo, hi] = stage_support(s.lambda[subj.disease], s.beta);
        const std::array<double, 1> extra{s.beta[i]};
        return detail::stage_search_1d(f, lo - months_to_years(max_months), hi,
                                       config.optimizer.stage_seeds, prior.reference(), extra);
    }

    // Local epsilon-weighted posterior terms of one block; used to accept or
    // reject a candidate so the full posterior never increases.
    double theta_local(int k, const FittedModel& s, const SigmoidParams& theta) const {
        const double w = 1.0 / (2.0 * floored(s.epsilon[k]));
        const int unit = config.unit_allocation[k];
        double ssr = 0.0;
        for (int mi : omega_k[k]) {
            const Measurement& m = data.measurement(mi);
            const Subject& subj = data.subject(m.subject);
            const double r = m.value - biomarker_predict(s.beta[m.subject], subj.months[m.visit],
                                                         s.lambda[subj.disease][unit], theta);
            ssr += r * r;
        }
        const auto& priors = config.priors.theta;
        return w * ssr + priors[0].neg_log_density(theta.amplitude) +
               priors[1].neg_log_density(theta.slope) + priors[2].neg_log_density(theta.center) +
               priors[3].neg_log_density(theta.offset);
    }

    double lambda_local(int d, int l, const FittedModel& s, const SigmoidParams& lambda) const {
        double total = 0.0;
        for (int mi : omega_dl[d][l]) {
            const Measurement& m = data.measurement(mi);
            const Subject& subj = data.subject(m.subject);
            const double r = m.value - biomarker_predict(s.beta[m.subject], subj.months[m.visit],
                                                         lambda, s.theta[m.biomarker]);
            total += r * r / (2.0 * floored(s.epsilon[m.biomarker]));
        }
        const auto& priors = config.priors.lambda;
        total += priors[1].neg_log_density(lambda.slope) + priors[2].neg_log_density(lambda.center);
        if (!config.fixed_lambda_shape)
            total += priors[0].neg_log_density(lambda.amplitude) +
                     priors[3].neg_log_density(lambda.offset);
        return total;
    }

    double beta_local(int i, const FittedModel& s, double beta) const {
        double total = 0.0;
        for (int mi : omega_i[i]) {
            const Measurement& m = data.measurement(mi);
            const Subject& subj = data.subject(m.subject);
            const int unit = config.unit_allocation[m.biomarker];
            const double r = m.value - biomarker_predict(beta, subj.months[m.visit],
                                                         s.lambda[subj.disease][unit],
                                                         s.theta[m.biomarker]);
            total += r * r / (2.0 * floored(s.epsilon[m.biomarker]));
        }
        return total + config.priors.beta.neg_log_density(beta);
    }
};

FittedModel initialize_impl(const Engine& eng) {
    const CohortDataset& data = eng.data;
    const ModelConfig& config = eng.config;
    if (data.empty()) throw InsufficientDataError("initialize: dataset has no measurements");
    for (int k = 0; k < eng.num_biomarkers; ++k) {
        if (static_cast<int>(eng.omega_k[k].size()) < 5)
            throw InsufficientDataError("initialize: biomarker '" + data.biomarker_names()[k] +
                                        "' has " + std::to_string(eng.omega_k[k].size()) +
                                        " measurements; need at least 5");
    }

    FittedModel model;
    model.beta = detail::rank_stage_init(data);

    // Identity-like lambda init, one center per (disease, unit): the
    // abnormality-weighted mean stage of that unit's own measurements.  A
    // single per-disease center puts all units of a disease on top of each
    // other, a locally stable collapsed optimum the sweeps cannot leave.
    model.lambda.assign(eng.num_diseases, std::vector<SigmoidParams>(eng.num_units));
    const Prior& slope_prior = config.priors.lambda[1];
    const Prior& center_prior = config.priors.lambda[2];
    const double prior_slope = slope_prior.reference() > 0.0 ? slope_prior.reference() : 0.5;
    for (int d = 0; d < eng.num_diseases; ++d) {
        for (int l = 0; l < eng.num_units; ++l) {
            if (eng.omega_dl[d][l].empty()) {
                model.lambda[d][l] =
                    SigmoidParams(1.0, prior_slope, center_prior.reference(), 0.0);
                continue;
            }
            // Weights y(1-y) peak where the unit transitions, so the weighted
            // mean stage estimates the sigmoid center.
            double weighted = 0.0, total = 0.0, plain = 0.0;
            for (int mi : eng.omega_dl[d][l]) {
                const Measurement& m = data.measurement(mi);
                const double stage =
                    disease_stage(model.beta[m.subject], data.subject(m.subject).months[m.visit]);
                const double y = std::clamp(m.value, 0.02, 0.98);
                const double w = y * y * (1.0 - y) * (1.0 - y);
                weighted += w * stage;
                total += w;
                plain += stage;
            }
            const double center = total > 0.0 ? weighted / total
                                              : plain / static_cast<double>(eng.omega_dl[d][l].size());
            model.lambda[d][l] = SigmoidParams(1.0, 0.5, center, 0.0);
        }
    }

    model.theta.assign(eng.num_biomarkers, SigmoidParams(1.0, 4.0, 0.5, 0.0));
    detail::parallel_for(eng.num_biomarkers, config.optimizer.threads, [&](int k) {
        model.theta[k] = eng.theta_candidate(
            k, model, rng::derive(config.optimizer.seed, detail::kSeedInitTheta, k));
    });

    model.epsilon.resize(eng.num_biomarkers);
    for (int k = 0; k < eng.num_biomarkers; ++k) model.epsilon[k] = eng.msr(k, model);
    return model;
}

}  // namespace

double fit_objective(const CohortDataset& data, const FittedModel& model,
                     const ModelConfig& config) {
    return Engine(data, config).objective(model);
}

FittedModel initialize(const CohortDataset& data, const ModelConfig& config) {
    return initialize_impl(Engine(data, config));
}

SigmoidParams fit_trajectory(int k, const FittedModel& state, const CohortDataset& data,
                             const ModelConfig& config) {
    Engine eng(data, config);
    if (k < 0 || k >= eng.num_biomarkers) throw UsageError("fit_trajectory: biomarker out of range");
    if (eng.omega_k[k].empty())
        throw EmptyBlockError("fit_trajectory: no measurements for biomarker '" +
                              data.biomarker_names()[k] + "'");
    return eng.theta_candidate(k, state, rng::derive(config.optimizer.seed, detail::kSeedTheta, 0, k));
}

double update_noise(int k, const FittedModel& state, const CohortDataset& data,
                    const ModelConfig& config) {
    Engine eng(data, config);
    if (k < 0 || k >= eng.num_biomarkers) throw UsageError("update_noise: biomarker out of range");
    if (eng.omega_k[k].empty())
        throw EmptyBlockError("update_noise: no measurements for biomarker '" +
                              data.biomarker_names()[k] + "'");
    return eng.msr(k, state);
}

SigmoidParams fit_dysfunction(int disease, int unit, const FittedModel& state,
                              const CohortDataset& data, const ModelConfig& config) {
    Engine eng(data, config);
    if (disease < 0 || disease >= eng.num_diseases)
        throw UsageError("fit_dysfunction: disease out of range");
    if (unit < 0 || unit >= eng.num_units) throw UsageError("fit_dysfunction: unit out of range");
    if (eng.omega_dl[disease][unit].empty())
        throw EmptyBlockError("fit_dysfunction: no measurements for disease " +
                              std::to_string(disease) + ", unit " + std::to_string(unit));
    return eng.lambda_candidate(disease, unit, state,
                                rng::derive(config.optimizer.seed, detail::kSeedLambda, 0,
                                            static_cast<std::uint64_t>(disease) * eng.num_units +
                                                unit));
}

double fit_subject_shift(int i, const FittedModel& state, const CohortDataset& data,
                         const ModelConfig& config) {
    Engine eng(data, config);
    if (i < 0 || i >= eng.num_subjects) throw UsageError("fit_subject_shift: subject out of range");
    if (eng.omega_i[i].empty())
        throw EmptyBlockError("fit_subject_shift: no measurements for subject '" +
                              data.subject(i).id + "'");
    return eng.beta_candidate(i, state);
}

FitResult fit(const CohortDataset& data, const ModelConfig& config) {
    Engine eng(data, config);
    FitResult out;
    FittedModel& model = out.model;
    FitDiagnostics& diag = out.diagnostics;
    model = initialize_impl(eng);

    for (int d = 0; d < eng.num_diseases; ++d)
        for (int l = 0; l < eng.num_units; ++l)
            if (eng.omega_dl[d][l].empty()) diag.empty_units.emplace_back(d, l);

    const OptimizerSpec& opt = config.optimizer;
    const bool track = opt.track_blocks;
    const int threads = track ? 1 : opt.threads;
    const std::uint64_t seed = opt.seed;

    model.trace.clear();
    model.trace.push_back(eng.objective(model));

    for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
        // Biomarker trajectories (disease agnostic) + noise, block per biomarker.
        detail::parallel_for(eng.num_biomarkers, threads, [&](int k) {
            if (eng.omega_k[k].empty()) return;
            const SigmoidParams cand =
                eng.theta_candidate(k, model, rng::derive(seed, detail::kSeedTheta, sweep, k));
            if (eng.theta_local(k, model, cand) <= eng.theta_local(k, model, model.theta[k]))
                model.theta[k] = cand;
            if (track) diag.block_trace.push_back(eng.objective(model));
            model.epsilon[k] = eng.msr(k, model);
            if (track) diag.block_trace.push_back(eng.objective(model));
        });

        // Dysfunction trajectories (disease specific), block per (disease, unit).
        detail::parallel_for(eng.num_diseases * eng.num_units, threads, [&](int block) {
            const int d = block / eng.num_units;
            const int l = block % eng.num_units;
            if (eng.omega_dl[d][l].empty()) return;
            const SigmoidParams cand = eng.lambda_candidate(
                d, l, model, rng::derive(seed, detail::kSeedLambda, sweep, block));
            if (eng.lambda_local(d, l, model, cand) <= eng.lambda_local(d, l, model, model.lambda[d][l]))
                model.lambda[d][l] = cand;
            if (track) diag.block_trace.push_back(eng.objective(model));
        });

        // Subject time shifts, block per subject.
        detail::parallel_for(eng.num_subjects, threads, [&](int i) {
            if (eng.omega_i[i].empty()) return;
            const double cand = eng.beta_candidate(i, model);
            if (eng.beta_local(i, model, cand) <= eng.beta_local(i, model, model.beta[i]))
                model.beta[i] = cand;
            if (track) diag.block_trace.push_back(eng.objective(model));
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

double stage_subject(const FittedModel& model, const ModelConfig& config, int disease,
                     std::span<const Observation> subset) {
    if (subset.empty()) throw DataError("stage_subject: empty data subset");
    if (disease < 0 || disease >= static_cast<int>(model.lambda.size()))
        throw UsageError("stage_subject: unknown disease index");
    const int num_biomarkers = static_cast<int>(model.theta.size());
    double max_months = 0.0;
    for (const Observation& obs : subset) {
        if (obs.biomarker < 0 || obs.biomarker >= num_biomarkers)
            throw DataError("stage_subject: unknown biomarker index " +
                            std::to_string(obs.biomarker));
        max_months = std::max(max_months, obs.months);
    }

    const Prior& prior = config.priors.beta;
    const auto f = [&](double b) {
        const double nlp = prior.neg_log_density(b);
        if (!std::isfinite(nlp)) return kInf;
        double ssr = 0.0;
        for (const Observation& obs : subset) {
            const int unit = config.unit_allocation[obs.biomarker];
            const double r = obs.value - biomarker_predict(b, obs.months,
                                                           model.lambda[disease][unit],
                                                           model.theta[obs.biomarker]);
            ssr += r * r;
        }
        return ssr + nlp;
    };

    double lo = kInf, hi = -kInf;
    for (const SigmoidParams& lam : model.lambda[disease]) {
        lo = std::min(lo, lam.center - kSupportReach / lam.slope);
        hi = std::max(hi, lam.center + kSupportReach / lam.slope);
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

double predict_missing(const FittedModel& model, const ModelConfig& config, int disease,
                       double beta_years, double months, int k) {
    if (disease < 0 || disease >= static_cast<int>(model.lambda.size()))
        throw UsageError("predict_missing: unknown disease index");
    if (k < 0 || k >= static_cast<int>(model.theta.size()))
        throw UsageError("predict_missing: unknown biomarker index");
    const int unit = config.unit_allocation[k];
    return biomarker_predict(beta_years, months, model.lambda[disease][unit], model.theta[k]);
}

}  // namespace dkt
