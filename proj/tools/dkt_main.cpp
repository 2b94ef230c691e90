// Command-line front end: generate, fit, predict, evaluate, compare,
// export-curves.  Exit codes: 0 success (including flagged non-convergence),
// 2 usage error, 3 data error, 4 numerical failure.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>

#include "dkt/fit.hpp"
#include "dkt/gaussian_process.hpp"
#include "dkt/io.hpp"
#include "dkt/latent_stage.hpp"
#include "dkt/stats.hpp"
#include "dkt/synth.hpp"
#include "dkt/univariate.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<int> max_sweeps;
    std::optional<double> sweep_tol;
    std::optional<int> restarts;
    std::string units;  // "0,1,0,1,..."
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string current;
    for (char c : text) {
        if (c == ',') {
            out.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty() || !out.empty()) out.push_back(current);
    return out;
}

std::vector<int> parse_units(const std::string& text) {
    std::vector<int> units;
    for (const std::string& tok : split_list(text)) {
        try {
            units.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw dkt::UsageError("--units: cannot parse '" + tok + "'");
        }
    }
    return units;
}

// Flags override config-file values.
void apply_overrides(dkt::ModelConfig& config, const CommonOptions& common) {
    if (common.seed) config.optimizer.seed = *common.seed;
    if (common.threads) config.optimizer.threads = *common.threads;
    if (common.max_sweeps) config.optimizer.max_sweeps = *common.max_sweeps;
    if (common.sweep_tol) config.optimizer.sweep_tol = *common.sweep_tol;
    if (common.restarts) config.optimizer.restarts = *common.restarts;
    if (!common.units.empty()) config.unit_allocation = parse_units(common.units);
}

dkt::RunSpec resolve_run_spec(const std::string& config_path, const CommonOptions& common,
                              const dkt::RawTable& table) {
    dkt::RunSpec spec;
    if (!config_path.empty()) spec = dkt::parse_run_spec_file(config_path);
    apply_overrides(spec.model, common);
    if (spec.model.diseases.empty()) {
        for (const dkt::RawRow& row : table.rows)
            if (std::find(spec.model.diseases.begin(), spec.model.diseases.end(), row.disease) ==
                spec.model.diseases.end())
                spec.model.diseases.push_back(row.disease);
    }
    if (spec.model.unit_allocation.empty()) {
        // Without an allocation every biomarker forms its own unit.
        spec.model.unit_allocation.resize(table.biomarker_names.size());
        for (std::size_t k = 0; k < table.biomarker_names.size(); ++k)
            spec.model.unit_allocation[k] = static_cast<int>(k);
    }
    return spec;
}

std::pair<dkt::CohortDataset, dkt::NormalizationParams> preprocess(
    const dkt::RawTable& table, const dkt::RunSpec& spec) {
    dkt::RawTable working = table;
    dkt::NormalizationParams params;
    if (spec.preprocess.residualize) {
        auto [residualized, p] = dkt::residualize(working, spec.preprocess.covariates);
        working = std::move(residualized);
        params = std::move(p);
    }
    if (spec.preprocess.normalize) {
        std::vector<int> directions(table.biomarker_names.size(), 1);
        for (const std::string& name : spec.preprocess.decreasing) {
            const auto it = std::find(table.biomarker_names.begin(), table.biomarker_names.end(),
                                      name);
            if (it == table.biomarker_names.end())
                throw dkt::UsageError("preprocess.decreasing: unknown biomarker '" + name + "'");
            directions[it - table.biomarker_names.begin()] = -1;
        }
        return dkt::normalize(working, directions, std::move(params));
    }
    if (spec.preprocess.residualize) {
        // Residualized but unscaled: identity scale so params still apply.
        for (auto& n : params.per_biomarker) {
            n.min = 0.0;
            n.max = 1.0;
            n.direction = 1;
        }
        return {dkt::dataset_from_raw(working, spec.model.diseases), std::move(params)};
    }
    return {dkt::dataset_from_raw(working, spec.model.diseases), std::move(params)};
}

int cmd_generate(const std::string& spec_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed) {
    dkt::SynthSpec spec =
        spec_path == "default" ? dkt::default_spec() : dkt::parse_synth_spec_file(spec_path);
    if (seed) spec.seed = *seed;
    fs::create_directories(out_dir);
    const auto [data, truth] = dkt::generate(spec);
    const std::string data_path = (fs::path(out_dir) / "dataset.csv").string();
    const std::string truth_path = (fs::path(out_dir) / "ground_truth.csv").string();
    dkt::save_dataset_csv(data_path, data);
    dkt::save_ground_truth_csv(truth_path, data, truth);
    std::cout << "subjects: " << data.num_subjects() << "\n"
              << "measurements: " << data.measurements().size() << "\n"
              << "dataset: " << data_path << "\n"
              << "ground truth: " << truth_path << "\n";
    return 0;
}

int cmd_fit(const std::string& data_path, const std::string& config_path,
            const std::string& out_path, const CommonOptions& common) {
    const dkt::RawTable table = dkt::load_raw_csv(data_path);
    const dkt::RunSpec spec = resolve_run_spec(config_path, common, table);
    auto [dataset, normalization] = preprocess(table, spec);

    const dkt::FitResult result = dkt::fit(dataset, spec.model);

    dkt::SavedModel saved;
    saved.config = spec.model;
    saved.model = result.model;
    saved.normalization = std::move(normalization);
    saved.diagnostics = result.diagnostics;
    saved.biomarkers = dataset.biomarker_names();
    for (int i = 0; i < dataset.num_subjects(); ++i)
        saved.subject_ids.push_back(dataset.subject(i).id);
    dkt::save_model(out_path, saved);

    std::cout << "final objective: " << result.model.trace.back() << "\n"
              << "sweeps: " << result.diagnostics.sweeps << "\n"
              << "converged: " << (result.diagnostics.converged ? "yes" : "no") << "\n"
              << "model: " << out_path << "\n";
    return 0;
}

struct LoadedModel {
    dkt::SavedModel saved;
    std::map<std::string, int> biomarker_index;
    std::map<std::string, int> disease_index;
};

LoadedModel load_model_checked(const std::string& path) {
    LoadedModel lm;
    lm.saved = dkt::load_model(path);
    for (std::size_t k = 0; k < lm.saved.biomarkers.size(); ++k)
        lm.biomarker_index[lm.saved.biomarkers[k]] = static_cast<int>(k);
    for (std::size_t d = 0; d < lm.saved.config.diseases.size(); ++d)
        lm.disease_index[lm.saved.config.diseases[d]] = static_cast<int>(d);
    return lm;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& biomarkers_arg, const std::string& out_path) {
    const LoadedModel lm = load_model_checked(model_path);
    const dkt::RawTable table = dkt::load_raw_csv(data_path);
    if (table.biomarker_names != lm.saved.biomarkers)
        throw dkt::DataError("predict: data biomarker columns do not match the model");

    std::vector<int> requested;
    if (biomarkers_arg.empty()) {
        for (std::size_t k = 0; k < lm.saved.biomarkers.size(); ++k)
            requested.push_back(static_cast<int>(k));
    } else {
        for (const std::string& name : split_list(biomarkers_arg)) {
            const auto it = lm.biomarker_index.find(name);
            if (it == lm.biomarker_index.end())
                throw dkt::UsageError("predict: unknown biomarker '" + name + "'");
            requested.push_back(it->second);
        }
    }

    const dkt::CohortDataset dataset =
        dkt::apply_preprocessing(table, lm.saved.normalization, lm.saved.config.diseases);

    std::vector<dkt::PredictionRow> rows;
    for (int i = 0; i < dataset.num_subjects(); ++i) {
        const dkt::Subject& subj = dataset.subject(i);
        std::vector<dkt::Observation> obs;
        for (int mi : dataset.subject_measurements(i)) {
            const dkt::Measurement& m = dataset.measurement(mi);
            obs.push_back({subj.months[m.visit], m.biomarker, m.value});
        }
        const double beta = dkt::stage_subject(lm.saved.model, lm.saved.config, subj.disease, obs);
        for (std::size_t j = 0; j < subj.months.size(); ++j) {
            for (int k : requested) {
                const double normalized = dkt::predict_missing(
                    lm.saved.model, lm.saved.config, subj.disease, beta, subj.months[j], k);
                rows.push_back({subj.id, dataset.disease_labels()[subj.disease], subj.months[j],
                                lm.saved.biomarkers[k],
                                dkt::denormalize(lm.saved.normalization, k, normalized)});
            }
        }
    }
    dkt::save_predictions_csv(out_path, rows);
    std::cout << "predictions: " << rows.size() << " rows -> " << out_path << "\n";
    return 0;
}

int cmd_evaluate(const std::string& pred_path, const std::string& truth_path, int bootstrap,
                 std::uint64_t seed, const std::string& out_prefix) {
    const std::vector<dkt::PredictionRow> preds = dkt::load_predictions_csv(pred_path);
    if (preds.empty()) throw dkt::DataError("evaluate: prediction file has no rows");
    const dkt::RawTable truth = dkt::load_raw_csv(truth_path);

    std::map<std::string, int> biomarker_index;
    for (std::size_t k = 0; k < truth.biomarker_names.size(); ++k)
        biomarker_index[truth.biomarker_names[k]] = static_cast<int>(k);
    std::map<std::pair<std::string, double>, const dkt::RawRow*> truth_rows;
    for (const dkt::RawRow& row : truth.rows) truth_rows[{row.subject_id, row.months}] = &row;

    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_biomarker;
    for (const dkt::PredictionRow& p : preds) {
        const auto bit = biomarker_index.find(p.biomarker);
        if (bit == biomarker_index.end())
            throw dkt::DataError("evaluate: biomarker '" + p.biomarker +
                                 "' not present in the truth file");
        const auto rit = truth_rows.find({p.subject_id, p.months});
        if (rit == truth_rows.end())
            throw dkt::DataError("evaluate: no truth row for subject '" + p.subject_id + "' at " +
                                 std::to_string(p.months) + " months");
        const auto& cell = rit->second->values[bit->second];
        if (!cell)
            throw dkt::DataError("evaluate: truth cell missing for subject '" + p.subject_id +
                                 "', biomarker '" + p.biomarker + "'");
        by_biomarker[p.biomarker].first.push_back(p.value);
        by_biomarker[p.biomarker].second.push_back(*cell);
    }

    dkt::EvalReport report;
    report.bootstrap_resamples = bootstrap;
    int region = 0;
    for (auto& [name, vectors] : by_biomarker) {
        auto& [pred, meas] = vectors;
        dkt::EvalCell cell;
        cell.model = "predicted";
        cell.region = name;
        cell.n = static_cast<int>(pred.size());
        cell.point_corr = dkt::spearman(pred, meas);
        const dkt::BootstrapResult boot =
            dkt::bootstrap_corr(pred, meas, bootstrap, dkt::rng::derive(seed, 0xE7A1, region));
        cell.boot_mean = boot.mean;
        cell.boot_std = boot.stddev;
        cell.degenerate_skipped = boot.degenerate_skipped;
        report.cells.push_back(std::move(cell));
        ++region;
    }

    std::ofstream csv(out_prefix + ".csv");
    if (!csv) throw dkt::DataError("cannot open '" + out_prefix + ".csv' for writing");
    report.write_csv(csv);
    std::ofstream txt(out_prefix + ".txt");
    report.write_table(txt);
    report.write_table(std::cout);
    return 0;
}

// One trained model's predictions for the transfer task.
struct TransferPredictions {
    std::string name;
    // per biomarker: aligned with the evaluation cells
    std::vector<std::vector<double>> predicted;
};

int cmd_compare(const std::string& train_path, const std::string& test_path,
                const std::string& models_arg, const std::string& target_disease_arg,
                const std::string& config_path, int bootstrap, const CommonOptions& common,
                const std::string& out_prefix) {
    const std::vector<std::string> model_names = split_list(models_arg);
    const std::set<std::string> known = {"dkt", "latent", "gp", "spline", "linear"};
    for (const std::string& m : model_names)
        if (!known.contains(m)) throw dkt::UsageError("compare: unknown model '" + m + "'");
    if (model_names.empty()) throw dkt::UsageError("compare: no models requested");

    const dkt::RawTable train_table = dkt::load_raw_csv(train_path);
    const dkt::RunSpec spec = resolve_run_spec(config_path, common, train_table);
    const dkt::CohortDataset train = dkt::dataset_from_raw(train_table, spec.model.diseases);
    const dkt::RawTable test = dkt::load_raw_csv(test_path);
    if (test.biomarker_names != train.biomarker_names())
        throw dkt::DataError("compare: train and test biomarker columns differ");

    const std::string target_label =
        target_disease_arg.empty() ? spec.model.diseases.back() : target_disease_arg;
    const auto dit =
        std::find(spec.model.diseases.begin(), spec.model.diseases.end(), target_label);
    if (dit == spec.model.diseases.end())
        throw dkt::UsageError("compare: unknown target disease '" + target_label + "'");
    const int target = static_cast<int>(dit - spec.model.diseases.begin());

    const int K = train.num_biomarkers();
    const std::uint64_t seed = spec.model.optimizer.seed;

    // Markers observed for the target disease in training data: the available
    // modality used for staging and as baseline inputs.
    std::vector<int> available;
    {
        std::vector<bool> seen(K, false);
        for (const dkt::Measurement& m : train.measurements())
            if (train.subject(m.subject).disease == target) seen[m.biomarker] = true;
        for (int k = 0; k < K; ++k)
            if (seen[k]) available.push_back(k);
    }
    if (available.empty())
        throw dkt::DataError("compare: target disease has no training measurements");

    // Evaluation cells: every test-table cell of a target-disease subject.
    struct Cell {
        std::string subject_id;
        double months;
        int k;
        double truth;
    };
    std::vector<Cell> cells;
    std::map<std::string, int> train_subject_index;
    for (int i = 0; i < train.num_subjects(); ++i)
        train_subject_index[train.subject(i).id] = i;
    for (const dkt::RawRow& row : test.rows) {
        if (row.disease != target_label) continue;
        if (!train_subject_index.contains(row.subject_id))
            throw dkt::DataError("compare: test subject '" + row.subject_id +
                                 "' not present in training data");
        for (int k = 0; k < K; ++k)
            if (row.values[k]) cells.push_back({row.subject_id, row.months, k, *row.values[k]});
    }
    if (cells.empty()) throw dkt::DataError("compare: no target-disease cells in the test file");

    // Training-side lookup of available-marker values per (subject, months).
    std::map<std::pair<std::string, double>, std::vector<std::optional<double>>> train_cells;
    for (const dkt::Measurement& m : train.measurements()) {
        const dkt::Subject& subj = train.subject(m.subject);
        auto& row = train_cells[{subj.id, subj.months[m.visit]}];
        if (row.empty()) row.resize(K);
        row[m.biomarker] = m.value;
    }
    const auto available_vector = [&](const std::string& id,
                                      double months) -> std::optional<std::vector<double>> {
        const auto it = train_cells.find({id, months});
        if (it == train_cells.end()) return std::nullopt;
        std::vector<double> x;
        for (int k : available) {
            if (!it->second[k]) return std::nullopt;
            x.push_back(*it->second[k]);
        }
        return x;
    };

    std::vector<TransferPredictions> predictions;

    for (const std::string& name : model_names) {
        TransferPredictions tp;
        tp.name = name;
        tp.predicted.assign(K, {});

        if (name == "dkt") {
            const dkt::FitResult result = dkt::fit(train, spec.model);
            for (const Cell& cell : cells) {
                const int i = train_subject_index.at(cell.subject_id);
                tp.predicted[cell.k].push_back(dkt::predict_missing(
                    result.model, spec.model, target, result.model.beta[i], cell.months, cell.k));
            }
        } else if (name == "latent") {
            const dkt::LatentFitResult result = dkt::latent_stage_fit(train, spec.model);
            for (const Cell& cell : cells) {
                const int i = train_subject_index.at(cell.subject_id);
                tp.predicted[cell.k].push_back(
                    dkt::latent_predict(result.model, result.model.beta[i], cell.months, cell.k));
            }
        } else if (name == "gp") {
            // One GP per target biomarker: multivariate inputs are the
            // available markers; training rows come from the source diseases.
            std::vector<std::optional<dkt::GPRegressor>> gps(K);
            for (int k = 0; k < K; ++k) {
                std::vector<std::vector<double>> X;
                std::vector<double> y;
                for (const dkt::Measurement& m : train.measurements()) {
                    if (m.biomarker != k) continue;
                    const dkt::Subject& subj = train.subject(m.subject);
                    if (subj.disease == target) continue;
                    const auto x = available_vector(subj.id, subj.months[m.visit]);
                    if (!x) continue;
                    X.push_back(*x);
                    y.push_back(m.value);
                }
                if (X.size() >= 2) {
                    dkt::GPFitOptions options;
                    options.seed = dkt::rng::derive(seed, 0x69D0, k);
                    gps[k] = dkt::gp_fit(X, y, options);
                }
            }
            for (const Cell& cell : cells) {
                const auto x = available_vector(cell.subject_id, cell.months);
                if (!x || !gps[cell.k])
                    throw dkt::DataError("compare: gp cannot predict subject '" + cell.subject_id +
                                         "' biomarker " + std::to_string(cell.k));
                tp.predicted[cell.k].push_back(dkt::gp_predict(*gps[cell.k], *x).first);
            }
        } else {  // spline | linear
            // Input: the available marker sharing the target biomarker's unit.
            std::vector<int> partner(K, available.front());
            for (int k = 0; k < K; ++k)
                for (int a : available)
                    if (spec.model.unit_allocation[a] == spec.model.unit_allocation[k])
                        partner[k] = a;
            std::vector<std::optional<dkt::UnivariateRegressor>> regs(K);
            for (int k = 0; k < K; ++k) {
                std::vector<double> x, y;
                for (const dkt::Measurement& m : train.measurements()) {
                    if (m.biomarker != k) continue;
                    const dkt::Subject& subj = train.subject(m.subject);
                    if (subj.disease == target) continue;
                    const auto it = train_cells.find({subj.id, subj.months[m.visit]});
                    if (it == train_cells.end() || !it->second[partner[k]]) continue;
                    x.push_back(*it->second[partner[k]]);
                    y.push_back(m.value);
                }
                if (x.size() >= 8)
                    regs[k] = name == "spline" ? dkt::spline_fit(x, y) : dkt::linear_fit(x, y);
            }
            for (const Cell& cell : cells) {
                const auto it = train_cells.find({cell.subject_id, cell.months});
                if (it == train_cells.end() || !it->second[partner[cell.k]] || !regs[cell.k])
                    throw dkt::DataError("compare: " + name + " cannot predict subject '" +
                                         cell.subject_id + "' biomarker " +
                                         std::to_string(cell.k));
                tp.predicted[cell.k].push_back(
                    dkt::predict(*regs[cell.k], *it->second[partner[cell.k]]));
            }
        }
        predictions.push_back(std::move(tp));
    }

    // Truth vectors per biomarker, aligned with each model's predictions.
    std::vector<std::vector<double>> truth_by_k(K);
    for (const Cell& cell : cells) truth_by_k[cell.k].push_back(cell.truth);

    dkt::EvalReport report;
    report.bootstrap_resamples = bootstrap;
    const bool with_significance =
        model_names.size() > 1 &&
        std::find(model_names.begin(), model_names.end(), "dkt") != model_names.end();
    if (with_significance) report.reference_model = "dkt";

    std::map<std::pair<std::string, int>, dkt::BootstrapResult> boot;
    for (const TransferPredictions& tp : predictions) {
        for (int k = 0; k < K; ++k) {
            if (truth_by_k[k].empty()) continue;
            // Same per-region seed across models: paired resample indices.
            boot[{tp.name, k}] = dkt::bootstrap_corr(tp.predicted[k], truth_by_k[k], bootstrap,
                                                     dkt::rng::derive(seed, 0xC04A, k));
        }
    }
    const int comparisons = static_cast<int>(model_names.size()) - 1;
    for (const TransferPredictions& tp : predictions) {
        for (int k = 0; k < K; ++k) {
            if (truth_by_k[k].empty()) continue;
            const dkt::BootstrapResult& b = boot.at({tp.name, k});
            dkt::EvalCell cell;
            cell.model = tp.name;
            cell.region = train.biomarker_names()[k];
            cell.n = static_cast<int>(truth_by_k[k].size());
            cell.point_corr = dkt::spearman(tp.predicted[k], truth_by_k[k]);
            cell.boot_mean = b.mean;
            cell.boot_std = b.stddev;
            cell.degenerate_skipped = b.degenerate_skipped;
            if (with_significance && tp.name != "dkt") {
                const dkt::WelchResult w =
                    dkt::compare_models(boot.at({"dkt", k}).samples, b.samples, comparisons);
                cell.has_significance = true;
                cell.p_bonferroni = w.p_bonferroni;
                cell.significant = w.significant;
            }
            report.cells.push_back(std::move(cell));
        }
    }

    std::ofstream csv(out_prefix + ".csv");
    if (!csv) throw dkt::DataError("cannot open '" + out_prefix + ".csv' for writing");
    report.write_csv(csv);
    std::ofstream txt(out_prefix + ".txt");
    report.write_table(txt);
    report.write_table(std::cout);
    return 0;
}

int cmd_export_curves(const std::string& model_path, int grid_points, const std::string& out_path) {
    const LoadedModel lm = load_model_checked(model_path);
    const dkt::FittedModel& model = lm.saved.model;
    if (model.beta.empty()) throw dkt::DataError("export-curves: model has no subjects");
    double lo = *std::min_element(model.beta.begin(), model.beta.end());
    double hi = *std::max_element(model.beta.begin(), model.beta.end());
    const double pad = 0.2 * (hi - lo);
    lo -= pad;
    hi += pad;
    const std::vector<double> grid = dkt::linspace(lo, hi, grid_points);

    std::ofstream out(out_path);
    if (!out) throw dkt::DataError("cannot open '" + out_path + "' for writing");
    out << "curve,disease,unit,biomarker,stage,value\n";
    out.precision(17);
    const auto& diseases = lm.saved.config.diseases;
    for (std::size_t d = 0; d < model.lambda.size(); ++d) {
        for (std::size_t l = 0; l < model.lambda[d].size(); ++l)
            for (double s : grid)
                out << "dysfunction," << diseases[d] << ',' << l << ",," << s << ','
                    << dkt::sigmoid_eval(s, model.lambda[d][l]) << '\n';
        for (std::size_t k = 0; k < model.theta.size(); ++k) {
            const int unit = lm.saved.config.unit_allocation[k];
            for (double s : grid)
                out << "biomarker," << diseases[d] << ',' << unit << ',' << lm.saved.biomarkers[k]
                    << ',' << s << ','
                    << dkt::sigmoid_eval(dkt::sigmoid_eval(s, model.lambda[d][unit]),
                                         model.theta[k])
                    << '\n';
        }
    }
    std::cout << "curves: " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint-disease biomarker progression modelling"};
    app.require_subcommand(1);

    CommonOptions common;

    // generate
    auto* generate = app.add_subcommand("generate", "Write a synthetic cohort and ground truth");
    std::string gen_spec = "default";
    std::string gen_out;
    std::optional<std::uint64_t> gen_seed;
    generate->add_option("--spec", gen_spec, "Spec JSON file, or 'default'");
    generate->add_option("--out", gen_out, "Output directory")->required();
    generate->add_option("--seed", gen_seed, "RNG seed override");

    // fit
    auto* fit = app.add_subcommand("fit", "Fit the joint-disease model");
    std::string fit_data, fit_config, fit_out;
    fit->add_option("--data", fit_data, "Dataset CSV")->required();
    fit->add_option("--config", fit_config, "Config JSON file");
    fit->add_option("--out", fit_out, "Output model file")->required();

    // predict
    auto* predict = app.add_subcommand("predict", "Stage subjects and predict biomarkers");
    std::string pred_model, pred_data, pred_biomarkers, pred_out;
    predict->add_option("--model", pred_model, "Model file")->required();
    predict->add_option("--data", pred_data, "Dataset CSV with the available modality")->required();
    predict->add_option("--biomarkers", pred_biomarkers, "Comma-separated biomarker names");
    predict->add_option("--out", pred_out, "Output predictions CSV")->required();

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Rank-correlate predictions against truth");
    std::string eval_pred, eval_truth, eval_out;
    int eval_bootstrap = 100;
    std::uint64_t eval_seed = 0;
    evaluate->add_option("--pred", eval_pred, "Predictions CSV")->required();
    evaluate->add_option("--truth", eval_truth, "Truth CSV (dataset or ground-truth schema)")
        ->required();
    evaluate->add_option("--bootstrap", eval_bootstrap, "Bootstrap resamples");
    evaluate->add_option("--seed", eval_seed, "Bootstrap seed");
    evaluate->add_option("--out", eval_out, "Output prefix (.csv/.txt)")->required();

    // compare
    auto* compare = app.add_subcommand("compare", "Train several models and compare transfer");
    std::string cmp_train, cmp_test, cmp_models = "dkt,latent,gp,spline,linear";
    std::string cmp_target, cmp_config, cmp_out;
    int cmp_bootstrap = 100;
    compare->add_option("--data", cmp_train, "Training dataset CSV")->required();
    compare->add_option("--test", cmp_test, "Test CSV with measured target values")->required();
    compare->add_option("--models", cmp_models, "Comma-separated subset of dkt,latent,gp,spline,linear");
    compare->add_option("--target-disease", cmp_target, "Disease whose modality is predicted");
    compare->add_option("--config", cmp_config, "Config JSON file");
    compare->add_option("--bootstrap", cmp_bootstrap, "Bootstrap resamples");
    compare->add_option("--out", cmp_out, "Output prefix (.csv/.txt)")->required();

    // export-curves
    auto* curves = app.add_subcommand("export-curves", "Sample fitted trajectories to CSV");
    std::string cur_model, cur_out;
    int cur_grid = 100;
    curves->add_option("--model", cur_model, "Model file")->required();
    curves->add_option("--grid", cur_grid, "Grid points per curve");
    curves->add_option("--out", cur_out, "Output CSV")->required();

    for (auto* sub : {fit, compare}) {
        sub->add_option("--seed", common.seed, "RNG seed (overrides config)");
        sub->add_option("--threads", common.threads, "Worker thread cap");
        sub->add_option("--max-sweeps", common.max_sweeps, "Sweep cap (overrides config)");
        sub->add_option("--sweep-tol", common.sweep_tol, "Convergence tolerance");
        sub->add_option("--restarts", common.restarts, "Solver restarts per block");
        sub->add_option("--units", common.units, "Unit allocation, e.g. 0,1,0,1,0,1");
    }

    try {
        app.parse(argc, argv);
        if (*generate) return cmd_generate(gen_spec, gen_out, gen_seed);
        if (*fit) return cmd_fit(fit_data, fit_config, fit_out, common);
        if (*predict) return cmd_predict(pred_model, pred_data, pred_biomarkers, pred_out);
        if (*evaluate)
            return cmd_evaluate(eval_pred, eval_truth, eval_bootstrap, eval_seed, eval_out);
        if (*compare)
            return cmd_compare(cmp_train, cmp_test, cmp_models, cmp_target, cmp_config,
                               cmp_bootstrap, common, cmp_out);
        if (*curves) return cmd_export_curves(cur_model, cur_grid, cur_out);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const dkt::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const dkt::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const dkt::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
