#include "dkt/io.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace dkt {

namespace {

using nlohmann::json;

constexpr const char* kFixedColumns[8] = {"subject_id",  "disease", "diagnosis",
                                          "months_since_baseline", "age", "gender",
                                          "tiv",         "source"};
const std::vector<std::string> kCovariateNames = {"age", "gender", "tiv", "source"};

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

double parse_double_cell(const std::string& cell, const std::string& path, int line,
                         const std::string& column) {
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v))
        throw DataError(path + ":" + std::to_string(line) + ": cannot parse '" + cell +
                        "' as a finite number in column '" + column + "'");
    return v;
}

std::optional<double> parse_optional_cell(const std::string& cell, const std::string& path,
                                          int line, const std::string& column) {
    if (cell.empty()) return std::nullopt;
    return parse_double_cell(cell, path, line, column);
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    return out;
}

std::optional<double> covariate_value(const RawRow& row, const std::string& name) {
    if (name == "age") return row.age;
    if (name == "gender") return row.gender;
    if (name == "tiv") return row.tiv;
    if (name == "source") return row.source;
    throw UsageError("unknown covariate '" + name + "'");
}

}  // namespace

RawTable load_raw_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw SchemaError(path + ": empty file");
    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 9)
        throw SchemaError(path + ": header must list the 8 fixed columns and at least one "
                          "biomarker");
    for (int c = 0; c < 8; ++c) {
        if (header[c] != kFixedColumns[c])
            throw SchemaError(path + ": expected column '" + std::string(kFixedColumns[c]) +
                              "' at position " + std::to_string(c + 1) + ", found '" + header[c] +
                              "'");
    }

    RawTable table;
    std::size_t first_biomarker = 8;
    if (header[8] == "true_beta") {
        table.has_true_beta = true;
        first_biomarker = 9;
        if (header.size() == 9) throw SchemaError(path + ": no biomarker columns after true_beta");
    }
    std::set<std::string> seen_names;
    for (std::size_t c = first_biomarker; c < header.size(); ++c) {
        if (header[c].empty()) throw SchemaError(path + ": empty biomarker column name");
        if (!seen_names.insert(header[c]).second)
            throw SchemaError(path + ": duplicate biomarker column '" + header[c] + "'");
        table.biomarker_names.push_back(header[c]);
    }

    std::set<std::pair<std::string, double>> visit_keys;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, found " +
                            std::to_string(fields.size()));
        RawRow row;
        row.subject_id = fields[0];
        if (row.subject_id.empty())
            throw DataError(path + ":" + std::to_string(line_no) + ": empty subject_id");
        row.disease = fields[1];
        row.diagnosis = fields[2];
        row.months = parse_double_cell(fields[3], path, line_no, "months_since_baseline");
        row.age = parse_optional_cell(fields[4], path, line_no, "age");
        row.gender = parse_optional_cell(fields[5], path, line_no, "gender");
        row.tiv = parse_optional_cell(fields[6], path, line_no, "tiv");
        row.source = parse_optional_cell(fields[7], path, line_no, "source");
        if (table.has_true_beta)
            row.true_beta = parse_optional_cell(fields[8], path, line_no, "true_beta");
        for (std::size_t c = first_biomarker; c < fields.size(); ++c)
            row.values.push_back(parse_optional_cell(fields[c], path, line_no,
                                                     header[c]));
        if (!visit_keys.insert({row.subject_id, row.months}).second)
            throw DataError(path + ":" + std::to_string(line_no) + ": duplicate (subject_id, "
                            "months_since_baseline) pair for subject '" + row.subject_id + "'");
        table.rows.push_back(std::move(row));
    }
    return table;
}

namespace {

void write_header(std::ofstream& out, const std::vector<std::string>& biomarkers,
                  bool with_true_beta) {
    for (int c = 0; c < 8; ++c) out << (c ? "," : "") << kFixedColumns[c];
    if (with_true_beta) out << ",true_beta";
    for (const std::string& name : biomarkers) out << ',' << name;
    out << '\n';
}

}  // namespace

void save_dataset_csv(const std::string& path, const CohortDataset& data) {
    std::ofstream out = open_for_write(path);
    write_header(out, data.biomarker_names(), false);

    // Dense lookup (subject, visit) -> per-biomarker optional values.
    const int K = data.num_biomarkers();
    for (int i = 0; i < data.num_subjects(); ++i) {
        const Subject& subj = data.subject(i);
        std::vector<std::vector<std::optional<double>>> cells(
            subj.months.size(), std::vector<std::optional<double>>(K));
        for (int mi : data.subject_measurements(i)) {
            const Measurement& m = data.measurement(mi);
            cells[m.visit][m.biomarker] = m.value;
        }
        for (std::size_t j = 0; j < subj.months.size(); ++j) {
            out << subj.id << ',' << data.disease_labels()[subj.disease] << ',' << subj.diagnosis
                << ',' << format_double(subj.months[j]) << ",,,,";
            for (int k = 0; k < K; ++k) {
                out << ',';
                if (cells[j][k]) out << format_double(*cells[j][k]);
            }
            out << '\n';
        }
    }
}

void save_ground_truth_csv(const std::string& path, const CohortDataset& data,
                           const GroundTruth& truth) {
    std::ofstream out = open_for_write(path);
    write_header(out, data.biomarker_names(), true);
    for (int i = 0; i < data.num_subjects(); ++i) {
        const Subject& subj = data.subject(i);
        for (std::size_t j = 0; j < subj.months.size(); ++j) {
            out << subj.id << ',' << data.disease_labels()[subj.disease] << ',' << subj.diagnosis
                << ',' << format_double(subj.months[j]) << ",,,,," << format_double(truth.beta[i]);
            for (double clean : truth.values[i][j]) out << ',' << format_double(clean);
            out << '\n';
        }
    }
}

namespace {

CohortDataset build_dataset(const RawTable& table, std::vector<std::string> diseases,
                            const std::function<double(int, double)>& transform) {
    if (table.rows.empty()) throw DataError("dataset table has no rows");
    if (diseases.empty()) {
        for (const RawRow& row : table.rows)
            if (std::find(diseases.begin(), diseases.end(), row.disease) == diseases.end())
                diseases.push_back(row.disease);
    }
    CohortDataset data(table.biomarker_names, diseases);

    std::map<std::string, int> subject_index;
    for (const RawRow& row : table.rows) {
        const auto dit = std::find(diseases.begin(), diseases.end(), row.disease);
        if (dit == diseases.end())
            throw DataError("row for subject '" + row.subject_id + "' names disease '" +
                            row.disease + "' not in the configured disease list");
        const int disease = static_cast<int>(dit - diseases.begin());

        int i;
        const auto it = subject_index.find(row.subject_id);
        if (it == subject_index.end()) {
            i = data.add_subject(row.subject_id, disease, row.diagnosis);
            subject_index.emplace(row.subject_id, i);
        } else {
            i = it->second;
            if (data.subject(i).disease != disease)
                throw DataError("subject '" + row.subject_id + "' appears with two diseases");
        }
        const int visit = data.add_visit(i, row.months);
        for (std::size_t k = 0; k < row.values.size(); ++k)
            if (row.values[k])
                data.add_measurement(i, visit, static_cast<int>(k),
                                     transform(static_cast<int>(k), *row.values[k]));
    }
    return data;
}

}  // namespace

CohortDataset dataset_from_raw(const RawTable& table) {
    return build_dataset(table, {}, [](int, double v) { return v; });
}

CohortDataset dataset_from_raw(const RawTable& table, const std::vector<std::string>& diseases) {
    return build_dataset(table, diseases, [](int, double v) { return v; });
}

std::pair<RawTable, NormalizationParams> residualize(const RawTable& table,
                                                     const std::vector<std::string>& covariates) {
    if (covariates.empty()) throw UsageError("residualize: no covariates requested");
    for (const std::string& name : covariates)
        if (std::find(kCovariateNames.begin(), kCovariateNames.end(), name) ==
            kCovariateNames.end())
            throw UsageError("residualize: unknown covariate '" + name + "'");

    const int K = static_cast<int>(table.biomarker_names.size());
    const int C = static_cast<int>(covariates.size());
    NormalizationParams params;
    params.covariates = covariates;
    params.per_biomarker.resize(K);

    RawTable out = table;
    for (int k = 0; k < K; ++k) {
        std::vector<const RawRow*> controls;
        for (const RawRow& row : table.rows) {
            if (row.diagnosis != "control" || !row.values[k]) continue;
            bool complete = true;
            for (const std::string& name : covariates)
                if (!covariate_value(row, name)) complete = false;
            if (complete) controls.push_back(&row);
        }
        if (static_cast<int>(controls.size()) < 10)
            throw InsufficientDataError("residualize: biomarker '" + table.biomarker_names[k] +
                                        "' has " + std::to_string(controls.size()) +
                                        " complete control rows; need at least 10");

        Eigen::MatrixXd X(controls.size(), C + 1);
        Eigen::VectorXd y(controls.size());
        for (std::size_t r = 0; r < controls.size(); ++r) {
            X(r, 0) = 1.0;
            for (int c = 0; c < C; ++c) X(r, c + 1) = *covariate_value(*controls[r], covariates[c]);
            y[r] = *controls[r]->values[k];
        }
        const auto qr = X.colPivHouseholderQr();
        if (qr.rank() < C + 1)
            throw DataError("residualize: rank-deficient covariate matrix for biomarker '" +
                            table.biomarker_names[k] + "'");
        const Eigen::VectorXd coef = qr.solve(y);

        BiomarkerNormalization& norm = params.per_biomarker[k];
        norm.residual_coeffs.assign(coef.data(), coef.data() + C + 1);
        norm.control_mean = y.mean();

        for (RawRow& row : out.rows) {
            if (!row.values[k]) continue;
            double fitted = coef[0];
            for (int c = 0; c < C; ++c) {
                const auto v = covariate_value(row, covariates[c]);
                if (!v)
                    throw DataError("residualize: subject '" + row.subject_id + "' at " +
                                    format_double(row.months) + " months is missing covariate '" +
                                    covariates[c] + "'");
                fitted += coef[c + 1] * *v;
            }
            row.values[k] = *row.values[k] - fitted + norm.control_mean;
        }
    }
    return {std::move(out), std::move(params)};
}

std::pair<CohortDataset, NormalizationParams> normalize(const RawTable& table,
                                                        const std::vector<int>& directions,
                                                        NormalizationParams params) {
    const int K = static_cast<int>(table.biomarker_names.size());
    if (!directions.empty() && static_cast<int>(directions.size()) != K)
        throw UsageError("normalize: directions must cover every biomarker");
    if (params.per_biomarker.empty()) params.per_biomarker.resize(K);

    for (int k = 0; k < K; ++k) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        int count = 0;
        for (const RawRow& row : table.rows) {
            if (!row.values[k]) continue;
            lo = std::min(lo, *row.values[k]);
            hi = std::max(hi, *row.values[k]);
            ++count;
        }
        if (count == 0)
            throw DataError("normalize: biomarker '" + table.biomarker_names[k] + "' has no values");
        if (!(hi > lo))
            throw DataError("normalize: biomarker '" + table.biomarker_names[k] + "' is constant");
        BiomarkerNormalization& norm = params.per_biomarker[k];
        norm.min = lo;
        norm.max = hi;
        norm.direction = directions.empty() ? 1 : directions[k];
    }

    CohortDataset data = build_dataset(table, {}, [&](int k, double v) {
        const BiomarkerNormalization& norm = params.per_biomarker[k];
        const double scaled = (v - norm.min) / (norm.max - norm.min);
        return norm.direction >= 0 ? scaled : 1.0 - scaled;
    });
    return {std::move(data), std::move(params)};
}

CohortDataset apply_preprocessing(const RawTable& table, const NormalizationParams& params,
                                  const std::vector<std::string>& diseases) {
    if (params.identity()) return build_dataset(table, diseases, [](int, double v) { return v; });
    if (params.per_biomarker.size() != table.biomarker_names.size())
        throw DataError("apply_preprocessing: normalization parameters do not match the table");

    // Residualization (when fitted) happens per row, so we cannot reuse the
    // per-value transform alone.
    RawTable adjusted = table;
    const int C = static_cast<int>(params.covariates.size());
    for (RawRow& row : adjusted.rows) {
        for (std::size_t k = 0; k < row.values.size(); ++k) {
            if (!row.values[k]) continue;
            const BiomarkerNormalization& norm = params.per_biomarker[k];
            if (norm.residual_coeffs.empty()) continue;
            double fitted = norm.residual_coeffs[0];
            for (int c = 0; c < C; ++c) {
                const auto v = covariate_value(row, params.covariates[c]);
                if (!v)
                    throw DataError("apply_preprocessing: subject '" + row.subject_id +
                                    "' is missing covariate '" + params.covariates[c] + "'");
                fitted += norm.residual_coeffs[c + 1] * *v;
            }
            row.values[k] = *row.values[k] - fitted + norm.control_mean;
        }
    }
    return build_dataset(adjusted, diseases, [&](int k, double v) {
        const BiomarkerNormalization& norm = params.per_biomarker[k];
        const double scaled = (v - norm.min) / (norm.max - norm.min);
        return norm.direction >= 0 ? scaled : 1.0 - scaled;
    });
}

double denormalize(const NormalizationParams& params, int k, double normalized) {
    if (params.identity()) return normalized;
    const BiomarkerNormalization& norm = params.per_biomarker.at(k);
    const double u = norm.direction >= 0 ? normalized : 1.0 - normalized;
    return norm.min + (norm.max - norm.min) * u;
}

// ---------------------------------------------------------------------------
// JSON (de)serialization
// ---------------------------------------------------------------------------

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& item : obj.items())
        if (!allowed.contains(item.key()))
            throw UsageError("unknown key '" + item.key() + "' in " + where);
}

json prior_to_json(const Prior& p) {
    json j;
    j["kind"] = p.kind == PriorKind::Gaussian ? "gaussian" : "flat";
    j["positive"] = p.positive;
    if (p.kind == PriorKind::Gaussian) {
        j["mean"] = p.mean;
        j["stddev"] = p.stddev;
    }
    return j;
}

Prior prior_from_json(const json& j, const std::string& where) {
    check_keys(j, {"kind", "positive", "mean", "stddev"}, where);
    const std::string kind = j.at("kind").get<std::string>();
    const bool positive = j.value("positive", false);
    if (kind == "flat") return Prior::flat(positive);
    if (kind == "gaussian")
        return Prior::gaussian(j.at("mean").get<double>(), j.at("stddev").get<double>(), positive);
    throw UsageError("unknown prior kind '" + kind + "' in " + where);
}

json sigmoid_to_json(const SigmoidParams& p) {
    return json::array({p.amplitude, p.slope, p.center, p.offset});
}

SigmoidParams sigmoid_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4)
        throw DataError("sigmoid parameters must be a 4-element array");
    return SigmoidParams(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                         j[3].get<double>());
}

json config_to_json(const ModelConfig& config) {
    json j;
    j["unit_allocation"] = config.unit_allocation;
    j["diseases"] = config.diseases;
    j["fixed_lambda_shape"] = config.fixed_lambda_shape;
    json priors;
    priors["theta"] = json::array();
    priors["lambda"] = json::array();
    for (const Prior& p : config.priors.theta) priors["theta"].push_back(prior_to_json(p));
    for (const Prior& p : config.priors.lambda) priors["lambda"].push_back(prior_to_json(p));
    priors["beta"] = prior_to_json(config.priors.beta);
    j["priors"] = priors;
    json opt;
    opt["sweep_tol"] = config.optimizer.sweep_tol;
    opt["max_sweeps"] = config.optimizer.max_sweeps;
    opt["restarts"] = config.optimizer.restarts;
    opt["max_iterations"] = config.optimizer.max_iterations;
    opt["stage_seeds"] = config.optimizer.stage_seeds;
    opt["threads"] = config.optimizer.threads;
    opt["seed"] = config.optimizer.seed;
    opt["track_blocks"] = config.optimizer.track_blocks;
    j["optimizer"] = opt;
    return j;
}

ModelConfig config_from_json(const json& j, const std::string& where) {
    check_keys(j, {"unit_allocation", "diseases", "fixed_lambda_shape", "priors", "optimizer"},
               where);
    ModelConfig config;
    if (j.contains("unit_allocation"))
        config.unit_allocation = j["unit_allocation"].get<std::vector<int>>();
    if (j.contains("diseases")) config.diseases = j["diseases"].get<std::vector<std::string>>();
    config.fixed_lambda_shape = j.value("fixed_lambda_shape", true);
    if (j.contains("priors")) {
        const json& p = j["priors"];
        check_keys(p, {"theta", "lambda", "beta"}, where + ".priors");
        if (p.contains("theta")) {
            if (p["theta"].size() != 4) throw UsageError(where + ": priors.theta needs 4 entries");
            for (int c = 0; c < 4; ++c)
                config.priors.theta[c] = prior_from_json(p["theta"][c], where + ".priors.theta");
        }
        if (p.contains("lambda")) {
            if (p["lambda"].size() != 4)
                throw UsageError(where + ": priors.lambda needs 4 entries");
            for (int c = 0; c < 4; ++c)
                config.priors.lambda[c] = prior_from_json(p["lambda"][c], where + ".priors.lambda");
        }
        if (p.contains("beta")) config.priors.beta = prior_from_json(p["beta"], where + ".priors.beta");
    }
    if (j.contains("optimizer")) {
        const json& o = j["optimizer"];
        check_keys(o,
                   {"sweep_tol", "max_sweeps", "restarts", "max_iterations", "stage_seeds",
                    "threads", "seed", "track_blocks"},
                   where + ".optimizer");
        OptimizerSpec& opt = config.optimizer;
        opt.sweep_tol = o.value("sweep_tol", opt.sweep_tol);
        opt.max_sweeps = o.value("max_sweeps", opt.max_sweeps);
        opt.restarts = o.value("restarts", opt.restarts);
        opt.max_iterations = o.value("max_iterations", opt.max_iterations);
        opt.stage_seeds = o.value("stage_seeds", opt.stage_seeds);
        opt.threads = o.value("threads", opt.threads);
        opt.seed = o.value("seed", opt.seed);
        opt.track_blocks = o.value("track_blocks", opt.track_blocks);
    }
    return config;
}

json normalization_to_json(const SavedModel& saved) {
    json j;
    j["biomarkers"] = saved.biomarkers;
    j["subjects"] = saved.subject_ids;
    j["covariates"] = saved.normalization.covariates;
    json per = json::array();
    for (const BiomarkerNormalization& n : saved.normalization.per_biomarker) {
        json e;
        e["min"] = n.min;
        e["max"] = n.max;
        e["direction"] = n.direction;
        e["control_mean"] = n.control_mean;
        e["residual_coeffs"] = n.residual_coeffs;
        per.push_back(e);
    }
    j["per_biomarker"] = per;
    return j;
}

}  // namespace

void save_model(const std::string& path, const SavedModel& saved) {
    json j;
    j["schema_version"] = 1;
    j["config"] = config_to_json(saved.config);
    j["theta"] = json::array();
    for (const SigmoidParams& t : saved.model.theta) j["theta"].push_back(sigmoid_to_json(t));
    j["lambda"] = json::array();
    for (const auto& per_disease : saved.model.lambda) {
        json row = json::array();
        for (const SigmoidParams& l : per_disease) row.push_back(sigmoid_to_json(l));
        j["lambda"].push_back(row);
    }
    j["beta"] = saved.model.beta;
    j["epsilon"] = saved.model.epsilon;
    j["normalization"] = normalization_to_json(saved);
    json diag;
    diag["sweeps"] = saved.diagnostics.sweeps;
    diag["converged"] = saved.diagnostics.converged;
    diag["objective_trace"] = saved.diagnostics.objective_trace;
    diag["empty_units"] = json::array();
    for (const auto& [d, l] : saved.diagnostics.empty_units)
        diag["empty_units"].push_back(json::array({d, l}));
    j["diagnostics"] = diag;

    std::ofstream out = open_for_write(path);
    out << j.dump(1, '\t') << '\n';
}

SavedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("corrupt model file '" + path + "': " + e.what());
    }
    try {
        const int version = j.at("schema_version").get<int>();
        if (version != 1)
            throw DataError("model file '" + path + "' has unsupported schema_version " +
                            std::to_string(version));
        SavedModel saved;
        saved.config = config_from_json(j.at("config"), "model config");
        for (const json& t : j.at("theta")) saved.model.theta.push_back(sigmoid_from_json(t));
        for (const json& row : j.at("lambda")) {
            saved.model.lambda.emplace_back();
            for (const json& l : row) saved.model.lambda.back().push_back(sigmoid_from_json(l));
        }
        saved.model.beta = j.at("beta").get<std::vector<double>>();
        saved.model.epsilon = j.at("epsilon").get<std::vector<double>>();
        const json& norm = j.at("normalization");
        saved.biomarkers = norm.at("biomarkers").get<std::vector<std::string>>();
        saved.subject_ids = norm.at("subjects").get<std::vector<std::string>>();
        saved.normalization.covariates = norm.at("covariates").get<std::vector<std::string>>();
        for (const json& e : norm.at("per_biomarker")) {
            BiomarkerNormalization n;
            n.min = e.at("min").get<double>();
            n.max = e.at("max").get<double>();
            n.direction = e.at("direction").get<int>();
            n.control_mean = e.at("control_mean").get<double>();
            n.residual_coeffs = e.at("residual_coeffs").get<std::vector<double>>();
            saved.normalization.per_biomarker.push_back(std::move(n));
        }
        const json& diag = j.at("diagnostics");
        saved.diagnostics.sweeps = diag.at("sweeps").get<int>();
        saved.diagnostics.converged = diag.at("converged").get<bool>();
        saved.diagnostics.objective_trace = diag.at("objective_trace").get<std::vector<double>>();
        for (const json& e : diag.at("empty_units"))
            saved.diagnostics.empty_units.emplace_back(e[0].get<int>(), e[1].get<int>());
        saved.model.trace = saved.diagnostics.objective_trace;

        if (saved.model.theta.size() != saved.biomarkers.size() ||
            saved.model.epsilon.size() != saved.biomarkers.size() ||
            saved.model.beta.size() != saved.subject_ids.size())
            throw DataError("model file '" + path + "' has inconsistent parameter sizes");
        return saved;
    } catch (const json::exception& e) {
        throw DataError("corrupt model file '" + path + "': " + e.what());
    }
}

void save_predictions_csv(const std::string& path, const std::vector<PredictionRow>& rows) {
    std::ofstream out = open_for_write(path);
    out << "subject_id,disease,months_since_baseline,biomarker,predicted\n";
    for (const PredictionRow& r : rows)
        out << r.subject_id << ',' << r.disease << ',' << format_double(r.months) << ','
            << r.biomarker << ',' << format_double(r.value) << '\n';
}

std::vector<PredictionRow> load_predictions_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(path + ": empty file");
    if (split_csv_line(line) !=
        std::vector<std::string>{"subject_id", "disease", "months_since_baseline", "biomarker",
                                 "predicted"})
        throw SchemaError(path + ": not a predictions file");
    std::vector<PredictionRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != 5)
            throw DataError(path + ":" + std::to_string(line_no) + ": expected 5 fields");
        PredictionRow r;
        r.subject_id = fields[0];
        r.disease = fields[1];
        r.months = parse_double_cell(fields[2], path, line_no, "months_since_baseline");
        r.biomarker = fields[3];
        r.value = parse_double_cell(fields[4], path, line_no, "predicted");
        rows.push_back(std::move(r));
    }
    return rows;
}

RunSpec parse_run_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw UsageError("malformed config file '" + path + "': " + e.what());
    }
    check_keys(j, {"unit_allocation", "diseases", "fixed_lambda_shape", "priors", "optimizer",
                   "preprocess"},
               "config file");
    RunSpec spec;
    json model_part = j;
    model_part.erase("preprocess");
    spec.model = config_from_json(model_part, "config file");
    if (j.contains("preprocess")) {
        const json& p = j["preprocess"];
        check_keys(p, {"residualize", "covariates", "normalize", "decreasing"},
                   "config file .preprocess");
        spec.preprocess.residualize = p.value("residualize", false);
        if (p.contains("covariates"))
            spec.preprocess.covariates = p["covariates"].get<std::vector<std::string>>();
        spec.preprocess.normalize = p.value("normalize", false);
        if (p.contains("decreasing"))
            spec.preprocess.decreasing = p["decreasing"].get<std::vector<std::string>>();
    }
    return spec;
}

SynthSpec parse_synth_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open spec file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw UsageError("malformed spec file '" + path + "': " + e.what());
    }
    check_keys(j,
               {"diseases", "subject_counts", "beta_low", "beta_high", "visits_per_subject",
                "visit_spacing_months", "noise_std", "theta", "lambda", "unit_allocation",
                "withheld", "biomarker_names", "diagnosis_sharpness", "seed"},
               "spec file");
    SynthSpec spec = default_spec();
    try {
        if (j.contains("diseases")) spec.diseases = j["diseases"].get<std::vector<std::string>>();
        if (j.contains("subject_counts"))
            spec.subject_counts = j["subject_counts"].get<std::vector<int>>();
        if (j.contains("beta_low")) spec.beta_low = j["beta_low"].get<double>();
        if (j.contains("beta_high")) spec.beta_high = j["beta_high"].get<double>();
        if (j.contains("visits_per_subject"))
            spec.visits_per_subject = j["visits_per_subject"].get<int>();
        if (j.contains("visit_spacing_months"))
            spec.visit_spacing_months = j["visit_spacing_months"].get<double>();
        if (j.contains("noise_std")) {
            if (j["noise_std"].is_number())
                spec.noise_std.assign(spec.theta.size(), j["noise_std"].get<double>());
            else
                spec.noise_std = j["noise_std"].get<std::vector<double>>();
        }
        if (j.contains("theta")) {
            spec.theta.clear();
            for (const json& t : j["theta"]) spec.theta.push_back(sigmoid_from_json(t));
        }
        if (j.contains("lambda")) {
            spec.lambda.clear();
            for (const json& row : j["lambda"]) {
                spec.lambda.emplace_back();
                for (const json& l : row) spec.lambda.back().push_back(sigmoid_from_json(l));
            }
        }
        if (j.contains("unit_allocation"))
            spec.unit_allocation = j["unit_allocation"].get<std::vector<int>>();
        if (j.contains("withheld"))
            spec.withheld = j["withheld"].get<std::vector<std::vector<int>>>();
        if (j.contains("biomarker_names"))
            spec.biomarker_names = j["biomarker_names"].get<std::vector<std::string>>();
        if (j.contains("diagnosis_sharpness"))
            spec.diagnosis_sharpness = j["diagnosis_sharpness"].get<double>();
        if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw UsageError("malformed spec file '" + path + "': " + e.what());
    }
    if (j.contains("noise_std") && j["noise_std"].is_number() && j.contains("theta"))
        spec.noise_std.assign(spec.theta.size(), j["noise_std"].get<double>());
    spec.validate();
    return spec;
}

}  // namespace dkt
