#include "ordifun/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ordifun/errors.hpp"
#include "ordifun/format.hpp"

namespace ordifun {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               const std::vector<std::string>& expected_header) {
    std::ifstream in(path);
    if (!in) throw ValidationError("missing_file", "cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("bad_header", path + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    if (header != expected_header) {
        std::string expect;
        for (const auto& h : expected_header) expect += (expect.empty() ? "" : ",") + h;
        throw ValidationError("bad_header", path + ": expected header '" + expect + "'");
    }
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(split_csv_line(line));
        if (rows.back().size() != expected_header.size()) {
            throw ValidationError("bad_header", path + ": row with wrong field count");
        }
    }
    return rows;
}

std::vector<std::string> coefficient_header(int n_basis) {
    std::vector<std::string> header{"unit_id"};
    for (int j = 0; j < n_basis; ++j) header.push_back("b" + std::to_string(j));
    return header;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot_write", "cannot open '" + path + "' for writing");
    return out;
}

double parse_double_or_throw(const std::string& text, const std::string& where) {
    double value = 0.0;
    if (!parse_double(text, value)) {
        throw ValidationError("bad_number", where + ": cannot parse '" + text + "' as a number");
    }
    return value;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    return v;
}

json basis_to_json_object(const BasisSpec& spec) {
    return json{{"order", spec.order()},
                {"n_basis", spec.n_basis()},
                {"domain", {spec.domain().lo, spec.domain().hi}}};
}

BasisSpec basis_from_json_object(const json& obj) {
    return BasisSpec(obj.at("n_basis").get<int>(),
                     Interval{obj.at("domain").at(0).get<double>(),
                              obj.at("domain").at(1).get<double>()},
                     obj.at("order").get<int>());
}

}  // namespace

BundlePaths BundlePaths::in_dir(const std::string& dir) {
    const std::filesystem::path base(dir);
    BundlePaths paths;
    paths.coefficients = (base / "coefficients.csv").string();
    paths.labels = (base / "labels.csv").string();
    paths.basis = (base / "basis.json").string();
    if (std::filesystem::exists(base / "curves.csv")) {
        paths.curves = (base / "curves.csv").string();
    }
    return paths;
}

std::string basis_to_json(const BasisSpec& spec) { return basis_to_json_object(spec).dump(2); }

BasisSpec basis_from_json(const std::string& text) {
    return basis_from_json_object(json::parse(text));
}

NamedDataset load_dataset(const BundlePaths& paths, const LoadOptions& options) {
    std::ifstream basis_in(paths.basis);
    if (!basis_in) throw ValidationError("missing_file", "cannot open '" + paths.basis + "'");
    json basis_json;
    try {
        basis_in >> basis_json;
    } catch (const json::exception& e) {
        throw ValidationError("bad_json", paths.basis + ": " + e.what());
    }
    const BasisSpec spec = basis_from_json_object(basis_json);

    // labels drive the unit order
    std::vector<std::string> unit_ids;
    std::vector<int> levels;
    {
        std::set<std::string> seen;
        const auto rows = read_csv(paths.labels, {"unit_id", "level"});
        for (const auto& row : rows) {
            if (!seen.insert(row[0]).second) {
                throw ValidationError("duplicate_unit",
                                      paths.labels + ": duplicate unit '" + row[0] + "'");
            }
            unit_ids.push_back(row[0]);
            long long level = 0;
            if (!parse_int(row[1], level)) {
                throw ValidationError("bad_level",
                                      paths.labels + ": level '" + row[1] + "' is not an integer");
            }
            levels.push_back(static_cast<int>(level));
        }
    }
    if (unit_ids.empty()) throw ValidationError("bad_header", paths.labels + ": no units");

    int max_level = options.max_level;
    if (max_level < 0) {
        max_level = 1;
        for (int c : levels) max_level = std::max(max_level, c);
    }
    for (int c : levels) {
        if (c < 0 || c > max_level) {
            throw ValidationError("label_range", "level " + std::to_string(c) + " outside {0..." +
                                                     std::to_string(max_level) + "}");
        }
    }

    std::map<std::string, Eigen::VectorXd> by_unit;
    if (options.from_curves) {
        if (paths.curves.empty()) {
            throw ValidationError("missing_file", "raw-curve loading requested but no curves file");
        }
        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> samples;
        for (const auto& row : read_csv(paths.curves, {"unit_id", "t", "value"})) {
            auto& entry = samples[row[0]];
            entry.first.push_back(parse_double_or_throw(row[1], paths.curves));
            entry.second.push_back(parse_double_or_throw(row[2], paths.curves));
        }
        for (auto& [unit, entry] : samples) {
            const Eigen::VectorXd times =
                Eigen::Map<const Eigen::VectorXd>(entry.first.data(),
                                                  static_cast<Eigen::Index>(entry.first.size()));
            const Eigen::VectorXd values =
                Eigen::Map<const Eigen::VectorXd>(entry.second.data(),
                                                  static_cast<Eigen::Index>(entry.second.size()));
            by_unit.emplace(unit, options.gcv
                                      ? smooth_to_basis_gcv(times, values, spec).coefficients
                                      : smooth_to_basis(times, values, spec, options.lambda));
        }
    } else {
        {
            std::ifstream head_in(paths.coefficients);
            if (!head_in) {
                throw ValidationError("missing_file", "cannot open '" + paths.coefficients + "'");
            }
            std::string header_line;
            std::getline(head_in, header_line);
            if (!header_line.empty() && header_line.back() == '\r') header_line.pop_back();
            const auto header = split_csv_line(header_line);
            if (!header.empty() && header[0] == "unit_id" &&
                static_cast<int>(header.size()) != spec.n_basis() + 1) {
                throw ValidationError(
                    "column_mismatch",
                    paths.coefficients + ": expected " + std::to_string(spec.n_basis()) +
                        " coefficient columns, found " + std::to_string(header.size() - 1));
            }
        }
        const auto rows = read_csv(paths.coefficients, coefficient_header(spec.n_basis()));
        for (const auto& row : rows) {
            Eigen::VectorXd coeffs(spec.n_basis());
            for (int j = 0; j < spec.n_basis(); ++j) {
                coeffs[j] = parse_double_or_throw(row[static_cast<std::size_t>(j) + 1],
                                                  paths.coefficients);
            }
            if (!by_unit.emplace(row[0], std::move(coeffs)).second) {
                throw ValidationError("duplicate_unit",
                                      paths.coefficients + ": duplicate unit '" + row[0] + "'");
            }
        }
    }

    Eigen::MatrixXd coefficients(static_cast<Eigen::Index>(unit_ids.size()), spec.n_basis());
    for (std::size_t i = 0; i < unit_ids.size(); ++i) {
        auto it = by_unit.find(unit_ids[i]);
        if (it == by_unit.end()) {
            throw ValidationError("missing_unit", "unit '" + unit_ids[i] + "' has no coefficients");
        }
        coefficients.row(static_cast<Eigen::Index>(i)) = it->second.transpose();
        by_unit.erase(it);
    }
    if (!by_unit.empty()) {
        throw ValidationError("extra_unit",
                              "unit '" + by_unit.begin()->first + "' has no label entry");
    }

    return NamedDataset{FunctionalDataset(std::move(coefficients), spec),
                        OrdinalLabels(std::move(levels), max_level), std::move(unit_ids)};
}

void save_dataset(const std::string& dir, const FunctionalDataset& data,
                  const OrdinalLabels& labels, const std::vector<std::string>* unit_ids) {
    if (data.n_units() != labels.n_units()) {
        throw ValidationError("length_mismatch", "dataset and labels disagree on unit count");
    }
    if (unit_ids && static_cast<int>(unit_ids->size()) != data.n_units()) {
        throw ValidationError("length_mismatch", "unit id list has the wrong length");
    }
    std::filesystem::create_directories(dir);
    const BundlePaths paths = [&] {
        BundlePaths p;
        const std::filesystem::path base(dir);
        p.coefficients = (base / "coefficients.csv").string();
        p.labels = (base / "labels.csv").string();
        p.basis = (base / "basis.json").string();
        return p;
    }();

    auto id_of = [&](int i) {
        return unit_ids ? (*unit_ids)[static_cast<std::size_t>(i)] : std::to_string(i);
    };

    {
        auto out = open_out(paths.coefficients);
        out << "unit_id";
        for (int j = 0; j < data.basis.n_basis(); ++j) out << ",b" << j;
        out << '\n';
        for (int i = 0; i < data.n_units(); ++i) {
            out << id_of(i);
            for (int j = 0; j < data.basis.n_basis(); ++j) {
                out << ',' << format_double(data.coefficients(i, j));
            }
            out << '\n';
        }
    }
    {
        auto out = open_out(paths.labels);
        out << "unit_id,level\n";
        for (int i = 0; i < labels.n_units(); ++i) {
            out << id_of(i) << ',' << labels.levels[static_cast<std::size_t>(i)] << '\n';
        }
    }
    open_out(paths.basis) << basis_to_json(data.basis) << '\n';
}

void save_simulation_sidecar(const std::string& path, const ScenarioConfig& config,
                             const RealizedScenario& realized) {
    json obj{{"scenario", to_string(config.scenario)},
             {"q", config.q},
             {"n", config.n},
             {"n_basis", config.n_basis},
             {"max_level", config.max_level},
             {"domain", {config.domain.lo, config.domain.hi}},
             {"seed", config.seed},
             {"mu", realized.mu}};
    if (config.scenario == Scenario::a) {
        obj["sigma"] = realized.sigma;
        obj["signal_spline"] = realized.signal_spline;
        obj["gamma"] = realized.gamma1;
    } else if (config.scenario == Scenario::b) {
        obj["signal_splines"] = {realized.signal_pair[0], realized.signal_pair[1]};
        obj["gamma1"] = realized.gamma1;
        obj["gamma2"] = realized.gamma2;
    } else {
        obj["mu1"] = realized.mu1;
        obj["mu2"] = realized.mu2;
    }
    open_out(path) << obj.dump(2) << '\n';
}

void save_model(const std::string& path, const FittedReducer& model) {
    json obj;
    if (const FoccaModel* focca = model.focca()) {
        obj["kind"] = "focca";
        obj["basis"] = basis_to_json_object(focca->basis);
        obj["m"] = focca->m;
        obj["lambdas"] = {focca->lambda1, focca->lambda2};
        obj["coeff_mean"] = vector_to_json(focca->coeff_mean);
        obj["y_mean"] = vector_to_json(focca->y_mean);
        json components = json::array();
        for (const auto& pair : focca->pairs) {
            components.push_back(json{{"b", vector_to_json(pair.b)},
                                      {"theta", vector_to_json(pair.theta)},
                                      {"value", pair.rho}});
        }
        obj["components"] = std::move(components);
    } else {
        const LinearReducerModel& linear = *model.linear();
        obj["kind"] = to_string(linear.kind);
        obj["basis"] = basis_to_json_object(linear.basis);
        obj["m"] = linear.m;
        obj["lambdas"] = {linear.lambda};
        obj["coeff_mean"] = vector_to_json(linear.coeff_mean);
        json components = json::array();
        for (const auto& component : linear.components) {
            components.push_back(
                json{{"b", vector_to_json(component.b)}, {"value", component.value}});
        }
        obj["components"] = std::move(components);
    }
    open_out(path) << obj.dump(2) << '\n';
}

FittedReducer load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("missing_file", "cannot open '" + path + "'");
    json obj;
    try {
        in >> obj;
    } catch (const json::exception& e) {
        throw ValidationError("bad_json", path + ": " + e.what());
    }
    try {
        const ReducerKind kind = reducer_kind_from_string(obj.at("kind").get<std::string>());
        if (kind == ReducerKind::focca) {
            FoccaModel model{.pairs = {},
                             .coeff_mean = vector_from_json(obj.at("coeff_mean")),
                             .y_mean = vector_from_json(obj.at("y_mean")),
                             .lambda1 = obj.at("lambdas").at(0).get<double>(),
                             .lambda2 = obj.at("lambdas").at(1).get<double>(),
                             .m = obj.at("m").get<int>(),
                             .basis = basis_from_json_object(obj.at("basis"))};
            for (const auto& component : obj.at("components")) {
                model.pairs.push_back({vector_from_json(component.at("b")),
                                       vector_from_json(component.at("theta")),
                                       component.at("value").get<double>()});
            }
            return FittedReducer(std::move(model));
        }
        LinearReducerModel model{.components = {},
                                 .coeff_mean = vector_from_json(obj.at("coeff_mean")),
                                 .lambda = obj.at("lambdas").at(0).get<double>(),
                                 .m = obj.at("m").get<int>(),
                                 .kind = kind,
                                 .basis = basis_from_json_object(obj.at("basis"))};
        for (const auto& component : obj.at("components")) {
            model.components.push_back(
                {vector_from_json(component.at("b")), component.at("value").get<double>()});
        }
        return FittedReducer(std::move(model));
    } catch (const json::exception& e) {
        throw ValidationError("bad_json", path + ": " + e.what());
    }
}

void write_scores_csv(const std::string& path, const std::vector<std::string>& unit_ids,
                      const Eigen::MatrixXd& scores) {
    if (static_cast<Eigen::Index>(unit_ids.size()) != scores.rows()) {
        throw ValidationError("length_mismatch", "unit ids and scores disagree in length");
    }
    auto out = open_out(path);
    out << "unit_id";
    for (Eigen::Index k = 0; k < scores.cols(); ++k) out << ",s" << k;
    out << '\n';
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        out << unit_ids[static_cast<std::size_t>(i)];
        for (Eigen::Index k = 0; k < scores.cols(); ++k) {
            out << ',' << format_double(scores(i, k));
        }
        out << '\n';
    }
}

std::string report_to_json(const EvaluationReport& report) {
    json confusion = json::array();
    for (Eigen::Index r = 0; r < report.confusion.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < report.confusion.cols(); ++c) {
            row.push_back(report.confusion(r, c));
        }
        confusion.push_back(std::move(row));
    }
    json obj{{"mae", report.mae},
             {"accuracy", report.accuracy},
             {"levels", report.levels},
             {"confusion", std::move(confusion)},
             {"sensitivity", vector_to_json(report.sensitivity)},
             {"specificity", vector_to_json(report.specificity)},
             {"merges", report.merges}};
    return obj.dump(2);
}

std::string tuning_to_json(const TuningResult& result) {
    json grid = json::array();
    for (std::size_t g = 0; g < result.grid.size(); ++g) {
        json point{{"lambda1", result.grid[g].lambda1},
                   {"raw_loss", result.raw_loss[static_cast<Eigen::Index>(g)]},
                   {"smoothed_loss", result.smoothed_loss[static_cast<Eigen::Index>(g)]}};
        if (!std::isnan(result.grid[g].lambda2)) point["lambda2"] = result.grid[g].lambda2;
        grid.push_back(std::move(point));
    }
    json selected{{"lambda1", result.selected_point().lambda1}};
    if (!std::isnan(result.selected_point().lambda2)) {
        selected["lambda2"] = result.selected_point().lambda2;
    }
    return json{{"grid", std::move(grid)},
                {"selected_index", result.selected},
                {"selected", std::move(selected)}}
        .dump(2);
}

void write_tuning_csv(const TuningResult& result, const std::string& path) {
    auto out = open_out(path);
    out << "lambda1,lambda2,raw_loss,smoothed_loss\n";
    for (std::size_t g = 0; g < result.grid.size(); ++g) {
        out << format_double(result.grid[g].lambda1) << ',';
        if (!std::isnan(result.grid[g].lambda2)) out << format_double(result.grid[g].lambda2);
        out << ',' << format_double(result.raw_loss[static_cast<Eigen::Index>(g)]) << ','
            << format_double(result.smoothed_loss[static_cast<Eigen::Index>(g)]) << '\n';
    }
}

}  // namespace ordifun
