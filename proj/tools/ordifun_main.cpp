// Command-line front end: simulate | fit | transform | tune | evaluate | benchmark.
// Every command prints a JSON result summary on stdout and exits 0 on success,
// 2 on validation errors, 3 on numerical failures.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ordifun/bench.hpp"
#include "ordifun/classify.hpp"
#include "ordifun/dataset_io.hpp"
#include "ordifun/errors.hpp"
#include "ordifun/format.hpp"
#include "ordifun/reducers.hpp"
#include "ordifun/simulate.hpp"
#include "ordifun/tuning.hpp"

namespace {

using nlohmann::json;
using namespace ordifun;

std::vector<double> parse_value_list(const std::string& text) {
    // either "lo:hi:step" or a comma-separated list
    std::vector<double> values;
    const auto parse_one = [&](const std::string& tok) {
        double v = 0.0;
        if (!parse_double(tok, v)) {
            throw ValidationError("bad_number", "cannot parse '" + tok + "' as a number");
        }
        return v;
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::string tok;
        std::istringstream stream(text);
        while (std::getline(stream, tok, ':')) parts.push_back(tok);
        if (parts.size() != 3) {
            throw ValidationError("bad_range", "range syntax is lo:hi:step");
        }
        const double lo = parse_one(parts[0]);
        const double hi = parse_one(parts[1]);
        const double step = parse_one(parts[2]);
        if (!(step > 0.0) || hi < lo) {
            throw ValidationError("bad_range", "range needs hi >= lo and step > 0");
        }
        const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
        for (int i = 0; i < count; ++i) {
            // snap accumulated rounding (0.2*3 = 0.6000...01) to clean decimals
            values.push_back(std::round((lo + step * i) * 1e12) / 1e12);
        }
        return values;
    }
    std::string tok;
    std::istringstream stream(text);
    while (std::getline(stream, tok, ',')) {
        if (!tok.empty()) values.push_back(parse_one(tok));
    }
    if (values.empty()) throw ValidationError("bad_range", "empty value list");
    return values;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    std::string tok;
    std::istringstream stream(text);
    while (std::getline(stream, tok, ',')) {
        long long v = 0;
        if (!parse_int(tok, v)) {
            throw ValidationError("bad_number", "cannot parse '" + tok + "' as an integer");
        }
        values.push_back(static_cast<int>(v));
    }
    return values;
}

ReducerSpec method_spec(const std::string& method, double lambda1, double lambda2, double lambda,
                        int m) {
    ReducerSpec spec;
    spec.kind = reducer_kind_from_string(method);
    spec.lambda1 = lambda1;
    spec.lambda2 = lambda2;
    spec.lambda = lambda;
    spec.m = m;
    return spec;
}

void emit(const json& summary) { std::cout << summary.dump(2) << std::endl; }

struct DataFlags {
    std::string dir;
    bool from_curves = false;
    std::string smooth = "";
    int max_level = -1;

    NamedDataset load() const {
        LoadOptions options;
        options.from_curves = from_curves;
        options.max_level = max_level;
        if (smooth == "gcv") {
            options.gcv = true;
        } else if (!smooth.empty()) {
            if (!parse_double(smooth, options.lambda)) {
                throw ValidationError("bad_lambda", "--smooth expects a number or 'gcv'");
            }
        }
        return load_dataset(BundlePaths::in_dir(dir), options);
    }

    void attach(CLI::App* cmd) {
        cmd->add_option("--data", dir, "dataset directory")->required();
        cmd->add_flag("--from-curves", from_curves, "smooth curves.csv instead of coefficients");
        cmd->add_option("--smooth", smooth, "penalty for raw-curve smoothing, or 'gcv'");
        cmd->add_option("--max-level", max_level, "expected top level (validated against labels)");
    }
};

int run(int argc, char** argv) {
    CLI::App app{"dimensionality reduction for predicting ordinal targets from curves"};
    app.require_subcommand(1);

    // ---- simulate ----
    auto* cmd_sim = app.add_subcommand("simulate", "generate a synthetic dataset bundle");
    std::string sim_scenario = "a";
    double sim_q = 0.5;
    int sim_n = 1000, sim_basis = 10, sim_max_level = 8;
    double sim_lo = 0.0, sim_hi = 100.0;
    std::uint64_t sim_seed = 0;
    std::string sim_out;
    cmd_sim->add_option("--scenario", sim_scenario, "a | b | b-main")->required();
    cmd_sim->add_option("--q", sim_q, "severity in [0,1]");
    cmd_sim->add_option("--n", sim_n, "units");
    cmd_sim->add_option("--n-basis", sim_basis, "spline count");
    cmd_sim->add_option("--max-level", sim_max_level, "levels run 0..max-level");
    cmd_sim->add_option("--t-lo", sim_lo, "domain start");
    cmd_sim->add_option("--t-hi", sim_hi, "domain end");
    cmd_sim->add_option("--seed", sim_seed, "generator seed");
    cmd_sim->add_option("--out", sim_out, "output directory")->required();
    cmd_sim->callback([&]() {
        ScenarioConfig config;
        config.scenario = scenario_from_string(sim_scenario);
        config.q = sim_q;
        config.n = sim_n;
        config.n_basis = sim_basis;
        config.max_level = sim_max_level;
        config.domain = Interval{sim_lo, sim_hi};
        config.seed = sim_seed;
        const SimulatedData sim = simulate(config);
        save_dataset(sim_out, sim.data, sim.labels);
        const std::string sidecar = (std::filesystem::path(sim_out) / "config.json").string();
        save_simulation_sidecar(sidecar, config, sim.realized);
        emit(json{{"command", "simulate"},
                  {"scenario", sim_scenario},
                  {"q", sim_q},
                  {"n", sim_n},
                  {"seed", sim_seed},
                  {"data_hash", dataset_hash(sim.data, sim.labels)},
                  {"out", sim_out}});
    });

    // ---- fit ----
    auto* cmd_fit = app.add_subcommand("fit", "fit a reducer and save the model");
    DataFlags fit_data;
    std::string fit_method = "focca", fit_out;
    double fit_l1 = 0.0, fit_l2 = 0.0, fit_l = 0.0;
    int fit_m = 2;
    std::uint64_t fit_seed = 0;
    fit_data.attach(cmd_fit);
    cmd_fit->add_option("--method", fit_method, "focca | fpca | fofd | heuristic")->required();
    cmd_fit->add_option("--lambda1", fit_l1, "focca curvature penalty");
    cmd_fit->add_option("--lambda2", fit_l2, "focca ridge penalty");
    cmd_fit->add_option("--lambda", fit_l, "fpca/fofd penalty");
    cmd_fit->add_option("--m", fit_m, "components");
    cmd_fit->add_option("--seed", fit_seed, "unused, accepted for uniformity");
    cmd_fit->add_option("--out", fit_out, "model JSON path")->required();
    cmd_fit->callback([&]() {
        const NamedDataset dataset = fit_data.load();
        const ReducerSpec spec = method_spec(fit_method, fit_l1, fit_l2, fit_l, fit_m);
        const FittedReducer model = FittedReducer::fit(spec, dataset.data, dataset.labels);
        save_model(fit_out, model);
        json values = json::array();
        if (const FoccaModel* focca = model.focca()) {
            for (const auto& pair : focca->pairs) values.push_back(pair.rho);
        } else {
            for (const auto& component : model.linear()->components) {
                values.push_back(component.value);
            }
        }
        emit(json{{"command", "fit"},
                  {"method", fit_method},
                  {"n", dataset.data.n_units()},
                  {"values", std::move(values)},
                  {"out", fit_out}});
    });

    // ---- transform ----
    auto* cmd_transform = app.add_subcommand("transform", "score a dataset with a saved model");
    DataFlags transform_data;
    std::string transform_model, transform_out;
    std::uint64_t transform_seed = 0;
    transform_data.attach(cmd_transform);
    cmd_transform->add_option("--model", transform_model, "model JSON path")->required();
    cmd_transform->add_option("--seed", transform_seed, "unused, accepted for uniformity");
    cmd_transform->add_option("--out", transform_out, "scores CSV path")->required();
    cmd_transform->callback([&]() {
        const NamedDataset dataset = transform_data.load();
        const FittedReducer model = load_model(transform_model);
        const Eigen::MatrixXd scores = model.transform(dataset.data);
        write_scores_csv(transform_out, dataset.unit_ids, scores);
        emit(json{{"command", "transform"},
                  {"n", scores.rows()},
                  {"m", scores.cols()},
                  {"out", transform_out}});
    });

    // ---- tune ----
    auto* cmd_tune = app.add_subcommand("tune", "grid-search penalties by cross-validated MAE");
    DataFlags tune_data;
    std::string tune_method = "focca", tune_out, tune_csv;
    std::string tune_grid1, tune_grid2, tune_grid;
    int tune_k = 5, tune_m = 2;
    std::uint64_t tune_seed = 0;
    tune_data.attach(cmd_tune);
    cmd_tune->add_option("--method", tune_method, "focca | fpca | fofd")->required();
    cmd_tune->add_option("--k", tune_k, "folds");
    cmd_tune->add_option("--m", tune_m, "components");
    cmd_tune->add_option("--lambda1-grid", tune_grid1, "comma list or lo:hi:step (focca axis 1)");
    cmd_tune->add_option("--lambda2-grid", tune_grid2, "comma list or lo:hi:step (focca axis 2)");
    cmd_tune->add_option("--lambda-grid", tune_grid, "comma list or lo:hi:step (fpca/fofd)");
    cmd_tune->add_option("--seed", tune_seed, "fold-assignment seed");
    cmd_tune->add_option("--out", tune_out, "tuning result JSON path");
    cmd_tune->add_option("--csv", tune_csv, "tuning result CSV path");
    cmd_tune->callback([&]() {
        const NamedDataset dataset = tune_data.load();
        const ReducerKind kind = reducer_kind_from_string(tune_method);
        PenaltyGrid grid = default_penalty_grid(kind);
        if (kind == ReducerKind::focca) {
            if (!tune_grid1.empty()) grid.lambda1 = parse_value_list(tune_grid1);
            if (!tune_grid2.empty()) grid.lambda2 = parse_value_list(tune_grid2);
        } else if (!tune_grid.empty()) {
            grid.lambda1 = parse_value_list(tune_grid);
        }
        const TuningResult result =
            tune_penalties(dataset.data, dataset.labels, kind, grid, tune_k, tune_m, tune_seed);
        if (!tune_out.empty()) {
            std::ofstream out(tune_out);
            if (!out) throw ValidationError("cannot_write", "cannot open '" + tune_out + "'");
            out << tuning_to_json(result) << '\n';
        }
        if (!tune_csv.empty()) write_tuning_csv(result, tune_csv);
        json selected{{"lambda1", result.selected_point().lambda1}};
        if (kind == ReducerKind::focca) selected["lambda2"] = result.selected_point().lambda2;
        emit(json{{"command", "tune"},
                  {"method", tune_method},
                  {"grid_size", result.grid.size()},
                  {"selected", std::move(selected)},
                  {"raw_loss_at_selected", result.raw_loss[result.selected]},
                  {"smoothed_loss_at_selected", result.smoothed_loss[result.selected]},
                  {"out", tune_out}});
    });

    // ---- evaluate ----
    auto* cmd_eval = app.add_subcommand(
        "evaluate", "cross-validated confusion matrix, accuracy and MAE for one method");
    DataFlags eval_data;
    std::string eval_method = "focca", eval_out;
    double eval_l1 = 0.0, eval_l2 = 0.0, eval_l = 0.0;
    int eval_k = 5, eval_m = 2;
    std::uint64_t eval_seed = 0;
    std::vector<std::string> eval_merges;
    bool eval_no_refit = false;
    eval_data.attach(cmd_eval);
    cmd_eval->add_option("--method", eval_method, "focca | fpca | fofd | heuristic")->required();
    cmd_eval->add_option("--lambda1", eval_l1, "focca curvature penalty");
    cmd_eval->add_option("--lambda2", eval_l2, "focca ridge penalty");
    cmd_eval->add_option("--lambda", eval_l, "fpca/fofd penalty");
    cmd_eval->add_option("--k", eval_k, "folds");
    cmd_eval->add_option("--m", eval_m, "components");
    cmd_eval->add_option("--merge", eval_merges, "levels to merge for reporting, e.g. 0,1")
        ->take_all();
    cmd_eval->add_flag("--no-refit", eval_no_refit,
                       "fit the reducer once on all units; refit only centroids per fold");
    cmd_eval->add_option("--seed", eval_seed, "fold-assignment seed");
    cmd_eval->add_option("--out", eval_out, "report JSON path");
    cmd_eval->callback([&]() {
        const NamedDataset dataset = eval_data.load();
        const ReducerSpec spec = method_spec(eval_method, eval_l1, eval_l2, eval_l, eval_m);
        const std::vector<int> folds =
            make_fold_assignment(dataset.data.n_units(), eval_k, eval_seed);
        const CrossValidation cv =
            kfold_cv(dataset.data, dataset.labels, spec, folds, !eval_no_refit);
        std::vector<std::vector<int>> merges;
        for (const auto& text : eval_merges) merges.push_back(parse_int_list(text));
        const EvaluationReport report =
            evaluation_report(dataset.labels.levels, cv.predictions, merges);
        json body = json::parse(report_to_json(report));
        body["mae_cv"] = cv.mae_cv;
        body["mae_cv_per_fold"] = cv.mae_cv / static_cast<double>(eval_k);
        if (!eval_out.empty()) {
            std::ofstream out(eval_out);
            if (!out) throw ValidationError("cannot_write", "cannot open '" + eval_out + "'");
            out << body.dump(2) << '\n';
        }
        body["command"] = "evaluate";
        body["method"] = eval_method;
        body["out"] = eval_out;
        emit(body);
    });

    // ---- benchmark ----
    auto* cmd_bench = app.add_subcommand("benchmark", "paired Monte Carlo method comparison");
    std::string bench_scenario = "a", bench_q = "0:1:0.2", bench_methods = "focca,fpca,fofd";
    std::string bench_out;
    int bench_runs = 50, bench_k = 5, bench_m = 2, bench_n = 500, bench_basis = 10;
    int bench_max_level = 8, bench_workers = 0;
    std::uint64_t bench_seed = 0;
    bool bench_tune = false;
    std::string bench_timing = "on";
    double bench_focca_l1 = 1e2, bench_focca_l2 = 1e3, bench_fpca_l = 1e6, bench_fofd_l = 1e8;
    cmd_bench->add_option("--scenario", bench_scenario, "a | b | b-main")->required();
    cmd_bench->add_option("--q", bench_q, "severities: comma list or lo:hi:step");
    cmd_bench->add_option("--runs", bench_runs, "replicas per severity");
    cmd_bench->add_option("--k", bench_k, "folds");
    cmd_bench->add_option("--m", bench_m, "components");
    cmd_bench->add_option("--n", bench_n, "units per dataset");
    cmd_bench->add_option("--n-basis", bench_basis, "spline count");
    cmd_bench->add_option("--max-level", bench_max_level, "levels run 0..max-level");
    cmd_bench->add_option("--methods", bench_methods, "comma list of reducers");
    cmd_bench->add_option("--focca-lambda1", bench_focca_l1, "fixed focca curvature penalty");
    cmd_bench->add_option("--focca-lambda2", bench_focca_l2, "fixed focca ridge penalty");
    cmd_bench->add_option("--fpca-lambda", bench_fpca_l, "fixed fpca penalty");
    cmd_bench->add_option("--fofd-lambda", bench_fofd_l, "fixed fofd penalty");
    cmd_bench->add_flag("--tune", bench_tune, "re-tune penalties on every replica (slow)");
    cmd_bench->add_option("--timing", bench_timing,
                          "on | off; off writes 0 wall times for byte-stable output");
    cmd_bench->add_option("--workers", bench_workers, "worker threads (0 = hardware)");
    cmd_bench->add_option("--seed", bench_seed, "master seed; replica r uses seed+r");
    cmd_bench->add_option("--out", bench_out, "replica CSV path")->required();
    cmd_bench->callback([&]() {
        BenchConfig config;
        config.scenario = scenario_from_string(bench_scenario);
        config.q_values = parse_value_list(bench_q);
        config.replicas = bench_runs;
        config.k_folds = bench_k;
        config.n_units = bench_n;
        config.n_basis = bench_basis;
        config.max_level = bench_max_level;
        config.master_seed = bench_seed;
        config.workers = bench_workers;
        config.tune_per_replica = bench_tune;
        if (bench_timing == "off") {
            config.record_timing = false;
        } else if (bench_timing != "on") {
            throw ValidationError("bad_flag", "--timing expects on or off");
        }
        std::istringstream stream(bench_methods);
        std::string name;
        while (std::getline(stream, name, ',')) {
            if (name.empty()) continue;
            ReducerSpec spec;
            spec.kind = reducer_kind_from_string(name);
            spec.m = bench_m;
            spec.lambda1 = bench_focca_l1;
            spec.lambda2 = bench_focca_l2;
            spec.lambda = (spec.kind == ReducerKind::fpca) ? bench_fpca_l : bench_fofd_l;
            config.methods.push_back(spec);
        }

        const BenchmarkTable table = run_monte_carlo(config);

        const std::filesystem::path out_path(bench_out);
        std::filesystem::path stem = out_path;
        stem.replace_extension();
        const std::string summary_path = stem.string() + "_summary.csv";
        const std::string failures_path = stem.string() + "_failures.csv";
        write_replica_csv(table, bench_out);
        write_summary_csv(table, summary_path);
        write_failures_csv(table, failures_path);

        int failed = 0;
        for (const auto& row : table.rows) failed += row.ok ? 0 : 1;
        json flagged = json::array();
        json summaries = json::array();
        for (const auto& s : table.summaries) {
            summaries.push_back(json{{"scenario", s.scenario},
                                     {"q", s.q},
                                     {"method", s.method},
                                     {"mean_mae", s.mean_mae},
                                     {"q05_mae", s.q05_mae},
                                     {"q95_mae", s.q95_mae},
                                     {"completed", s.completed}});
            if (s.flagged) {
                flagged.push_back(json{{"scenario", s.scenario}, {"q", s.q}, {"method", s.method}});
            }
        }
        emit(json{{"command", "benchmark"},
                  {"rows", table.rows.size()},
                  {"failed", failed},
                  {"workers", resolve_workers(config.workers)},
                  {"flagged_cells", std::move(flagged)},
                  {"summary", std::move(summaries)},
                  {"out", bench_out},
                  {"summary_out", summary_path},
                  {"failures_out", failures_path}});
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ValidationError& e) {
        emit(json{{"status", "error"}, {"code", e.code()}, {"message", e.what()}});
        return 2;
    } catch (const NumericalError& e) {
        emit(json{{"status", "error"}, {"code", e.code()}, {"message", e.what()}});
        return 3;
    } catch (const std::exception& e) {
        emit(json{{"status", "error"}, {"code", "internal"}, {"message", e.what()}});
        return 3;
    }
}
