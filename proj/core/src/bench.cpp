#include "ordifun/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <thread>

#include "ordifun/classify.hpp"
#include "ordifun/errors.hpp"
#include "ordifun/format.hpp"

namespace ordifun {

int resolve_workers(int requested) {
    int workers = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    if (const char* cap_env = std::getenv("ORDIFUN_WORKERS")) {
        const int cap = std::atoi(cap_env);
        if (cap >= 1) workers = std::min(workers, cap);
    }
    return workers;
}

double quantile_linear(std::vector<double> values, double p) {
    if (values.empty()) throw ValidationError("empty_cell", "quantile of an empty set");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - std::floor(h);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

namespace {

ReducerSpec tuned_spec(const ReducerSpec& method, const FunctionalDataset& data,
                       const OrdinalLabels& labels, int k_folds, std::uint64_t seed) {
    ReducerSpec spec = method;
    const TuningResult result = tune_penalties(data, labels, method.kind,
                                               default_penalty_grid(method.kind), k_folds,
                                               method.m, seed);
    if (method.kind == ReducerKind::focca) {
        spec.lambda1 = result.selected_point().lambda1;
        spec.lambda2 = result.selected_point().lambda2;
    } else {
        spec.lambda = result.selected_point().lambda1;
    }
    return spec;
}

}  // namespace

BenchmarkTable run_monte_carlo(const BenchConfig& config) {
    if (config.replicas < 1) throw ValidationError("bad_runs", "need at least one replica");
    if (config.methods.empty()) throw ValidationError("bad_methods", "no methods selected");
    for (std::size_t a = 0; a < config.methods.size(); ++a) {
        for (std::size_t b = a + 1; b < config.methods.size(); ++b) {
            if (config.methods[a].kind == config.methods[b].kind) {
                throw ValidationError("bad_methods", "duplicate method '" +
                                                         to_string(config.methods[a].kind) + "'");
            }
        }
    }
    if (config.q_values.empty()) throw ValidationError("bad_q", "no severity values given");
    for (double q : config.q_values) {
        if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("bad_q", "q must lie in [0, 1]");
    }

    const std::size_t n_methods = config.methods.size();
    const std::size_t n_cells = config.q_values.size() * static_cast<std::size_t>(config.replicas);

    BenchmarkTable table;
    table.rows.resize(n_cells * n_methods);

    // one work item per (q, replica); methods inside stay paired on one dataset
    auto run_cell = [&](std::size_t cell) {
        const std::size_t qi = cell / static_cast<std::size_t>(config.replicas);
        const int replica = static_cast<int>(cell % static_cast<std::size_t>(config.replicas));
        const double q = config.q_values[qi];
        const std::uint64_t seed = config.master_seed + static_cast<std::uint64_t>(replica);

        ScenarioConfig scenario_config;
        scenario_config.scenario = config.scenario;
        scenario_config.q = q;
        scenario_config.n = config.n_units;
        scenario_config.n_basis = config.n_basis;
        scenario_config.max_level = config.max_level;
        scenario_config.seed = seed;

        for (std::size_t mi = 0; mi < n_methods; ++mi) {
            ReplicaRow& row = table.rows[cell * n_methods + mi];
            row.scenario = to_string(config.scenario);
            row.q = q;
            row.method = to_string(config.methods[mi].kind);
            row.replica = replica;
            row.seed = seed;
        }

        std::optional<SimulatedData> sim;
        try {
            sim = simulate(scenario_config);
        } catch (const Error& e) {
            for (std::size_t mi = 0; mi < n_methods; ++mi) {
                table.rows[cell * n_methods + mi].error = e.code();
            }
            return;
        }
        const std::uint64_t hash = dataset_hash(sim->data, sim->labels);

        for (std::size_t mi = 0; mi < n_methods; ++mi) {
            ReplicaRow& row = table.rows[cell * n_methods + mi];
            row.data_hash = hash;
            const auto start = std::chrono::steady_clock::now();
            try {
                ReducerSpec spec = config.methods[mi];
                if (config.tune_per_replica && spec.kind != ReducerKind::heuristic) {
                    spec = tuned_spec(spec, sim->data, sim->labels, config.k_folds, seed);
                }
                row.mae = kfold_mae(sim->data, sim->labels, spec, config.k_folds, seed);
                row.ok = true;
            } catch (const Error& e) {
                row.ok = false;
                row.error = e.code();
            }
            if (config.record_timing) {
                row.wall_time_s =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            }
        }
    };

    const int workers = std::min<int>(resolve_workers(config.workers), static_cast<int>(n_cells));
    if (workers <= 1) {
        for (std::size_t cell = 0; cell < n_cells; ++cell) run_cell(cell);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (std::size_t cell = next.fetch_add(1); cell < n_cells;
                     cell = next.fetch_add(1)) {
                    run_cell(cell);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    summarize(table);
    return table;
}

void summarize(BenchmarkTable& table) {
    table.summaries.clear();
    // rows are laid out cell-major; group by (scenario, q, method) preserving order
    struct Key {
        std::string scenario;
        double q;
        std::string method;
        bool operator==(const Key&) const = default;
    };
    std::vector<Key> keys;
    std::vector<std::vector<double>> maes;
    std::vector<int> expected;
    for (const ReplicaRow& row : table.rows) {
        const Key key{row.scenario, row.q, row.method};
        auto it = std::find(keys.begin(), keys.end(), key);
        std::size_t idx;
        if (it == keys.end()) {
            keys.push_back(key);
            maes.emplace_back();
            expected.push_back(0);
            idx = keys.size() - 1;
        } else {
            idx = static_cast<std::size_t>(it - keys.begin());
        }
        expected[idx] += 1;
        if (row.ok) maes[idx].push_back(row.mae);
    }
    for (std::size_t i = 0; i < keys.size(); ++i) {
        SummaryRow summary;
        summary.scenario = keys[i].scenario;
        summary.q = keys[i].q;
        summary.method = keys[i].method;
        summary.completed = static_cast<int>(maes[i].size());
        summary.expected = expected[i];
        summary.flagged =
            summary.completed * 10 < summary.expected * 9;  // < 90% completed
        if (summary.completed > 0 && !summary.flagged) {
            // canonical accumulation order keeps summaries row-order invariant
            std::sort(maes[i].begin(), maes[i].end());
            double sum = 0.0;
            for (double v : maes[i]) sum += v;
            summary.mean_mae = sum / static_cast<double>(summary.completed);
            summary.q05_mae = quantile_linear(maes[i], 0.05);
            summary.q95_mae = quantile_linear(maes[i], 0.95);
        } else {
            summary.mean_mae = summary.q05_mae = summary.q95_mae =
                std::numeric_limits<double>::quiet_NaN();
        }
        table.summaries.push_back(std::move(summary));
    }
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot_write", "cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

void write_replica_csv(const BenchmarkTable& table, const std::string& path) {
    auto out = open_out(path);
    out << "scenario,q,method,replica,seed,mae,wall_time_s\n";
    for (const ReplicaRow& row : table.rows) {
        if (!row.ok) continue;
        out << row.scenario << ',' << format_double(row.q) << ',' << row.method << ','
            << row.replica << ',' << row.seed << ',' << format_double(row.mae) << ','
            << format_double(row.wall_time_s) << '\n';
    }
}

void write_summary_csv(const BenchmarkTable& table, const std::string& path) {
    auto out = open_out(path);
    out << "scenario,q,method,mean_mae,q05_mae,q95_mae\n";
    for (const SummaryRow& row : table.summaries) {
        out << row.scenario << ',' << format_double(row.q) << ',' << row.method << ','
            << format_double(row.mean_mae) << ',' << format_double(row.q05_mae) << ','
            << format_double(row.q95_mae) << '\n';
    }
}

void write_failures_csv(const BenchmarkTable& table, const std::string& path) {
    auto out = open_out(path);
    out << "scenario,q,method,replica,seed,reason\n";
    for (const ReplicaRow& row : table.rows) {
        if (row.ok) continue;
        out << row.scenario << ',' << format_double(row.q) << ',' << row.method << ','
            << row.replica << ',' << row.seed << ',' << row.error << '\n';
    }
}

}  // namespace ordifun
