#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ordifun/reducers.hpp"
#include "ordifun/simulate.hpp"
#include "ordifun/tuning.hpp"

namespace ordifun {

struct BenchConfig {
    Scenario scenario = Scenario::a;
    std::vector<double> q_values;
    int replicas = 50;                ///< datasets per q
    std::vector<ReducerSpec> methods; ///< penalties fixed per method
    int k_folds = 5;
    int n_units = 500;
    int n_basis = 10;
    int max_level = 8;
    std::uint64_t master_seed = 0;
    int workers = 0;                  ///< 0 = hardware, capped by ORDIFUN_WORKERS
    bool record_timing = true;        ///< false writes 0 for byte-stable outputs
    bool tune_per_replica = false;    ///< re-tune penalties on every dataset
};

struct ReplicaRow {
    std::string scenario;
    double q = 0.0;
    std::string method;
    int replica = 0;
    std::uint64_t seed = 0;
    double mae = 0.0;
    double wall_time_s = 0.0;
    std::uint64_t data_hash = 0;  ///< pairing check: equal across methods in a cell
    bool ok = false;
    std::string error;            ///< reason when !ok
};

struct SummaryRow {
    std::string scenario;
    double q = 0.0;
    std::string method;
    double mean_mae = 0.0;
    double q05_mae = 0.0;
    double q95_mae = 0.0;
    int completed = 0;
    int expected = 0;
    bool flagged = false;  ///< fewer than 90% completed replicas
};

struct BenchmarkTable {
    std::vector<ReplicaRow> rows;       ///< one per (q, replica, method), failed included
    std::vector<SummaryRow> summaries;  ///< one per (q, method)
};

/// Paired Monte Carlo sweep: for every (q, replica) one dataset is generated
/// with seed master_seed + replica and every method is scored on it with
/// kfold_mae. Replicas run on a worker pool; the result is identical for any
/// worker count. Per-method failures become rows with ok = false and never
/// abort the sweep.
BenchmarkTable run_monte_carlo(const BenchConfig& config);

/// Fill the summary rows (mean and 5%/95% quantiles of the completed
/// replicas per cell; cells under 90% completion are flagged).
void summarize(BenchmarkTable& table);

/// Quantile with linear interpolation between order statistics:
/// h = (n-1) p, q = x_(floor(h)) + frac(h) (x_(floor(h)+1) - x_(floor(h))).
double quantile_linear(std::vector<double> values, double p);

/// Replica CSV with columns scenario,q,method,replica,seed,mae,wall_time_s
/// (failed rows are omitted; they go to the failures CSV instead).
void write_replica_csv(const BenchmarkTable& table, const std::string& path);

/// Summary CSV with columns scenario,q,method,mean_mae,q05_mae,q95_mae
/// (flagged cells carry nan values).
void write_summary_csv(const BenchmarkTable& table, const std::string& path);

/// Columns scenario,q,method,replica,seed,reason; empty when nothing failed.
void write_failures_csv(const BenchmarkTable& table, const std::string& path);

/// Parallelism actually used for a requested worker count: the hardware
/// count when requested <= 0, capped by the ORDIFUN_WORKERS env variable.
int resolve_workers(int requested);

}  // namespace ordifun
