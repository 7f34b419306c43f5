#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ordifun/bench.hpp"
#include "ordifun/errors.hpp"

using namespace ordifun;

namespace {

BenchConfig small_config() {
    BenchConfig config;
    config.scenario = Scenario::a;
    config.q_values = {0.2};
    config.replicas = 3;
    config.n_units = 60;
    config.k_folds = 4;
    config.master_seed = 99;
    ReducerSpec focca;
    focca.kind = ReducerKind::focca;
    focca.lambda1 = 1e2;
    focca.lambda2 = 1e3;
    ReducerSpec fpca;
    fpca.kind = ReducerKind::fpca;
    fpca.lambda = 1e6;
    config.methods = {focca, fpca};
    config.record_timing = false;
    return config;
}

}  // namespace

TEST_CASE("quantiles interpolate between order statistics") {
    std::vector<double> values;
    for (int i = 1; i <= 100; ++i) values.push_back(i);
    CHECK(quantile_linear(values, 0.05) == doctest::Approx(5.95).epsilon(1e-12));
    CHECK(quantile_linear(values, 0.95) == doctest::Approx(95.05).epsilon(1e-12));
    CHECK(quantile_linear({3.0}, 0.05) == 3.0);
    CHECK(quantile_linear({3.0}, 0.95) == 3.0);
}

TEST_CASE("single replica: summary equals the row") {
    BenchConfig config = small_config();
    config.replicas = 1;
    config.methods.resize(1);
    const BenchmarkTable table = run_monte_carlo(config);
    REQUIRE(table.rows.size() == 1);
    REQUIRE(table.summaries.size() == 1);
    CHECK(table.rows[0].ok);
    CHECK(table.summaries[0].mean_mae == table.rows[0].mae);
    CHECK(table.summaries[0].q05_mae == table.rows[0].mae);
    CHECK(table.summaries[0].q95_mae == table.rows[0].mae);
}

TEST_CASE("methods are paired on identical datasets") {
    const BenchmarkTable table = run_monte_carlo(small_config());
    REQUIRE(table.rows.size() == 6);
    for (std::size_t cell = 0; cell < 3; ++cell) {
        CHECK(table.rows[2 * cell].data_hash == table.rows[2 * cell + 1].data_hash);
        CHECK(table.rows[2 * cell].seed == 99 + cell);
    }
    // different replicas see different datasets
    CHECK(table.rows[0].data_hash != table.rows[2].data_hash);
}

TEST_CASE("rows are identical for any worker count") {
    BenchConfig config = small_config();
    config.replicas = 6;
    config.workers = 1;
    const BenchmarkTable serial = run_monte_carlo(config);
    config.workers = 4;
    const BenchmarkTable parallel = run_monte_carlo(config);
    REQUIRE(serial.rows.size() == parallel.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        CHECK(serial.rows[i].mae == parallel.rows[i].mae);
        CHECK(serial.rows[i].method == parallel.rows[i].method);
        CHECK(serial.rows[i].replica == parallel.rows[i].replica);
        CHECK(serial.rows[i].data_hash == parallel.rows[i].data_hash);
    }
}

TEST_CASE("summaries are invariant to row order") {
    BenchConfig config = small_config();
    config.replicas = 5;
    BenchmarkTable table = run_monte_carlo(config);
    const std::vector<SummaryRow> base = table.summaries;

    std::reverse(table.rows.begin(), table.rows.end());
    summarize(table);
    REQUIRE(table.summaries.size() == base.size());
    for (const auto& summary : table.summaries) {
        bool found = false;
        for (const auto& reference : base) {
            if (reference.method == summary.method && reference.q == summary.q) {
                CHECK(summary.mean_mae == reference.mean_mae);
                CHECK(summary.q05_mae == reference.q05_mae);
                CHECK(summary.q95_mae == reference.q95_mae);
                found = true;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("per-method failures become error rows and flag the summary") {
    BenchConfig config = small_config();
    ReducerSpec bad;
    bad.kind = ReducerKind::fofd;
    bad.lambda = 1.0;
    bad.m = 11;  // exceeds n_basis
    config.methods.push_back(bad);

    const BenchmarkTable table = run_monte_carlo(config);
    int failed = 0;
    for (const auto& row : table.rows) {
        if (!row.ok) {
            ++failed;
            CHECK(row.error == "bad_m");
            CHECK(row.method == "fofd");
        }
    }
    CHECK(failed == 3);

    bool flagged_seen = false;
    for (const auto& summary : table.summaries) {
        if (summary.completed == 0) {
            CHECK(summary.flagged);
            CHECK(std::isnan(summary.mean_mae));
            flagged_seen = true;
        } else {
            CHECK_FALSE(summary.flagged);
        }
    }
    CHECK(flagged_seen);
}

TEST_CASE("CSV outputs carry the pinned columns") {
    const BenchmarkTable table = run_monte_carlo(small_config());
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "ordifun_bench_test";
    std::filesystem::create_directories(dir);
    const std::string replica_path = (dir / "bench.csv").string();
    const std::string summary_path = (dir / "bench_summary.csv").string();
    const std::string failures_path = (dir / "bench_failures.csv").string();
    write_replica_csv(table, replica_path);
    write_summary_csv(table, summary_path);
    write_failures_csv(table, failures_path);

    std::ifstream replica(replica_path);
    std::string line;
    std::getline(replica, line);
    CHECK(line == "scenario,q,method,replica,seed,mae,wall_time_s");
    int rows = 0;
    while (std::getline(replica, line)) ++rows;
    CHECK(rows == 6);

    std::ifstream summary(summary_path);
    std::getline(summary, line);
    CHECK(line == "scenario,q,method,mean_mae,q05_mae,q95_mae");

    std::ifstream failures(failures_path);
    std::getline(failures, line);
    CHECK(line == "scenario,q,method,replica,seed,reason");
    CHECK_FALSE(std::getline(failures, line));  // nothing failed

    std::filesystem::remove_all(dir);
}

TEST_CASE("configuration validation") {
    BenchConfig config = small_config();
    config.replicas = 0;
    CHECK_THROWS_AS(run_monte_carlo(config), ValidationError);
    config = small_config();
    config.q_values = {1.5};
    CHECK_THROWS_AS(run_monte_carlo(config), ValidationError);
    config = small_config();
    config.methods.clear();
    CHECK_THROWS_AS(run_monte_carlo(config), ValidationError);
}

TEST_CASE("duplicate method kinds are rejected") {
    BenchConfig config = small_config();
    config.methods.push_back(config.methods[0]);
    CHECK_THROWS_AS(run_monte_carlo(config), ValidationError);
}

TEST_CASE("mean error trends down as severity rises (Spearman over the q grid)") {
    BenchConfig config;
    config.scenario = Scenario::a;
    config.q_values = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    config.replicas = 15;
    config.n_units = 250;
    config.k_folds = 5;
    config.master_seed = 777;
    config.record_timing = false;
    ReducerSpec focca;
    focca.kind = ReducerKind::focca;
    focca.lambda1 = 1e2;
    focca.lambda2 = 1e3;
    ReducerSpec fpca;
    fpca.kind = ReducerKind::fpca;
    fpca.lambda = 1e6;
    ReducerSpec fofd;
    fofd.kind = ReducerKind::fofd;
    fofd.lambda = 1e8;
    config.methods = {focca, fpca, fofd};

    const BenchmarkTable table = run_monte_carlo(config);
    for (const std::string method : {"focca", "fpca", "fofd"}) {
        std::vector<double> means;
        for (double q : config.q_values) {
            for (const auto& summary : table.summaries) {
                if (summary.method == method && summary.q == q) means.push_back(summary.mean_mae);
            }
        }
        REQUIRE(means.size() == 6);
        // Spearman rank correlation of (q, mean) must be negative
        std::vector<double> sorted = means;
        std::sort(sorted.begin(), sorted.end());
        double spearman_num = 0.0;
        for (std::size_t i = 0; i < means.size(); ++i) {
            const auto rank = static_cast<double>(
                std::lower_bound(sorted.begin(), sorted.end(), means[i]) - sorted.begin());
            const double q_rank = static_cast<double>(i);  // q values are ascending
            spearman_num += (q_rank - 2.5) * (rank - 2.5);
        }
        CHECK(spearman_num < 0.0);
    }
}
