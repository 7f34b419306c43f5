#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <functional>

#include "ordifun/dataset_io.hpp"
#include "ordifun/errors.hpp"
#include "ordifun/format.hpp"
#include "ordifun/rng.hpp"
#include "ordifun/simulate.hpp"

using namespace ordifun;

namespace {

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string str() const { return path.string(); }
};

SimulatedData small_sim(std::uint64_t seed = 5) {
    ScenarioConfig config;
    config.scenario = Scenario::a;
    config.q = 0.7;
    config.n = 40;
    config.seed = seed;
    return simulate(config);
}

void rewrite_labels(const std::string& dir, const std::string& body) {
    std::ofstream out(std::filesystem::path(dir) / "labels.csv");
    out << "unit_id,level\n" << body;
}

std::string error_code(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

}  // namespace

TEST_CASE("save and load round-trip a simulated bundle bit for bit") {
    const TempDir dir("ordifun_io_roundtrip");
    const SimulatedData sim = small_sim();
    save_dataset(dir.str(), sim.data, sim.labels);
    const NamedDataset loaded = load_dataset(BundlePaths::in_dir(dir.str()));

    CHECK(dataset_hash(loaded.data, loaded.labels) == dataset_hash(sim.data, sim.labels));
    CHECK(loaded.data.basis == sim.data.basis);
    CHECK(loaded.unit_ids[0] == "0");

    // a second save of the loaded copy produces identical files
    const TempDir dir2("ordifun_io_roundtrip2");
    save_dataset(dir2.str(), loaded.data, loaded.labels, &loaded.unit_ids);
    for (const char* name : {"coefficients.csv", "labels.csv", "basis.json"}) {
        std::ifstream a(std::filesystem::path(dir.str()) / name);
        std::ifstream b(std::filesystem::path(dir2.str()) / name);
        const std::string text_a((std::istreambuf_iterator<char>(a)), {});
        const std::string text_b((std::istreambuf_iterator<char>(b)), {});
        CHECK(text_a == text_b);
    }
}

TEST_CASE("unit order follows the labels file") {
    const TempDir dir("ordifun_io_order");
    const SimulatedData sim = small_sim();
    save_dataset(dir.str(), sim.data, sim.labels);

    // reverse the label rows; coefficients stay in file order
    std::string body;
    for (int i = sim.labels.n_units() - 1; i >= 0; --i) {
        body += std::to_string(i) + "," +
                std::to_string(sim.labels.levels[static_cast<std::size_t>(i)]) + "\n";
    }
    rewrite_labels(dir.str(), body);
    const NamedDataset loaded = load_dataset(BundlePaths::in_dir(dir.str()));
    CHECK(loaded.unit_ids.front() == std::to_string(sim.labels.n_units() - 1));
    CHECK(loaded.data.coefficients.row(0) ==
          sim.data.coefficients.row(sim.labels.n_units() - 1));
}

TEST_CASE("raw-curve ingestion recovers exact expansions") {
    const TempDir dir("ordifun_io_curves");
    const BasisSpec spec(8, Interval{0.0, 1.0});
    RngStream rng(88);
    Eigen::MatrixXd truth(3, 8);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 8; ++j) truth(i, j) = rng.uniform(-2.0, 2.0);
    }

    std::filesystem::create_directories(dir.path);
    {
        std::ofstream curves(dir.path / "curves.csv");
        curves << "unit_id,t,value\n";
        for (int i = 0; i < 3; ++i) {
            for (int l = 0; l < 30; ++l) {
                const double t = l / 29.0;
                const double value = spec.evaluate(t, 0).dot(truth.row(i));
                curves << "u" << i << ',' << format_double(t) << ',' << format_double(value)
                       << '\n';
            }
        }
        std::ofstream labels(dir.path / "labels.csv");
        labels << "unit_id,level\nu0,0\nu1,1\nu2,2\n";
        std::ofstream basis(dir.path / "basis.json");
        basis << basis_to_json(spec);
    }

    LoadOptions options;
    options.from_curves = true;
    options.lambda = 0.0;
    const NamedDataset loaded = load_dataset(BundlePaths::in_dir(dir.str()), options);
    CHECK((loaded.data.coefficients - truth).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("validation failures carry distinct codes") {
    const TempDir dir("ordifun_io_errors");
    const SimulatedData sim = small_sim();
    save_dataset(dir.str(), sim.data, sim.labels);
    const BundlePaths paths = BundlePaths::in_dir(dir.str());

    LoadOptions strict;
    strict.max_level = 8;
    rewrite_labels(dir.str(), "0,9\n");
    CHECK(error_code([&] { load_dataset(paths, strict); }) == "label_range");

    rewrite_labels(dir.str(), "0,2.5\n");
    CHECK(error_code([&] { load_dataset(paths); }) == "bad_level");

    rewrite_labels(dir.str(), "missing_unit_id,3\n");
    CHECK(error_code([&] { load_dataset(paths); }) == "missing_unit");

    rewrite_labels(dir.str(), "0,3\n");
    CHECK(error_code([&] { load_dataset(paths); }) == "extra_unit");

    // coefficient width disagreeing with the basis sidecar
    std::string body = "unit_id";
    for (int j = 0; j < 7; ++j) body += ",b" + std::to_string(j);
    body += "\n0";
    for (int j = 0; j < 7; ++j) body += ",0.0";
    body += "\n";
    {
        std::ofstream out(dir.path / "coefficients.csv");
        out << body;
    }
    CHECK(error_code([&] { load_dataset(paths); }) == "column_mismatch");

    CHECK(error_code([&] { load_dataset(BundlePaths::in_dir("/nonexistent")); }) ==
          "missing_file");
}

TEST_CASE("basis JSON round trip") {
    const BasisSpec spec(13, Interval{-2.5, 7.25});
    const BasisSpec loaded = basis_from_json(basis_to_json(spec));
    CHECK(loaded == spec);
    CHECK(loaded.knots() == spec.knots());
}

TEST_CASE("model JSON round trip preserves transforms exactly") {
    const TempDir dir("ordifun_io_models");
    const SimulatedData sim = small_sim(17);

    ReducerSpec focca;
    focca.kind = ReducerKind::focca;
    focca.lambda1 = 1e2;
    focca.lambda2 = 1e3;
    focca.m = 2;
    ReducerSpec fofd;
    fofd.kind = ReducerKind::fofd;
    fofd.lambda = 1e4;
    fofd.m = 2;
    ReducerSpec heuristic;
    heuristic.kind = ReducerKind::heuristic;

    for (const ReducerSpec& spec : {focca, fofd, heuristic}) {
        const FittedReducer model = FittedReducer::fit(spec, sim.data, sim.labels);
        const std::string path =
            (dir.path / (to_string(spec.kind) + ".json")).string();
        save_model(path, model);
        const FittedReducer loaded = load_model(path);
        CHECK(loaded.kind() == spec.kind);
        CHECK((loaded.transform(sim.data) - model.transform(sim.data)).cwiseAbs().maxCoeff() ==
              0.0);
    }

    CHECK(error_code([&] { load_model((dir.path / "nope.json").string()); }) == "missing_file");
}

TEST_CASE("scores CSV carries one row per unit") {
    const TempDir dir("ordifun_io_scores");
    const std::string path = (dir.path / "scores.csv").string();
    Eigen::MatrixXd scores(2, 2);
    scores << 0.125, -3.5, 1e-17, 42.0;
    write_scores_csv(path, {"a", "b"}, scores);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "unit_id,s0,s1");
    std::getline(in, line);
    CHECK(line == "a,0.125,-3.5");
    std::getline(in, line);
    CHECK(line == "b,1e-17,42");
}

TEST_CASE("simulation sidecar is valid JSON with the realized draw") {
    const TempDir dir("ordifun_io_sidecar");
    ScenarioConfig config;
    config.scenario = Scenario::b;
    config.q = 0.25;
    config.n = 30;
    config.seed = 12;
    const SimulatedData sim = simulate(config);
    const std::string path = (dir.path / "config.json").string();
    save_simulation_sidecar(path, config, sim.realized);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string text((std::istreambuf_iterator<char>(in)), {});
    CHECK(text.find("\"scenario\": \"b\"") != std::string::npos);
    CHECK(text.find("signal_splines") != std::string::npos);
}
