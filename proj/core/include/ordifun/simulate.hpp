#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ordifun/basis.hpp"
#include "ordifun/ordinal.hpp"

namespace ordifun {

/// Synthetic-data families. Scenario a hides an ordinal trend on the
/// lowest-variance coefficient; scenario b separates consecutive levels
/// unevenly across two coefficients; b_main is the alternative formulation of
/// scenario b with uniformly drawn per-level increments.
enum class Scenario { a, b, b_main };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

struct ScenarioConfig {
    Scenario scenario = Scenario::a;
    double q = 0.5;        ///< severity in [0, 1]
    int n = 1000;          ///< units
    int n_basis = 10;
    int max_level = 8;     ///< levels run 0..max_level
    Interval domain{0.0, 100.0};
    std::uint64_t seed = 0;
};

/// Everything that was drawn dataset-wide, for auditing a realized dataset.
struct RealizedScenario {
    std::vector<double> mu;          ///< per-spline means
    std::vector<double> sigma;       ///< per-spline sd (scenario a)
    int signal_spline = -1;          ///< scenario a: argmin-sigma spline
    std::array<int, 2> signal_pair{-1, -1};  ///< scenario b: the two shifted splines
    std::vector<double> gamma1;      ///< per-level increments (gamma in a)
    std::vector<double> gamma2;      ///< second increment vector (b only)
    std::vector<double> mu1, mu2;    ///< b_main per-spline increments
};

struct SimulatedData {
    FunctionalDataset data;
    OrdinalLabels labels;
    RealizedScenario realized;
};

/// Generate a dataset. Bit-identical for equal configs on every platform:
/// all draws come from keyed counter streams (one substream per spline, per
/// unit and per increment vector) with inverse-CDF normal sampling.
SimulatedData simulate(const ScenarioConfig& config);

SimulatedData simulate_scenario_a(const ScenarioConfig& config);
SimulatedData simulate_scenario_b(const ScenarioConfig& config);

/// Deterministic content hash of a dataset (coefficient bits and labels).
std::uint64_t dataset_hash(const FunctionalDataset& data, const OrdinalLabels& labels);

}  // namespace ordifun
