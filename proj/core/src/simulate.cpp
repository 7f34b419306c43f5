#include "ordifun/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "ordifun/errors.hpp"
#include "ordifun/rng.hpp"

namespace ordifun {

namespace {

// substream tags; adding new ones never perturbs existing draws
enum StreamTag : std::uint64_t {
    kMu = 1,
    kSigma = 2,
    kCoefficient = 3,
    kLabel = 4,
    kIncrement = 5,
    kSplinePick = 6,
    kMu1 = 7,
    kMu2 = 8,
};

void validate(const ScenarioConfig& config) {
    if (!(config.q >= 0.0 && config.q <= 1.0)) {
        throw ValidationError("bad_q", "severity q must lie in [0, 1]");
    }
    if (config.n < 1) throw ValidationError("bad_n", "need at least one unit");
    if (config.n_basis < 4) throw ValidationError("bad_n_basis", "need at least four splines");
    if (config.max_level < 1) throw ValidationError("bad_max_level", "need at least two levels");
}

Eigen::MatrixXd base_coefficients(const ScenarioConfig& config, const std::vector<double>& mu,
                                  const std::vector<double>& sigma, RngStream root) {
    Eigen::MatrixXd coeffs(config.n, config.n_basis);
    for (int i = 0; i < config.n; ++i) {
        RngStream unit = root.substream(kCoefficient).substream(static_cast<std::uint64_t>(i));
        for (int j = 0; j < config.n_basis; ++j) {
            coeffs(i, j) = unit.substream(static_cast<std::uint64_t>(j))
                               .normal(mu[static_cast<std::size_t>(j)],
                                       sigma[static_cast<std::size_t>(j)]);
        }
    }
    return coeffs;
}

std::vector<int> draw_labels(const ScenarioConfig& config, RngStream root) {
    std::vector<int> levels(static_cast<std::size_t>(config.n));
    RngStream stream = root.substream(kLabel);
    for (int i = 0; i < config.n; ++i) {
        levels[static_cast<std::size_t>(i)] = static_cast<int>(
            stream.substream(static_cast<std::uint64_t>(i))
                .uniform_int(static_cast<std::uint64_t>(config.max_level) + 1));
    }
    return levels;
}

std::vector<double> cumulative(const std::vector<double>& increments) {
    std::vector<double> cum(increments.size());
    double run = 0.0;
    for (std::size_t c = 0; c < increments.size(); ++c) {
        run += increments[c];
        cum[c] = run;
    }
    return cum;
}

}  // namespace

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::a: return "a";
        case Scenario::b: return "b";
        case Scenario::b_main: return "b-main";
    }
    return "unknown";
}

Scenario scenario_from_string(const std::string& name) {
    if (name == "a") return Scenario::a;
    if (name == "b") return Scenario::b;
    if (name == "b-main" || name == "b_main") return Scenario::b_main;
    throw ValidationError("bad_scenario", "unknown scenario '" + name + "'");
}

SimulatedData simulate_scenario_a(const ScenarioConfig& config) {
    validate(config);
    RngStream root(config.seed);

    RealizedScenario realized;
    realized.mu.resize(static_cast<std::size_t>(config.n_basis));
    realized.sigma.resize(static_cast<std::size_t>(config.n_basis));
    for (int j = 0; j < config.n_basis; ++j) {
        realized.mu[static_cast<std::size_t>(j)] =
            root.substream(kMu).substream(static_cast<std::uint64_t>(j)).uniform(-10.0, 10.0);
        realized.sigma[static_cast<std::size_t>(j)] =
            root.substream(kSigma).substream(static_cast<std::uint64_t>(j)).uniform(0.0, 10.0);
    }
    realized.signal_spline = static_cast<int>(
        std::min_element(realized.sigma.begin(), realized.sigma.end()) - realized.sigma.begin());

    Eigen::MatrixXd coeffs = base_coefficients(config, realized.mu, realized.sigma, root);
    std::vector<int> levels = draw_labels(config, root);

    // increments gamma(c) ~ N(10 q, 1) for c = 1..max_level, gamma(0) = 0
    realized.gamma1.assign(static_cast<std::size_t>(config.max_level) + 1, 0.0);
    for (int c = 1; c <= config.max_level; ++c) {
        realized.gamma1[static_cast<std::size_t>(c)] =
            root.substream(kIncrement).substream(static_cast<std::uint64_t>(c)).normal(
                10.0 * config.q, 1.0);
    }
    const std::vector<double> shift = cumulative(realized.gamma1);
    for (int i = 0; i < config.n; ++i) {
        coeffs(i, realized.signal_spline) +=
            shift[static_cast<std::size_t>(levels[static_cast<std::size_t>(i)])];
    }

    return SimulatedData{
        FunctionalDataset(std::move(coeffs), BasisSpec(config.n_basis, config.domain)),
        OrdinalLabels(std::move(levels), config.max_level), std::move(realized)};
}

SimulatedData simulate_scenario_b(const ScenarioConfig& config) {
    validate(config);
    RngStream root(config.seed);

    RealizedScenario realized;
    realized.mu.resize(static_cast<std::size_t>(config.n_basis));
    realized.sigma.assign(static_cast<std::size_t>(config.n_basis), 1.0);
    for (int j = 0; j < config.n_basis; ++j) {
        realized.mu[static_cast<std::size_t>(j)] =
            root.substream(kMu).substream(static_cast<std::uint64_t>(j)).uniform(-10.0, 10.0);
    }

    Eigen::MatrixXd coeffs = base_coefficients(config, realized.mu, realized.sigma, root);
    std::vector<int> levels = draw_labels(config, root);

    RngStream picker = root.substream(kSplinePick);
    const int j1 = static_cast<int>(picker.uniform_int(static_cast<std::uint64_t>(config.n_basis)));
    int j2 = static_cast<int>(picker.uniform_int(static_cast<std::uint64_t>(config.n_basis) - 1));
    if (j2 >= j1) ++j2;
    realized.signal_pair = {j1, j2};

    // fixed step patterns: upper levels move on j1, lower levels (scaled by q)
    // on j2; entries are per-level increments starting at level 0
    realized.gamma1.assign(static_cast<std::size_t>(config.max_level) + 1, 0.0);
    realized.gamma2.assign(static_cast<std::size_t>(config.max_level) + 1, 0.0);
    for (int c = 0; c <= config.max_level; ++c) {
        if (c >= 5) realized.gamma1[static_cast<std::size_t>(c)] = 5.0;
        if (c >= 1 && c <= 4) realized.gamma2[static_cast<std::size_t>(c)] = 5.0 * config.q;
    }
    const std::vector<double> shift1 = cumulative(realized.gamma1);
    const std::vector<double> shift2 = cumulative(realized.gamma2);
    for (int i = 0; i < config.n; ++i) {
        const auto level = static_cast<std::size_t>(levels[static_cast<std::size_t>(i)]);
        coeffs(i, j1) += shift1[level];
        coeffs(i, j2) += shift2[level];
    }

    return SimulatedData{
        FunctionalDataset(std::move(coeffs), BasisSpec(config.n_basis, config.domain)),
        OrdinalLabels(std::move(levels), config.max_level), std::move(realized)};
}

namespace {

/// Alternative formulation of scenario b: every spline gets uniform per-level
/// increments, q scaling the lower-level ones.
SimulatedData simulate_scenario_b_main(const ScenarioConfig& config) {
    validate(config);
    RngStream root(config.seed);

    RealizedScenario realized;
    realized.mu.resize(static_cast<std::size_t>(config.n_basis));
    realized.sigma.assign(static_cast<std::size_t>(config.n_basis), 1.0);
    realized.mu1.resize(static_cast<std::size_t>(config.n_basis));
    realized.mu2.resize(static_cast<std::size_t>(config.n_basis));
    for (int j = 0; j < config.n_basis; ++j) {
        realized.mu[static_cast<std::size_t>(j)] =
            root.substream(kMu).substream(static_cast<std::uint64_t>(j)).uniform(-10.0, 10.0);
        realized.mu1[static_cast<std::size_t>(j)] =
            root.substream(kMu1).substream(static_cast<std::uint64_t>(j)).uniform(-1.0, 1.0);
        realized.mu2[static_cast<std::size_t>(j)] =
            root.substream(kMu2).substream(static_cast<std::uint64_t>(j)).uniform(-1.0, 1.0);
    }

    std::vector<int> levels = draw_labels(config, root);
    Eigen::MatrixXd coeffs(config.n, config.n_basis);
    for (int i = 0; i < config.n; ++i) {
        const int c = levels[static_cast<std::size_t>(i)];
        const double low_steps = std::min(4, c);
        const double high_steps = std::max(0, c - 4);
        RngStream unit = root.substream(kCoefficient).substream(static_cast<std::uint64_t>(i));
        for (int j = 0; j < config.n_basis; ++j) {
            const double mean = realized.mu[static_cast<std::size_t>(j)] +
                                config.q * low_steps * realized.mu1[static_cast<std::size_t>(j)] +
                                high_steps * realized.mu2[static_cast<std::size_t>(j)];
            coeffs(i, j) = unit.substream(static_cast<std::uint64_t>(j)).normal(mean, 1.0);
        }
    }

    return SimulatedData{
        FunctionalDataset(std::move(coeffs), BasisSpec(config.n_basis, config.domain)),
        OrdinalLabels(std::move(levels), config.max_level), std::move(realized)};
}

}  // namespace

SimulatedData simulate(const ScenarioConfig& config) {
    switch (config.scenario) {
        case Scenario::a: return simulate_scenario_a(config);
        case Scenario::b: return simulate_scenario_b(config);
        case Scenario::b_main: return simulate_scenario_b_main(config);
    }
    throw ValidationError("bad_scenario", "unknown scenario");
}

std::uint64_t dataset_hash(const FunctionalDataset& data, const OrdinalLabels& labels) {
    std::uint64_t h = mix64(0x64617461);  // "data"
    for (Eigen::Index i = 0; i < data.coefficients.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.coefficients.cols(); ++j) {
            h = mix64(h ^ std::bit_cast<std::uint64_t>(data.coefficients(i, j)));
        }
    }
    for (int level : labels.levels) {
        h = mix64(h ^ static_cast<std::uint64_t>(level));
    }
    return h;
}

}  // namespace ordifun
