#include "ordifun/tuning.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ordifun/errors.hpp"

namespace ordifun {

namespace {

int count_distinct(const Eigen::VectorXd& v) {
    std::set<double> s(v.begin(), v.end());
    return static_cast<int>(s.size());
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// GCV over (penalty matrix, shared lambda grid) for a generic ridge-type fit.
/// Returns the fitted values at the design rows.
Eigen::VectorXd gcv_fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& values,
                        const std::vector<Eigen::MatrixXd>& penalties,
                        const std::vector<Eigen::VectorXd>& lambda_combos) {
    const Eigen::MatrixXd bt_b = design.transpose() * design;
    const Eigen::VectorXd bt_y = design.transpose() * values;
    const auto n_obs = static_cast<double>(design.rows());

    double best_gcv = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_coeffs;
    for (const auto& combo : lambda_combos) {
        Eigen::MatrixXd normal = bt_b;
        for (std::size_t t = 0; t < penalties.size(); ++t) normal += combo[static_cast<Eigen::Index>(t)] * penalties[t];
        Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
        const Eigen::VectorXd coeffs = ldlt.solve(bt_y);
        if (!coeffs.allFinite()) continue;
        if ((normal * coeffs - bt_y).norm() > 1e-8 * (normal.norm() * coeffs.norm() + bt_y.norm() + 1e-300)) {
            continue;
        }
        const double edf = ldlt.solve(bt_b).trace();
        const double denom = n_obs - edf;
        if (denom <= 1e-8) continue;
        const double rss = (values - design * coeffs).squaredNorm();
        const double gcv = n_obs * rss / (denom * denom);
        // combos iterate with penalties ascending, so <= keeps the smoother fit
        if (gcv <= best_gcv) {
            best_gcv = gcv;
            best_coeffs = coeffs;
        }
    }
    if (best_coeffs.size() == 0) {
        throw NumericalError("gcv_failed", "loss smoothing failed at every candidate penalty");
    }
    return design * best_coeffs;
}

}  // namespace

Eigen::VectorXd smooth_loss(const Eigen::VectorXd& coords, const Eigen::VectorXd& losses) {
    if (coords.size() != losses.size()) {
        throw ValidationError("length_mismatch", "coords and losses must have equal length");
    }
    if (count_distinct(coords) < 4) {
        throw ValidationError("grid_too_small", "need at least four distinct grid coordinates");
    }

    // canonical point order so the result has set semantics
    std::vector<int> order(static_cast<std::size_t>(coords.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (coords[a] != coords[b]) return coords[a] < coords[b];
        return losses[a] < losses[b];
    });

    Eigen::VectorXd x(coords.size()), y(coords.size());
    for (Eigen::Index i = 0; i < coords.size(); ++i) {
        x[i] = coords[order[static_cast<std::size_t>(i)]];
        y[i] = losses[order[static_cast<std::size_t>(i)]];
    }

    const int n_basis = std::min(count_distinct(coords), 10);
    const BasisSpec spec(n_basis, Interval{x[0], x[x.size() - 1]});
    const GcvFit fit = smooth_to_basis_gcv(x, y, spec);
    const Eigen::VectorXd fitted = spec.evaluate_many(x) * fit.coefficients;

    Eigen::VectorXd out(coords.size());
    for (Eigen::Index i = 0; i < coords.size(); ++i) {
        out[order[static_cast<std::size_t>(i)]] = fitted[i];
    }
    return out;
}

Eigen::VectorXd smooth_loss(const Eigen::MatrixXd& coords, const Eigen::VectorXd& losses) {
    if (coords.cols() != 2 || coords.rows() != losses.size()) {
        throw ValidationError("length_mismatch", "coords must be G x 2 and match the losses");
    }
    if (count_distinct(coords.col(0)) < 4 || count_distinct(coords.col(1)) < 4) {
        throw ValidationError("grid_too_small", "need at least four distinct values per axis");
    }

    std::vector<int> order(static_cast<std::size_t>(coords.rows()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (coords(a, 0) != coords(b, 0)) return coords(a, 0) < coords(b, 0);
        if (coords(a, 1) != coords(b, 1)) return coords(a, 1) < coords(b, 1);
        return losses[a] < losses[b];
    });

    constexpr int kBasisPerAxis = 5;
    const BasisSpec spec_x(kBasisPerAxis,
                           Interval{coords.col(0).minCoeff(), coords.col(0).maxCoeff()});
    const BasisSpec spec_y(kBasisPerAxis,
                           Interval{coords.col(1).minCoeff(), coords.col(1).maxCoeff()});
    const GramPair gp_x = gram_matrices(spec_x);
    const GramPair gp_y = gram_matrices(spec_y);

    Eigen::MatrixXd design(coords.rows(), kBasisPerAxis * kBasisPerAxis);
    Eigen::VectorXd y(losses.size());
    for (Eigen::Index i = 0; i < coords.rows(); ++i) {
        const int src = order[static_cast<std::size_t>(i)];
        const Eigen::VectorXd bx = spec_x.evaluate(coords(src, 0));
        const Eigen::VectorXd by = spec_y.evaluate(coords(src, 1));
        for (int jx = 0; jx < kBasisPerAxis; ++jx) {
            design.block(i, jx * kBasisPerAxis, 1, kBasisPerAxis) = bx[jx] * by.transpose();
        }
        y[i] = losses[src];
    }

    const std::vector<Eigen::MatrixXd> penalties = {kron(gp_x.curvature, gp_y.gram),
                                                    kron(gp_x.gram, gp_y.curvature)};
    std::vector<Eigen::VectorXd> combos;
    for (double la : default_gcv_grid()) {
        for (double lb : default_gcv_grid()) {
            combos.push_back((Eigen::VectorXd(2) << la, lb).finished());
        }
    }
    const Eigen::VectorXd fitted = gcv_fit(design, y, penalties, combos);

    Eigen::VectorXd out(losses.size());
    for (Eigen::Index i = 0; i < coords.rows(); ++i) {
        out[order[static_cast<std::size_t>(i)]] = fitted[i];
    }
    return out;
}

PenaltyGrid default_penalty_grid(ReducerKind kind) {
    auto log_spaced = [](double lo_exp, double hi_exp, int count) {
        std::vector<double> out(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            out[static_cast<std::size_t>(i)] =
                std::pow(10.0, lo_exp + (hi_exp - lo_exp) * i / static_cast<double>(count - 1));
        }
        return out;
    };
    switch (kind) {
        case ReducerKind::focca:
            return PenaltyGrid{log_spaced(-1, 5, 7), log_spaced(-1, 5, 7)};
        case ReducerKind::fpca:
        case ReducerKind::fofd:
            return PenaltyGrid{log_spaced(0, 9, 10), {}};
        case ReducerKind::heuristic:
            throw ValidationError("bad_method", "the heuristic has no penalty to tune");
    }
    throw ValidationError("bad_method", "unknown reducer kind");
}

TuningResult tune_penalties(const FunctionalDataset& data, const OrdinalLabels& labels,
                            ReducerKind kind, const PenaltyGrid& grid, int k_folds, int m,
                            std::uint64_t seed) {
    if (kind == ReducerKind::heuristic) {
        throw ValidationError("bad_method", "the heuristic has no penalty to tune");
    }
    const bool two_d = (kind == ReducerKind::focca);
    if (two_d != grid.two_dimensional()) {
        throw ValidationError("bad_grid", two_d ? "focca needs a 2-D penalty grid"
                                                : "single-penalty methods need a 1-D grid");
    }
    if (grid.lambda1.empty()) throw ValidationError("bad_grid", "empty penalty grid");
    for (double l : grid.lambda1) {
        if (!(l > 0.0)) throw ValidationError("bad_grid", "grid penalties must be positive");
    }
    for (double l : grid.lambda2) {
        if (!(l > 0.0)) throw ValidationError("bad_grid", "grid penalties must be positive");
    }

    TuningResult result;
    for (double l1 : grid.lambda1) {
        if (two_d) {
            for (double l2 : grid.lambda2) result.grid.push_back({l1, l2});
        } else {
            result.grid.push_back({l1, std::numeric_limits<double>::quiet_NaN()});
        }
    }

    const std::vector<int> folds = make_fold_assignment(data.n_units(), k_folds, seed);
    result.raw_loss.resize(static_cast<Eigen::Index>(result.grid.size()));
    for (std::size_t g = 0; g < result.grid.size(); ++g) {
        ReducerSpec spec;
        spec.kind = kind;
        spec.m = m;
        if (two_d) {
            spec.lambda1 = result.grid[g].lambda1;
            spec.lambda2 = result.grid[g].lambda2;
        } else {
            spec.lambda = result.grid[g].lambda1;
        }
        result.raw_loss[static_cast<Eigen::Index>(g)] = kfold_cv(data, labels, spec, folds).mae_cv;
    }

    std::set<double> d1(grid.lambda1.begin(), grid.lambda1.end());
    std::set<double> d2(grid.lambda2.begin(), grid.lambda2.end());
    const bool smoothable = two_d ? (d1.size() >= 4 && d2.size() >= 4) : d1.size() >= 4;
    if (smoothable) {
        if (two_d) {
            Eigen::MatrixXd coords(static_cast<Eigen::Index>(result.grid.size()), 2);
            for (std::size_t g = 0; g < result.grid.size(); ++g) {
                coords(static_cast<Eigen::Index>(g), 0) = std::log10(result.grid[g].lambda1);
                coords(static_cast<Eigen::Index>(g), 1) = std::log10(result.grid[g].lambda2);
            }
            result.smoothed_loss = smooth_loss(coords, result.raw_loss);
        } else {
            Eigen::VectorXd coords(static_cast<Eigen::Index>(result.grid.size()));
            for (std::size_t g = 0; g < result.grid.size(); ++g) {
                coords[static_cast<Eigen::Index>(g)] = std::log10(result.grid[g].lambda1);
            }
            result.smoothed_loss = smooth_loss(coords, result.raw_loss);
        }
    } else {
        result.smoothed_loss = result.raw_loss;
    }

    result.selected = 0;
    for (std::size_t g = 1; g < result.grid.size(); ++g) {
        const double s = result.smoothed_loss[static_cast<Eigen::Index>(g)];
        const double best = result.smoothed_loss[result.selected];
        const auto& pg = result.grid[g];
        const auto& pb = result.grid[static_cast<std::size_t>(result.selected)];
        const bool larger_penalty =
            pg.lambda1 > pb.lambda1 ||
            (pg.lambda1 == pb.lambda1 && (std::isnan(pg.lambda2) || pg.lambda2 > pb.lambda2));
        if (s < best || (s == best && larger_penalty)) {
            result.selected = static_cast<int>(g);
        }
    }
    return result;
}

}  // namespace ordifun
