#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <vector>

#include "ordifun/classify.hpp"

namespace ordifun {

/// Candidate penalties; lambda2 is empty for single-penalty methods and the
/// evaluated grid is the cartesian product otherwise.
struct PenaltyGrid {
    std::vector<double> lambda1;
    std::vector<double> lambda2;

    bool two_dimensional() const { return !lambda2.empty(); }
};

/// Per-method defaults covering the usual selections: focca 7x7 log decades
/// over [1e-1, 1e5] per axis, fpca/fofd 10 log decades over [1e0, 1e9].
PenaltyGrid default_penalty_grid(ReducerKind kind);

struct TuningResult {
    struct Point {
        double lambda1 = 0.0;
        double lambda2 = std::numeric_limits<double>::quiet_NaN();  ///< NaN for 1-D grids
    };

    std::vector<Point> grid;
    Eigen::VectorXd raw_loss;
    Eigen::VectorXd smoothed_loss;
    int selected = -1;

    const Point& selected_point() const { return grid[static_cast<std::size_t>(selected)]; }
};

/// Cubic-spline smoothing of a loss curve sampled at 1-D grid coordinates
/// (log10 penalties); the smoothing parameter is GCV-selected. Values are
/// independent of the input ordering.
Eigen::VectorXd smooth_loss(const Eigen::VectorXd& coords, const Eigen::VectorXd& losses);

/// Tensor-product cubic-spline smoothing of a loss surface (coords is G x 2,
/// log10 penalties per axis) with a separable curvature penalty; the two
/// smoothing parameters are GCV-selected on a shared log grid.
Eigen::VectorXd smooth_loss(const Eigen::MatrixXd& coords, const Eigen::VectorXd& losses);

/// Cross-validated grid search: every grid point is scored with kfold_mae
/// under one shared fold assignment, the loss curve/surface is smoothed, and
/// the smoothed argmin is selected (ties toward larger penalties). Grids with
/// fewer than four distinct values on an axis skip the smoothing step.
TuningResult tune_penalties(const FunctionalDataset& data, const OrdinalLabels& labels,
                            ReducerKind kind, const PenaltyGrid& grid, int k_folds, int m,
                            std::uint64_t seed);

}  // namespace ordifun
