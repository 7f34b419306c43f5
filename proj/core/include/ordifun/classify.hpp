#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "ordifun/ordinal.hpp"
#include "ordifun/reducers.hpp"

namespace ordifun {

/// Per-level mean scores of the training data; only levels with at least one
/// training unit are present.
struct CentroidClassifier {
    std::vector<int> levels;    ///< sorted, one entry per row of centroids
    Eigen::MatrixXd centroids;  ///< n_levels x m
};

CentroidClassifier fit_centroids(const Eigen::MatrixXd& scores, const OrdinalLabels& labels);

/// Nearest centroid in Euclidean distance; ties break toward the lower level.
std::vector<int> predict(const CentroidClassifier& classifier, const Eigen::MatrixXd& scores);

/// Fold index per unit: units are shuffled with the seed and cut into K
/// near-equal contiguous blocks.
std::vector<int> make_fold_assignment(int n, int k_folds, std::uint64_t seed);

struct CrossValidation {
    double mae_cv = 0.0;            ///< sum over folds of the fold-mean absolute error
    std::vector<double> fold_mae;   ///< per-fold means
    std::vector<int> predictions;   ///< out-of-fold predicted level per unit
    std::vector<int> fold_of;       ///< fold assignment used
};

/// Sum over folds of fold-mean |c - c_hat| for a given assignment.
double mae_from_folds(const std::vector<int>& truth, const std::vector<int>& predictions,
                      const std::vector<int>& fold_of);

/// K-fold cross validation of a reducer + nearest-centroid pipeline. Both the
/// reducer and the centroids are refit on each fold's complement; set
/// refit_reducer = false to fit the reducer once on all units and refit only
/// the centroids per fold.
CrossValidation kfold_cv(const FunctionalDataset& data, const OrdinalLabels& labels,
                         const ReducerSpec& method, const std::vector<int>& fold_of,
                         bool refit_reducer = true);

double kfold_mae(const FunctionalDataset& data, const OrdinalLabels& labels,
                 const ReducerSpec& method, int k_folds, std::uint64_t seed);

/// Confusion-matrix style evaluation, optionally after merging level groups
/// (each group is relabeled to its maximum member).
struct EvaluationReport {
    std::vector<int> levels;            ///< sorted post-merge level values
    Eigen::MatrixXi confusion;          ///< rows = true, columns = predicted
    double accuracy = 0.0;
    Eigen::VectorXd sensitivity;        ///< one-vs-rest, per level
    Eigen::VectorXd specificity;
    double mae = 0.0;                   ///< mean |true - predicted| post-merge
    std::vector<std::vector<int>> merges;
};

EvaluationReport evaluation_report(const std::vector<int>& truth,
                                   const std::vector<int>& predicted,
                                   const std::vector<std::vector<int>>& merge_groups = {});

}  // namespace ordifun
