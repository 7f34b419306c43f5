#include "ordifun/classify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "ordifun/errors.hpp"
#include "ordifun/rng.hpp"

namespace ordifun {

CentroidClassifier fit_centroids(const Eigen::MatrixXd& scores, const OrdinalLabels& labels) {
    if (scores.rows() != labels.n_units() || scores.rows() < 1) {
        throw ValidationError("length_mismatch", "scores and labels disagree on unit count");
    }
    std::map<int, std::pair<Eigen::VectorXd, int>> sums;
    for (int i = 0; i < labels.n_units(); ++i) {
        const int c = labels.levels[static_cast<std::size_t>(i)];
        auto [it, inserted] = sums.try_emplace(c, Eigen::VectorXd::Zero(scores.cols()), 0);
        it->second.first += scores.row(i).transpose();
        it->second.second += 1;
    }
    CentroidClassifier clf;
    clf.centroids.resize(static_cast<Eigen::Index>(sums.size()), scores.cols());
    Eigen::Index row = 0;
    for (const auto& [level, entry] : sums) {
        clf.levels.push_back(level);
        clf.centroids.row(row++) = entry.first.transpose() / static_cast<double>(entry.second);
    }
    return clf;
}

std::vector<int> predict(const CentroidClassifier& classifier, const Eigen::MatrixXd& scores) {
    if (classifier.levels.empty()) {
        throw ValidationError("empty_classifier", "classifier has no centroids");
    }
    if (scores.cols() != classifier.centroids.cols()) {
        throw ValidationError("shape_mismatch", "score width differs from the centroids");
    }
    std::vector<int> out(static_cast<std::size_t>(scores.rows()));
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        int best_level = classifier.levels.front();
        double best_dist = (scores.row(i) - classifier.centroids.row(0)).squaredNorm();
        for (std::size_t k = 1; k < classifier.levels.size(); ++k) {
            const double dist =
                (scores.row(i) - classifier.centroids.row(static_cast<Eigen::Index>(k))).squaredNorm();
            // strict improvement only: equidistant centroids keep the lower level
            if (dist < best_dist) {
                best_dist = dist;
                best_level = classifier.levels[k];
            }
        }
        out[static_cast<std::size_t>(i)] = best_level;
    }
    return out;
}

std::vector<int> make_fold_assignment(int n, int k_folds, std::uint64_t seed) {
    if (k_folds < 2) throw ValidationError("bad_k", "need at least two folds");
    if (k_folds > n) throw ValidationError("bad_k", "more folds than units");
    const std::vector<int> order = shuffled_indices(n, RngStream(seed, {0x666f6c64}));  // "fold"
    std::vector<int> fold_of(static_cast<std::size_t>(n));
    const int base = n / k_folds;
    const int extra = n % k_folds;
    int pos = 0;
    for (int k = 0; k < k_folds; ++k) {
        const int size = base + (k < extra ? 1 : 0);
        for (int j = 0; j < size; ++j) {
            fold_of[static_cast<std::size_t>(order[static_cast<std::size_t>(pos++)])] = k;
        }
    }
    return fold_of;
}

double mae_from_folds(const std::vector<int>& truth, const std::vector<int>& predictions,
                      const std::vector<int>& fold_of) {
    if (truth.size() != predictions.size() || truth.size() != fold_of.size()) {
        throw ValidationError("length_mismatch", "mae_from_folds inputs disagree in length");
    }
    const int k_folds = 1 + *std::max_element(fold_of.begin(), fold_of.end());
    std::vector<double> abs_sum(static_cast<std::size_t>(k_folds), 0.0);
    std::vector<int> count(static_cast<std::size_t>(k_folds), 0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const auto k = static_cast<std::size_t>(fold_of[i]);
        abs_sum[k] += std::abs(truth[i] - predictions[i]);
        count[k] += 1;
    }
    double total = 0.0;
    for (std::size_t k = 0; k < abs_sum.size(); ++k) {
        if (count[k] > 0) total += abs_sum[k] / static_cast<double>(count[k]);
    }
    return total;
}

CrossValidation kfold_cv(const FunctionalDataset& data, const OrdinalLabels& labels,
                         const ReducerSpec& method, const std::vector<int>& fold_of,
                         bool refit_reducer) {
    const int n = data.n_units();
    if (static_cast<int>(fold_of.size()) != n || labels.n_units() != n) {
        throw ValidationError("length_mismatch", "fold assignment must cover every unit");
    }
    if (*std::min_element(fold_of.begin(), fold_of.end()) < 0) {
        throw ValidationError("bad_k", "fold indices must be nonnegative");
    }
    const int k_folds = 1 + *std::max_element(fold_of.begin(), fold_of.end());

    CrossValidation cv;
    cv.fold_of = fold_of;
    cv.predictions.assign(static_cast<std::size_t>(n), 0);

    std::optional<FittedReducer> shared;
    if (!refit_reducer) shared = FittedReducer::fit(method, data, labels);

    for (int k = 0; k < k_folds; ++k) {
        std::vector<int> train_idx;
        std::vector<int> test_idx;
        for (int i = 0; i < n; ++i) {
            (fold_of[static_cast<std::size_t>(i)] == k ? test_idx : train_idx).push_back(i);
        }
        if (test_idx.empty()) continue;
        if (train_idx.empty()) {
            throw ValidationError("bad_k", "a fold contains every unit");
        }

        const FunctionalDataset train_data = data.subset(train_idx);
        const OrdinalLabels train_labels = labels.subset(train_idx);
        if (refit_reducer) shared = FittedReducer::fit(method, train_data, train_labels);
        const FittedReducer& reducer = *shared;

        const CentroidClassifier clf =
            fit_centroids(reducer.transform(train_data), train_labels);
        const std::vector<int> predicted = predict(clf, reducer.transform(data.subset(test_idx)));
        for (std::size_t j = 0; j < test_idx.size(); ++j) {
            cv.predictions[static_cast<std::size_t>(test_idx[j])] = predicted[j];
        }
    }

    cv.fold_mae.assign(static_cast<std::size_t>(k_folds), 0.0);
    std::vector<int> count(static_cast<std::size_t>(k_folds), 0);
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(fold_of[static_cast<std::size_t>(i)]);
        cv.fold_mae[k] += std::abs(labels.levels[static_cast<std::size_t>(i)] -
                                   cv.predictions[static_cast<std::size_t>(i)]);
        count[k] += 1;
    }
    for (std::size_t k = 0; k < cv.fold_mae.size(); ++k) {
        if (count[k] > 0) cv.fold_mae[k] /= static_cast<double>(count[k]);
        cv.mae_cv += cv.fold_mae[k];
    }
    return cv;
}

double kfold_mae(const FunctionalDataset& data, const OrdinalLabels& labels,
                 const ReducerSpec& method, int k_folds, std::uint64_t seed) {
    return kfold_cv(data, labels, method, make_fold_assignment(data.n_units(), k_folds, seed))
        .mae_cv;
}

EvaluationReport evaluation_report(const std::vector<int>& truth,
                                   const std::vector<int>& predicted,
                                   const std::vector<std::vector<int>>& merge_groups) {
    if (truth.size() != predicted.size() || truth.empty()) {
        throw ValidationError("length_mismatch", "need equally many true and predicted labels");
    }

    std::map<int, int> remap;
    std::set<int> seen;
    for (const auto& group : merge_groups) {
        if (group.empty()) throw ValidationError("bad_merge", "empty merge group");
        const int target = *std::max_element(group.begin(), group.end());
        for (int level : group) {
            if (!seen.insert(level).second) {
                throw ValidationError("bad_merge", "merge groups overlap on level " +
                                                       std::to_string(level));
            }
            remap[level] = target;
        }
    }
    auto apply = [&remap](int level) {
        auto it = remap.find(level);
        return it == remap.end() ? level : it->second;
    };

    std::set<int> level_set;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        level_set.insert(apply(truth[i]));
        level_set.insert(apply(predicted[i]));
    }

    EvaluationReport report;
    report.merges = merge_groups;
    report.levels.assign(level_set.begin(), level_set.end());
    std::map<int, int> index;
    for (std::size_t k = 0; k < report.levels.size(); ++k) {
        index[report.levels[k]] = static_cast<int>(k);
    }

    const auto n_levels = static_cast<Eigen::Index>(report.levels.size());
    report.confusion = Eigen::MatrixXi::Zero(n_levels, n_levels);
    double abs_err = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const int t = apply(truth[i]);
        const int p = apply(predicted[i]);
        report.confusion(index[t], index[p]) += 1;
        abs_err += std::abs(t - p);
    }
    const auto n = static_cast<double>(truth.size());
    report.accuracy = static_cast<double>(report.confusion.trace()) / n;
    report.mae = abs_err / n;

    report.sensitivity.resize(n_levels);
    report.specificity.resize(n_levels);
    for (Eigen::Index c = 0; c < n_levels; ++c) {
        const double tp = report.confusion(c, c);
        const double fn = report.confusion.row(c).sum() - tp;
        const double fp = report.confusion.col(c).sum() - tp;
        const double tn = n - tp - fn - fp;
        report.sensitivity[c] = (tp + fn > 0) ? tp / (tp + fn) : 0.0;
        report.specificity[c] = (tn + fp > 0) ? tn / (tn + fp) : 0.0;
    }
    return report;
}

}  // namespace ordifun
