#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "ordifun/classify.hpp"
#include "ordifun/errors.hpp"
#include "ordifun/rng.hpp"
#include "ordifun/simulate.hpp"
#include "support/oracles.hpp"

using namespace ordifun;
namespace oracle = ordifun::testing;

TEST_CASE("centroids are per-level score means") {
    Eigen::MatrixXd scores(3, 2);
    scores << 0.0, 1.0, 2.0, 3.0, 4.0, 5.0;
    const OrdinalLabels one_each({2, 0, 1}, 2);
    const CentroidClassifier clf = fit_centroids(scores, one_each);
    REQUIRE(clf.levels == std::vector<int>({0, 1, 2}));
    CHECK(clf.centroids.row(0) == scores.row(1));
    CHECK(clf.centroids.row(1) == scores.row(2));
    CHECK(clf.centroids.row(2) == scores.row(0));

    // duplication leaves the centroids unchanged
    Eigen::MatrixXd doubled(6, 2);
    doubled << scores, scores;
    const CentroidClassifier dup =
        fit_centroids(doubled, OrdinalLabels({2, 0, 1, 2, 0, 1}, 2));
    CHECK((dup.centroids - clf.centroids).cwiseAbs().maxCoeff() == 0.0);

    RngStream rng(31);
    Eigen::MatrixXd random(40, 3);
    std::vector<int> levels;
    for (int i = 0; i < 40; ++i) {
        levels.push_back(static_cast<int>(rng.uniform_int(4)));
        for (int j = 0; j < 3; ++j) random(i, j) = rng.normal(0.0, 1.0);
    }
    const CentroidClassifier rc = fit_centroids(random, OrdinalLabels(levels, 3));
    for (std::size_t k = 0; k < rc.levels.size(); ++k) {
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(3);
        int count = 0;
        for (int i = 0; i < 40; ++i) {
            if (levels[static_cast<std::size_t>(i)] == rc.levels[k]) {
                mean += random.row(i);
                ++count;
            }
        }
        mean /= count;
        CHECK((rc.centroids.row(static_cast<Eigen::Index>(k)) - mean).cwiseAbs().maxCoeff() <
              1e-14);
    }
}

TEST_CASE("prediction: exact hits, tie rule, brute-force agreement") {
    CentroidClassifier clf;
    clf.levels = {2, 5};
    clf.centroids.resize(2, 1);
    clf.centroids << 0.0, 4.0;

    Eigen::MatrixXd at_centroid(1, 1);
    at_centroid << 4.0;
    CHECK(predict(clf, at_centroid) == std::vector<int>{5});

    Eigen::MatrixXd halfway(1, 1);
    halfway << 2.0;  // equidistant, lower level wins
    CHECK(predict(clf, halfway) == std::vector<int>{2});

    RngStream rng(77);
    Eigen::MatrixXd queries(200, 1);
    for (int i = 0; i < 200; ++i) queries(i, 0) = rng.uniform(-3.0, 7.0);
    const std::vector<int> fast = predict(clf, queries);
    for (int i = 0; i < 200; ++i) {
        int best = clf.levels[0];
        double best_d = std::abs(queries(i, 0) - clf.centroids(0, 0));
        for (std::size_t k = 1; k < clf.levels.size(); ++k) {
            const double d = std::abs(queries(i, 0) - clf.centroids(static_cast<Eigen::Index>(k), 0));
            if (d < best_d) {
                best_d = d;
                best = clf.levels[k];
            }
        }
        CHECK(fast[static_cast<std::size_t>(i)] == best);
    }

    CHECK_THROWS_AS(predict(CentroidClassifier{}, halfway), ValidationError);
}

TEST_CASE("prediction is invariant under score-space isometries") {
    RngStream rng(98);
    Eigen::MatrixXd train = oracle::random_gaussian(60, 2, rng);
    std::vector<int> levels;
    for (int i = 0; i < 60; ++i) levels.push_back(static_cast<int>(rng.uniform_int(5)));
    const OrdinalLabels labels(levels, 4);
    Eigen::MatrixXd query = oracle::random_gaussian(30, 2, rng);

    const Eigen::MatrixXd rotation = oracle::random_orthogonal(2, rng);
    Eigen::RowVector2d shift(1.7, -0.3);

    const std::vector<int> base = predict(fit_centroids(train, labels), query);
    const Eigen::MatrixXd train_iso = (train * rotation.transpose()).rowwise() + shift;
    const Eigen::MatrixXd query_iso = (query * rotation.transpose()).rowwise() + shift;
    const std::vector<int> moved = predict(fit_centroids(train_iso, labels), query_iso);
    CHECK(base == moved);
}

TEST_CASE("fold assignment: shuffled contiguous blocks, near-equal sizes") {
    const std::vector<int> folds = make_fold_assignment(103, 5, 9);
    std::vector<int> counts(5, 0);
    for (int f : folds) counts[static_cast<std::size_t>(f)] += 1;
    CHECK(counts == std::vector<int>({21, 21, 21, 20, 20}));
    CHECK(folds == make_fold_assignment(103, 5, 9));
    CHECK(folds != make_fold_assignment(103, 5, 10));
    CHECK_THROWS_AS(make_fold_assignment(3, 4, 1), ValidationError);
    CHECK_THROWS_AS(make_fold_assignment(10, 1, 1), ValidationError);
}

TEST_CASE("the cross-validated MAE is the sum of fold means") {
    // constant off-by-one predictions give exactly K
    const std::vector<int> truth{0, 1, 2, 3, 4, 5, 6, 7, 0, 1, 2, 3};
    std::vector<int> plus_one;
    for (int c : truth) plus_one.push_back(c + 1);
    const std::vector<int> folds{0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3};
    CHECK(mae_from_folds(truth, plus_one, folds) == 4.0);

    // fold means weight unbalanced folds differently from a global mean
    const std::vector<int> truth2{0, 0, 0, 2};
    const std::vector<int> pred2{0, 0, 0, 0};
    const std::vector<int> folds2{0, 0, 0, 1};
    CHECK(mae_from_folds(truth2, pred2, folds2) == 2.0);
}

TEST_CASE("kfold pipeline hits zero on perfectly separated data") {
    RngStream rng(41);
    const int n = 90, nj = 5, max_level = 2;
    Eigen::MatrixXd coeffs(n, nj);
    std::vector<int> levels;
    for (int i = 0; i < n; ++i) {
        const int c = i % 3;
        levels.push_back(c);
        for (int j = 0; j < nj; ++j) coeffs(i, j) = 50.0 * c + rng.normal(0.0, 0.01);
    }
    const FunctionalDataset data(coeffs, BasisSpec(nj, Interval{0.0, 1.0}));
    const OrdinalLabels labels(levels, max_level);
    ReducerSpec spec;
    spec.kind = ReducerKind::fpca;
    spec.lambda = 1e-6;
    spec.m = 2;
    CHECK(kfold_mae(data, labels, spec, 5, 3) == 0.0);
}

TEST_CASE("kfold MAE is deterministic and unit-order invariant given folds") {
    RngStream rng(52);
    const int n = 120, nj = 6, max_level = 4;
    Eigen::MatrixXd coeffs = oracle::random_gaussian(n, nj, rng);
    std::vector<int> levels;
    for (int i = 0; i < n; ++i) {
        levels.push_back(static_cast<int>(rng.uniform_int(max_level + 1)));
        coeffs(i, 0) += 1.5 * levels.back();
    }
    const FunctionalDataset data(coeffs, BasisSpec(nj, Interval{0.0, 1.0}));
    const OrdinalLabels labels(levels, max_level);
    ReducerSpec spec;
    spec.kind = ReducerKind::focca;
    spec.lambda1 = 1.0;
    spec.lambda2 = 1.0;
    spec.m = 2;

    CHECK(kfold_mae(data, labels, spec, 5, 11) == kfold_mae(data, labels, spec, 5, 11));

    const std::vector<int> folds = make_fold_assignment(n, 5, 11);
    const double base = kfold_cv(data, labels, spec, folds).mae_cv;

    const std::vector<int> perm = shuffled_indices(n, RngStream(1234));
    Eigen::MatrixXd permuted(n, nj);
    std::vector<int> perm_levels(static_cast<std::size_t>(n));
    std::vector<int> perm_folds(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int src = perm[static_cast<std::size_t>(i)];
        permuted.row(i) = coeffs.row(src);
        perm_levels[static_cast<std::size_t>(i)] = levels[static_cast<std::size_t>(src)];
        perm_folds[static_cast<std::size_t>(i)] = folds[static_cast<std::size_t>(src)];
    }
    const double moved = kfold_cv(FunctionalDataset(permuted, data.basis),
                                  OrdinalLabels(perm_levels, max_level), spec, perm_folds)
                             .mae_cv;
    CHECK(moved == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("stronger scenario severity lowers the cross-validated error") {
    ReducerSpec spec;
    spec.kind = ReducerKind::focca;
    spec.lambda1 = 1e2;
    spec.lambda2 = 1e3;
    spec.m = 2;
    for (int replica = 0; replica < 20; ++replica) {
        ScenarioConfig config;
        config.scenario = Scenario::a;
        config.n = 300;
        config.seed = 4000 + static_cast<std::uint64_t>(replica);
        config.q = 1.0;
        const SimulatedData strong = simulate(config);
        config.q = 0.0;
        const SimulatedData null = simulate(config);
        const double mae_strong = kfold_mae(strong.data, strong.labels, spec, 5, config.seed);
        const double mae_null = kfold_mae(null.data, null.labels, spec, 5, config.seed);
        CHECK(mae_strong < mae_null);
    }
}

TEST_CASE("folds missing entire levels are tolerated") {
    RngStream rng(61);
    const int n = 12;
    Eigen::MatrixXd coeffs = oracle::random_gaussian(n, 4, rng);
    std::vector<int> levels(n, 0);
    levels[0] = 5;  // one rare level
    const FunctionalDataset data(coeffs, BasisSpec(4, Interval{0.0, 1.0}));
    const OrdinalLabels labels(levels, 5);
    ReducerSpec spec;
    spec.kind = ReducerKind::focca;
    spec.lambda1 = 0.1;
    spec.lambda2 = 0.1;
    spec.m = 1;
    CHECK_NOTHROW(kfold_mae(data, labels, spec, 3, 2));
    CHECK_THROWS_AS(kfold_mae(data, labels, spec, 13, 2), ValidationError);
}

TEST_CASE("evaluation report: perfect predictions") {
    const std::vector<int> truth{0, 1, 2, 2};
    const EvaluationReport report = evaluation_report(truth, truth);
    CHECK(report.accuracy == 1.0);
    CHECK(report.mae == 0.0);
    CHECK(report.confusion.trace() == 4);
    for (Eigen::Index c = 0; c < report.sensitivity.size(); ++c) {
        CHECK(report.sensitivity[c] == 1.0);
        CHECK(report.specificity[c] == 1.0);
    }
}

TEST_CASE("evaluation report: merged levels count as one") {
    const std::vector<int> truth{0, 1, 2};
    const std::vector<int> predicted{1, 0, 2};  // both mistakes inside {0,1}
    const EvaluationReport report = evaluation_report(truth, predicted, {{0, 1}});
    CHECK(report.accuracy == 1.0);
    CHECK(report.levels == std::vector<int>({1, 2}));
    CHECK(report.confusion(0, 0) == 2);

    CHECK_THROWS_AS(evaluation_report(truth, predicted, {{0, 1}, {1, 2}}), ValidationError);
}

TEST_CASE("evaluation report matches a hand-computed 3x3 table") {
    const std::vector<int> truth{0, 0, 0, 1, 1, 1, 2, 2, 2};
    const std::vector<int> predicted{0, 1, 2, 1, 1, 0, 2, 2, 1};
    const EvaluationReport report = evaluation_report(truth, predicted);

    Eigen::MatrixXi expected(3, 3);
    expected << 1, 1, 1, 1, 2, 0, 0, 1, 2;
    CHECK(report.confusion == expected);
    CHECK(report.accuracy == doctest::Approx(5.0 / 9.0));
    CHECK(report.mae == doctest::Approx(5.0 / 9.0));
    CHECK(report.sensitivity[0] == doctest::Approx(1.0 / 3.0));
    CHECK(report.sensitivity[1] == doctest::Approx(2.0 / 3.0));
    CHECK(report.sensitivity[2] == doctest::Approx(2.0 / 3.0));
    CHECK(report.specificity[0] == doctest::Approx(5.0 / 6.0));
    CHECK(report.specificity[1] == doctest::Approx(4.0 / 6.0));
    CHECK(report.specificity[2] == doctest::Approx(5.0 / 6.0));
}
