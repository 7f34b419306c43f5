#include <doctest.h>

#include <Eigen/Dense>

#include "ordifun/errors.hpp"
#include "ordifun/ordinal.hpp"
#include "ordifun/rng.hpp"

using namespace ordifun;

TEST_CASE("cumulative encoding rows") {
    const OrdinalLabels labels({0, 8, 3}, 8);
    const Eigen::MatrixXd y = encode_cumulative(labels).matrix;
    REQUIRE(y.rows() == 3);
    REQUIRE(y.cols() == 8);
    CHECK(y.row(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(y.row(1).sum() == 8.0);
    Eigen::VectorXd expected(8);
    expected << 1, 1, 1, 0, 0, 0, 0, 0;
    CHECK(y.row(2).transpose() == expected);
}

TEST_CASE("levels decode back and the encoding is monotone") {
    const int max_level = 8;
    std::vector<int> levels;
    for (int c = 0; c <= max_level; ++c) levels.push_back(c);
    const Eigen::MatrixXd y = encode_cumulative(OrdinalLabels(levels, max_level)).matrix;
    for (int c = 0; c <= max_level; ++c) {
        CHECK(decode_level(y.row(c)) == c);
        if (c > 0) CHECK((y.row(c).array() >= y.row(c - 1).array()).all());
    }
}

TEST_CASE("labels are validated") {
    CHECK_THROWS_AS(OrdinalLabels({0, 9}, 8), ValidationError);
    CHECK_THROWS_AS(OrdinalLabels({-1}, 8), ValidationError);
    CHECK_THROWS_AS(OrdinalLabels({0}, 0), ValidationError);
}

TEST_CASE("column centering") {
    Eigen::MatrixXd centered_already(2, 2);
    centered_already << 1.0, -2.0, -1.0, 2.0;
    auto [same, means_zero] = center_columns(centered_already);
    CHECK((same - centered_already).norm() == 0.0);
    CHECK(means_zero.norm() == 0.0);

    Eigen::MatrixXd constant = Eigen::MatrixXd::Constant(5, 1, 3.25);
    auto [zeros, mean_c] = center_columns(constant);
    CHECK(zeros.cwiseAbs().maxCoeff() == 0.0);
    CHECK(mean_c[0] == 3.25);

    RngStream rng(4);
    Eigen::MatrixXd random(4, 2);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 2; ++j) random(i, j) = rng.uniform(-5.0, 5.0);
    }
    auto [centered, means] = center_columns(random);
    CHECK(centered.colwise().mean().cwiseAbs().maxCoeff() < 1e-14);
    CHECK((centered.rowwise() + means.transpose() - random).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("ordinal step reads the component directly") {
    Eigen::VectorXd theta(3);
    theta << 0.1, 0.5, 0.2;
    CHECK(ordinal_step(theta, 2) == 0.5);
    CHECK_THROWS_AS(ordinal_step(theta, 0), ValidationError);
    CHECK_THROWS_AS(ordinal_step(theta, 4), ValidationError);
}

TEST_CASE("score step between consecutive levels is theta_c, bit for bit") {
    const int max_level = 8;
    RngStream rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const int c_hat = 1 + static_cast<int>(rng.uniform_int(max_level));
        Eigen::VectorXd theta(max_level);
        for (int j = 0; j < max_level; ++j) theta[j] = rng.normal(0.0, 1.0);

        std::vector<int> levels{c_hat, c_hat - 1};
        // a few extra units so the column means are nontrivial
        for (int extra = 0; extra < 6; ++extra) {
            levels.push_back(static_cast<int>(rng.uniform_int(max_level + 1)));
        }
        const Eigen::MatrixXd y = encode_cumulative(OrdinalLabels(levels, max_level)).matrix;

        // uncentered: the row difference is e_{c_hat} exactly
        const Eigen::VectorXd diff = y.row(0) - y.row(1);
        CHECK(theta.dot(diff) == ordinal_step(theta, c_hat));

        // centering shifts both rows identically, so the difference is unchanged
        auto [centered, means] = center_columns(y);
        const Eigen::VectorXd diff_centered = centered.row(0) - centered.row(1);
        CHECK(theta.dot(diff_centered) == ordinal_step(theta, c_hat));
    }
}
