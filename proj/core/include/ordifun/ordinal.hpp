#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

namespace ordifun {

/// Ordinal responses: levels in {0, ..., max_level}, max_level >= 1 fixed for
/// the whole dataset (levels may be absent from a subset).
struct OrdinalLabels {
    std::vector<int> levels;
    int max_level = 1;

    OrdinalLabels(std::vector<int> lv, int max_lv);

    int n_units() const { return static_cast<int>(levels.size()); }

    OrdinalLabels subset(const std::vector<int>& rows) const;
};

/// Cumulative 0/1 encoding: row i has entries 1{c_i >= c} for c = 1..max_level,
/// i.e. c_i leading ones. Row sums recover the level.
struct CumulativeEncoding {
    Eigen::MatrixXd matrix;        ///< n x max_level
    Eigen::VectorXd column_means;  ///< zero until centered() is taken
};

CumulativeEncoding encode_cumulative(const OrdinalLabels& labels);

/// Level back from an encoding row (count of leading ones).
int decode_level(const Eigen::VectorXd& row);

/// Column-centered copy of a matrix plus the removed means.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> center_columns(const Eigen::MatrixXd& matrix);

/// The score step between consecutive levels c_hat-1 and c_hat is the
/// component theta_{c_hat} itself (1-indexed), unchanged by column centering
/// of the encoding.
double ordinal_step(const Eigen::VectorXd& theta, int c_hat);

}  // namespace ordifun
