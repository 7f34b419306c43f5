#include "ordifun/ordinal.hpp"

#include <string>

#include "ordifun/errors.hpp"

namespace ordifun {

OrdinalLabels::OrdinalLabels(std::vector<int> lv, int max_lv)
    : levels(std::move(lv)), max_level(max_lv) {
    if (max_level < 1) {
        throw ValidationError("bad_max_level", "max_level must be at least 1");
    }
    for (int c : levels) {
        if (c < 0 || c > max_level) {
            throw ValidationError("label_range",
                                  "level " + std::to_string(c) + " outside {0..." +
                                      std::to_string(max_level) + "}");
        }
    }
}

OrdinalLabels OrdinalLabels::subset(const std::vector<int>& rows) const {
    std::vector<int> sub;
    sub.reserve(rows.size());
    for (int r : rows) sub.push_back(levels[static_cast<std::size_t>(r)]);
    return OrdinalLabels(std::move(sub), max_level);
}

CumulativeEncoding encode_cumulative(const OrdinalLabels& labels) {
    const int n = labels.n_units();
    const int width = labels.max_level;
    CumulativeEncoding enc;
    enc.matrix = Eigen::MatrixXd::Zero(n, width);
    enc.column_means = Eigen::VectorXd::Zero(width);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < labels.levels[static_cast<std::size_t>(i)]; ++c) {
            enc.matrix(i, c) = 1.0;
        }
    }
    return enc;
}

int decode_level(const Eigen::VectorXd& row) {
    return static_cast<int>(row.sum() + 0.5);
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> center_columns(const Eigen::MatrixXd& matrix) {
    if (matrix.rows() < 1) {
        throw ValidationError("empty_matrix", "cannot center an empty matrix");
    }
    Eigen::VectorXd means = matrix.colwise().mean();
    Eigen::MatrixXd centered = matrix.rowwise() - means.transpose();
    return {std::move(centered), std::move(means)};
}

double ordinal_step(const Eigen::VectorXd& theta, int c_hat) {
    if (c_hat < 1 || c_hat > theta.size()) {
        throw ValidationError("bad_step_index", "c_hat must be in {1..." +
                                                    std::to_string(theta.size()) + "}");
    }
    return theta[c_hat - 1];
}

}  // namespace ordifun
