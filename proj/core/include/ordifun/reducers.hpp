#pragma once

#include <Eigen/Core>
#include <string>
#include <variant>
#include <vector>

#include "ordifun/basis.hpp"
#include "ordifun/ordinal.hpp"

namespace ordifun {

enum class ReducerKind { focca, fpca, fofd, heuristic };

std::string to_string(ReducerKind kind);
ReducerKind reducer_kind_from_string(const std::string& name);

/// Canonical reducer pairing a functional direction b_k with an ordinal
/// direction theta_k, fitted by maximizing the penalized squared sample
/// correlation between curve scores and cumulative-encoding scores.
struct FoccaModel {
    struct Pair {
        Eigen::VectorXd b;      ///< functional direction, basis coefficients
        Eigen::VectorXd theta;  ///< ordinal direction over level steps
        double rho = 0.0;       ///< penalized canonical correlation
    };

    std::vector<Pair> pairs;
    Eigen::VectorXd coeff_mean;  ///< training column means of the coefficients
    Eigen::VectorXd y_mean;      ///< training column means of the encoding
    double lambda1 = 0.0;        ///< curvature penalty on b
    double lambda2 = 0.0;        ///< ridge penalty on theta
    int m = 0;
    BasisSpec basis;
};

/// Single-block reducers: penalized functional PCA, the ordinal Fisher
/// discriminant, and the endpoint-value heuristic.
struct LinearReducerModel {
    struct Component {
        Eigen::VectorXd b;
        double value = 0.0;  ///< pencil eigenvalue (variance for fpca)
    };

    std::vector<Component> components;
    Eigen::VectorXd coeff_mean;
    double lambda = 0.0;
    int m = 0;
    ReducerKind kind = ReducerKind::fpca;
    BasisSpec basis;
};

FoccaModel fit_focca(const FunctionalDataset& data, const OrdinalLabels& labels,
                     double lambda1, double lambda2, int m);

/// Functional scores: score_ik = b_k^T J (a_i - coeff_mean).
Eigen::MatrixXd focca_transform(const FoccaModel& model, const FunctionalDataset& data);

/// Ordinal scores of the labels under the model's theta directions, centered
/// with the training encoding means.
Eigen::MatrixXd focca_ordinal_scores(const FoccaModel& model, const OrdinalLabels& labels);

/// Penalized fPCA: leading solutions of J V11 J v = value (J + lambda K) v.
LinearReducerModel fit_fpca(const FunctionalDataset& data, double lambda, int m);

/// Ordinal Fisher discriminant: the between matrix sums, over consecutive
/// level pairs only, the scatter of each level mean around the pooled mean of
/// the pair; within is the usual per-level residual scatter.
LinearReducerModel fit_fofd(const FunctionalDataset& data, const OrdinalLabels& labels,
                            double lambda, int m);

/// Scalar baseline: score is the curve value at the right end of the domain.
LinearReducerModel fit_heuristic(const FunctionalDataset& data);

/// Scores under a linear model; fpca/fofd project through the Gram matrix,
/// the heuristic is a plain (identity-metric) projection.
Eigen::MatrixXd linear_transform(const LinearReducerModel& model, const FunctionalDataset& data);

/// Method selector for cross validation and benchmarking.
struct ReducerSpec {
    ReducerKind kind = ReducerKind::focca;
    double lambda1 = 0.0;  ///< focca curvature penalty
    double lambda2 = 0.0;  ///< focca ridge penalty
    double lambda = 0.0;   ///< fpca/fofd penalty
    int m = 2;
};

/// Uniform fit/transform wrapper so pipelines can treat all reducers alike.
class FittedReducer {
public:
    static FittedReducer fit(const ReducerSpec& spec, const FunctionalDataset& data,
                             const OrdinalLabels& labels);

    explicit FittedReducer(FoccaModel model) : model_(std::move(model)) {}
    explicit FittedReducer(LinearReducerModel model) : model_(std::move(model)) {}

    Eigen::MatrixXd transform(const FunctionalDataset& data) const;

    const FoccaModel* focca() const { return std::get_if<FoccaModel>(&model_); }
    const LinearReducerModel* linear() const { return std::get_if<LinearReducerModel>(&model_); }
    ReducerKind kind() const;

private:
    std::variant<FoccaModel, LinearReducerModel> model_;
};

}  // namespace ordifun
