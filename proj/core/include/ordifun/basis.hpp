#pragma once

#include <Eigen/Core>
#include <vector>

namespace ordifun {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double length() const { return hi - lo; }
    bool contains(double t) const { return t >= lo && t <= hi; }
    bool operator==(const Interval&) const = default;
};

struct GramPair;

/// Cubic (by default) B-spline basis over a closed interval.
///
/// The knot vector has the boundary knots repeated `order` times and the
/// interior knots strictly equispaced, so the number of basis functions is
/// n_interior + order. Evaluation at the right endpoint uses the closed-right
/// convention on the last knot interval.
class BasisSpec {
public:
    BasisSpec(int n_basis, Interval domain, int order = 4);

    int order() const { return order_; }
    int n_basis() const { return n_basis_; }
    const Interval& domain() const { return domain_; }
    const std::vector<double>& knots() const { return knots_; }
    int n_intervals() const { return n_basis_ - order_ + 1; }

    /// Values (or first/second derivatives) of all basis functions at t.
    /// At most `order` entries are nonzero. Throws if t is outside the domain.
    Eigen::VectorXd evaluate(double t, int derivative = 0) const;

    /// Row l holds evaluate(ts[l], derivative).
    Eigen::MatrixXd evaluate_many(const Eigen::VectorXd& ts, int derivative = 0) const;

    bool operator==(const BasisSpec& other) const {
        return order_ == other.order_ && n_basis_ == other.n_basis_ &&
               domain_ == other.domain_;
    }

private:
    friend GramPair gram_matrices(const BasisSpec&);

    /// Index i with knots[i] <= t < knots[i+1], last interval closed on the right.
    int find_span(double t) const;

    /// Nonzero band: values of the `order` basis functions with support at t,
    /// first of which is phi_{span - order + 1}.
    void eval_band(double t, int span, int derivative, double* out) const;

    int order_;
    int n_basis_;
    Interval domain_;
    std::vector<double> knots_;
};

BasisSpec make_bspline_basis(int n_basis, Interval domain, int order = 4);

/// Gram matrix of the basis and of its second derivatives.
struct GramPair {
    Eigen::MatrixXd gram;       ///< integrals of phi_j phi_k
    Eigen::MatrixXd curvature;  ///< integrals of phi_j'' phi_k''
};

/// Both matrices computed by per-knot-interval Gauss-Legendre quadrature,
/// exact for the piecewise-polynomial integrands.
GramPair gram_matrices(const BasisSpec& spec);

/// Curves represented by their basis coefficients, one row per unit.
struct FunctionalDataset {
    Eigen::MatrixXd coefficients;  ///< n x n_basis
    BasisSpec basis;

    FunctionalDataset(Eigen::MatrixXd coeffs, BasisSpec spec);

    int n_units() const { return static_cast<int>(coefficients.rows()); }

    FunctionalDataset subset(const std::vector<int>& rows) const;
};

/// Penalized least-squares fit of sampled values onto the basis:
/// argmin_b sum_l (values_l - sum_j b_j phi_j(times_l))^2 + lambda b^T K b.
Eigen::VectorXd smooth_to_basis(const Eigen::VectorXd& times,
                                const Eigen::VectorXd& values,
                                const BasisSpec& spec, double lambda);

struct GcvFit {
    Eigen::VectorXd coefficients;
    double lambda = 0.0;
    double gcv = 0.0;
};

/// 41 log-spaced penalties over [1e-4, 1e8].
std::vector<double> default_gcv_grid();

/// Same fit with the penalty selected by generalized cross validation,
/// GCV(lambda) = L ||residual||^2 / (L - trace(hat matrix))^2, searched over
/// the given grid; ties break toward the larger (smoother) penalty.
GcvFit smooth_to_basis_gcv(const Eigen::VectorXd& times,
                           const Eigen::VectorXd& values, const BasisSpec& spec,
                           const std::vector<double>& lambda_grid = default_gcv_grid());

}  // namespace ordifun
