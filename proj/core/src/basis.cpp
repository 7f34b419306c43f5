#include "ordifun/basis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ordifun/errors.hpp"

namespace ordifun {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1]. Four nodes are exact up to degree 7
// (covers products of cubics), two nodes up to degree 3 (covers products of
// their second derivatives).
constexpr double kGl4Node[4] = {-0.8611363115940525752239465, -0.3399810435848562648026658,
                                0.3399810435848562648026658, 0.8611363115940525752239465};
constexpr double kGl4Weight[4] = {0.3478548451374538573730639, 0.6521451548625461426269361,
                                  0.6521451548625461426269361, 0.3478548451374538573730639};
constexpr double kGl2Node[2] = {-0.5773502691896257645091488, 0.5773502691896257645091488};
constexpr double kGl2Weight[2] = {1.0, 1.0};

constexpr int kMaxOrder = 16;

}  // namespace

BasisSpec::BasisSpec(int n_basis, Interval domain, int order)
    : order_(order), n_basis_(n_basis), domain_(domain) {
    if (order < 1 || order > kMaxOrder) {
        throw ValidationError("bad_order", "spline order must be in [1, 16]");
    }
    if (n_basis < order) {
        throw ValidationError("bad_n_basis", "need at least `order` basis functions");
    }
    if (!(domain.hi > domain.lo) || !std::isfinite(domain.lo) || !std::isfinite(domain.hi)) {
        throw ValidationError("bad_domain", "domain must be a nondegenerate finite interval");
    }
    const int n_interior = n_basis - order;
    knots_.resize(static_cast<std::size_t>(n_basis + order));
    for (int i = 0; i < order; ++i) {
        knots_[static_cast<std::size_t>(i)] = domain.lo;
        knots_[static_cast<std::size_t>(n_basis + order - 1 - i)] = domain.hi;
    }
    const double step = domain.length() / static_cast<double>(n_interior + 1);
    for (int i = 0; i < n_interior; ++i) {
        knots_[static_cast<std::size_t>(order + i)] = domain.lo + step * static_cast<double>(i + 1);
    }
}

BasisSpec make_bspline_basis(int n_basis, Interval domain, int order) {
    return BasisSpec(n_basis, domain, order);
}

int BasisSpec::find_span(double t) const {
    if (t >= domain_.hi) return n_basis_ - 1;
    auto first = knots_.begin() + (order_ - 1);
    auto last = knots_.begin() + (n_basis_ + 1);
    auto it = std::upper_bound(first, last, t);
    int span = static_cast<int>(it - knots_.begin()) - 1;
    return std::clamp(span, order_ - 1, n_basis_ - 1);
}

// Nonrecursive evaluation of the nonzero band and its derivatives
// (divided-difference triangle, then the derivative recurrence on top of it).
void BasisSpec::eval_band(double t, int span, int derivative, double* out) const {
    const int p = order_ - 1;
    double ndu[kMaxOrder][kMaxOrder];
    double left[kMaxOrder];
    double right[kMaxOrder];

    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = t - knots_[static_cast<std::size_t>(span + 1 - j)];
        right[j] = knots_[static_cast<std::size_t>(span + j)] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            const double temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }

    if (derivative == 0) {
        for (int j = 0; j <= p; ++j) out[j] = ndu[j][p];
        return;
    }
    if (derivative > p) {
        for (int j = 0; j <= p; ++j) out[j] = 0.0;
        return;
    }

    for (int r = 0; r <= p; ++r) {
        double a[2][kMaxOrder];
        int s1 = 0, s2 = 1;
        a[0][0] = 1.0;
        double value = 0.0;
        for (int k = 1; k <= derivative; ++k) {
            value = 0.0;
            const int rk = r - k;
            const int pk = p - k;
            if (r >= k) {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                value = a[s2][0] * ndu[rk][pk];
            }
            const int j1 = (rk >= -1) ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
                value += a[s2][j] * ndu[rk + j][pk];
            }
            if (r <= pk) {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                value += a[s2][k] * ndu[r][pk];
            }
            std::swap(s1, s2);
        }
        out[r] = value;
    }
    double factor = static_cast<double>(p);
    for (int k = 2; k <= derivative; ++k) factor *= static_cast<double>(p - k + 1);
    for (int j = 0; j <= p; ++j) out[j] *= factor;
}

Eigen::VectorXd BasisSpec::evaluate(double t, int derivative) const {
    if (!domain_.contains(t)) {
        throw ValidationError("t_outside_domain", "evaluation point outside the basis domain");
    }
    if (derivative < 0 || derivative > 2) {
        throw ValidationError("bad_derivative", "derivative must be 0, 1 or 2");
    }
    Eigen::VectorXd values = Eigen::VectorXd::Zero(n_basis_);
    const int span = find_span(t);
    double band[kMaxOrder];
    eval_band(t, span, derivative, band);
    const int first = span - order_ + 1;
    for (int j = 0; j < order_; ++j) values[first + j] = band[j];
    return values;
}

Eigen::MatrixXd BasisSpec::evaluate_many(const Eigen::VectorXd& ts, int derivative) const {
    Eigen::MatrixXd rows(ts.size(), n_basis_);
    for (Eigen::Index l = 0; l < ts.size(); ++l) {
        rows.row(l) = evaluate(ts[l], derivative).transpose();
    }
    return rows;
}

GramPair gram_matrices(const BasisSpec& spec) {
    const int nj = spec.n_basis();
    const int order = spec.order();
    const auto& knots = spec.knots();
    GramPair out{Eigen::MatrixXd::Zero(nj, nj), Eigen::MatrixXd::Zero(nj, nj)};

    double band[kMaxOrder];
    auto accumulate = [&](Eigen::MatrixXd& target, int derivative, const double* nodes,
                          const double* weights, int n_nodes) {
        for (int span = order - 1; span < nj; ++span) {
            const double a = knots[static_cast<std::size_t>(span)];
            const double b = knots[static_cast<std::size_t>(span + 1)];
            if (!(b > a)) continue;
            const double half = 0.5 * (b - a);
            const double mid = 0.5 * (a + b);
            const int first = span - order + 1;
            for (int g = 0; g < n_nodes; ++g) {
                spec.eval_band(mid + half * nodes[g], span, derivative, band);
                const double w = half * weights[g];
                for (int r = 0; r < order; ++r) {
                    for (int c = 0; c <= r; ++c) {
                        target(first + r, first + c) += w * band[r] * band[c];
                    }
                }
            }
        }
        target = target.selfadjointView<Eigen::Lower>();
    };

    accumulate(out.gram, 0, kGl4Node, kGl4Weight, 4);
    accumulate(out.curvature, 2, kGl2Node, kGl2Weight, 2);
    return out;
}

FunctionalDataset::FunctionalDataset(Eigen::MatrixXd coeffs, BasisSpec spec)
    : coefficients(std::move(coeffs)), basis(std::move(spec)) {
    if (coefficients.cols() != basis.n_basis()) {
        throw ValidationError("column_mismatch",
                              "coefficient columns must match the basis size");
    }
    if (!coefficients.allFinite()) {
        throw ValidationError("nonfinite_coefficients", "coefficients must be finite");
    }
}

FunctionalDataset FunctionalDataset::subset(const std::vector<int>& rows) const {
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), coefficients.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        sub.row(static_cast<Eigen::Index>(i)) = coefficients.row(rows[i]);
    }
    return FunctionalDataset(std::move(sub), basis);
}

namespace {

/// Penalized least squares in augmented (square-root) form: stacking
/// [B; sqrt(lambda) K^{1/2}] keeps the data term resolvable even when the
/// penalty dwarfs it, unlike the explicit normal equations.
struct PenalizedLsq {
    Eigen::MatrixXd design;          // L x nJ
    Eigen::VectorXd values;          // L
    Eigen::MatrixXd curvature_sqrt;  // symmetric PSD square root of K

    struct Solution {
        Eigen::VectorXd coefficients;
        double edf = 0.0;  ///< trace of the hat matrix
        double rss = 0.0;
    };

    Solution solve(double lambda) const {
        const Eigen::Index n_obs = design.rows();
        const Eigen::Index nj = design.cols();
        Eigen::MatrixXd stacked(n_obs + nj, nj);
        stacked.topRows(n_obs) = design;
        stacked.bottomRows(nj) = std::sqrt(lambda) * curvature_sqrt;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_obs + nj);
        rhs.head(n_obs) = values;

        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(stacked);
        if (qr.rank() < nj) {
            throw NumericalError("singular_normal_equations",
                                 "penalized least squares system is singular");
        }
        Solution sol;
        sol.coefficients = qr.solve(rhs);
        if (!sol.coefficients.allFinite()) {
            throw NumericalError("singular_normal_equations",
                                 "penalized least squares solve failed");
        }
        // edf = || B P R^{-1} ||_F^2 with QR of the stacked matrix
        const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(nj, nj);
        const Eigen::MatrixXd permuted = (design * qr.colsPermutation()).transpose();
        const Eigen::MatrixXd solved =
            r.transpose().triangularView<Eigen::Lower>().solve(permuted);
        sol.edf = solved.squaredNorm();
        sol.rss = (values - design * sol.coefficients).squaredNorm();
        return sol;
    }
};

PenalizedLsq assemble(const Eigen::VectorXd& times, const Eigen::VectorXd& values,
                      const BasisSpec& spec) {
    if (times.size() != values.size()) {
        throw ValidationError("length_mismatch", "times and values must have equal length");
    }
    if (times.size() < 2) {
        throw ValidationError("too_few_points", "need at least two observations");
    }
    for (Eigen::Index l = 0; l < times.size(); ++l) {
        if (!spec.domain().contains(times[l])) {
            throw ValidationError("t_outside_domain", "observation time outside the basis domain");
        }
    }
    PenalizedLsq lsq;
    lsq.design = spec.evaluate_many(times, 0);
    lsq.values = values;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram_matrices(spec).curvature);
    // zero out the numerical nullspace so extreme penalties cannot leak a
    // spurious ridge onto affine directions through rounding noise
    const double cutoff = 1e-12 * eig.eigenvalues().maxCoeff();
    const Eigen::VectorXd clipped =
        (eig.eigenvalues().array() < cutoff).select(0.0, eig.eigenvalues());
    lsq.curvature_sqrt = eig.eigenvectors() * clipped.cwiseSqrt().asDiagonal() *
                         eig.eigenvectors().transpose();
    return lsq;
}

}  // namespace

Eigen::VectorXd smooth_to_basis(const Eigen::VectorXd& times, const Eigen::VectorXd& values,
                                const BasisSpec& spec, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ValidationError("bad_lambda", "lambda must be finite and nonnegative");
    }
    if (lambda == 0.0 && times.size() < spec.n_basis()) {
        throw ValidationError("underdetermined_fit",
                              "unpenalized fit needs at least n_basis observations");
    }
    return assemble(times, values, spec).solve(lambda).coefficients;
}

std::vector<double> default_gcv_grid() {
    std::vector<double> grid(41);
    for (int i = 0; i < 41; ++i) {
        grid[static_cast<std::size_t>(i)] = std::pow(10.0, -4.0 + 0.3 * static_cast<double>(i));
    }
    return grid;
}

GcvFit smooth_to_basis_gcv(const Eigen::VectorXd& times, const Eigen::VectorXd& values,
                           const BasisSpec& spec, const std::vector<double>& lambda_grid) {
    if (lambda_grid.empty()) {
        throw ValidationError("empty_grid", "GCV needs a nonempty penalty grid");
    }
    const PenalizedLsq lsq = assemble(times, values, spec);
    const auto n_obs = static_cast<double>(times.size());

    std::vector<double> grid = lambda_grid;
    std::sort(grid.begin(), grid.end());

    GcvFit best;
    best.gcv = std::numeric_limits<double>::infinity();
    bool found = false;
    for (double lambda : grid) {
        if (!(lambda >= 0.0)) {
            throw ValidationError("bad_lambda", "GCV grid penalties must be nonnegative");
        }
        PenalizedLsq::Solution sol;
        try {
            sol = lsq.solve(lambda);
        } catch (const NumericalError&) {
            continue;
        }
        const double denom = n_obs - sol.edf;
        if (denom <= 1e-8) continue;
        const double gcv = n_obs * sol.rss / (denom * denom);
        // grid iterates in ascending order, so <= prefers the larger penalty
        if (gcv <= best.gcv) {
            best = GcvFit{std::move(sol.coefficients), lambda, gcv};
            found = true;
        }
    }
    if (!found) {
        throw NumericalError("gcv_failed", "no penalty on the grid produced a solvable fit");
    }
    return best;
}

}  // namespace ordifun
