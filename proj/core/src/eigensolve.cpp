#include "ordifun/eigensolve.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

#include "ordifun/errors.hpp"

namespace ordifun {

double fix_sign(Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-12) {
            if (v[i] < 0.0) {
                v = -v;
                return -1.0;
            }
            return 1.0;
        }
    }
    return 1.0;
}

Eigen::MatrixXd cholesky_with_jitter(Eigen::MatrixXd s, const char* label) {
    if (s.rows() != s.cols() || s.rows() == 0) {
        throw ValidationError("bad_metric", std::string(label) + ": metric must be square");
    }
    s = 0.5 * (s + s.transpose()).eval();
    const double base = s.trace() / static_cast<double>(s.rows());
    auto usable = [](const Eigen::LLT<Eigen::MatrixXd>& llt) {
        if (llt.info() != Eigen::Success) return false;
        // guard against "successful" factorizations of semidefinite inputs
        const Eigen::VectorXd diag = Eigen::MatrixXd(llt.matrixL()).diagonal();
        return diag.allFinite() && diag.minCoeff() > 0.0;
    };
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (usable(llt)) return llt.matrixL();
    if (base > 0.0) {
        for (double eps = 1e-12; eps <= 1.0000001e-8; eps *= 10.0) {
            Eigen::MatrixXd jittered = s;
            jittered.diagonal().array() += eps * base;
            llt.compute(jittered);
            if (usable(llt)) return llt.matrixL();
        }
    }
    throw NumericalError("metric_not_spd",
                         std::string(label) + ": metric is not positive definite (jitter exhausted)");
}

std::vector<CanonicalTriple> cca_svd(const Eigen::MatrixXd& c12, const Eigen::MatrixXd& s1,
                                     const Eigen::MatrixXd& s2, int m) {
    const Eigen::Index p = c12.rows();
    const Eigen::Index q = c12.cols();
    if (s1.rows() != p || s1.cols() != p || s2.rows() != q || s2.cols() != q) {
        throw ValidationError("shape_mismatch", "cca_svd: metric shapes must match c12");
    }
    if (m < 1) throw ValidationError("bad_m", "cca_svd: m must be positive");

    const Eigen::MatrixXd l1 = cholesky_with_jitter(s1, "left metric");
    const Eigen::MatrixXd l2 = cholesky_with_jitter(s2, "right metric");

    // M = L1^{-1} C12 L2^{-T} via two triangular solves
    Eigen::MatrixXd whitened = l1.triangularView<Eigen::Lower>().solve(c12);
    whitened = l2.triangularView<Eigen::Lower>()
                   .solve(whitened.transpose())
                   .transpose()
                   .eval();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(whitened, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const int count = static_cast<int>(std::min<Eigen::Index>({m, p, q}));

    std::vector<CanonicalTriple> triples;
    triples.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        CanonicalTriple t;
        t.b = l1.transpose().triangularView<Eigen::Upper>().solve(svd.matrixU().col(k));
        t.theta = l2.transpose().triangularView<Eigen::Upper>().solve(svd.matrixV().col(k));
        t.rho = svd.singularValues()[k];
        const double flip = fix_sign(t.b);
        t.theta *= flip;
        triples.push_back(std::move(t));
    }
    return triples;
}

std::vector<EigenPair> gsym_eig(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int m) {
    const Eigen::Index p = a.rows();
    if (a.cols() != p || b.rows() != p || b.cols() != p) {
        throw ValidationError("shape_mismatch", "gsym_eig: matrices must be square and conforming");
    }
    if (m < 1) throw ValidationError("bad_m", "gsym_eig: m must be positive");

    const Eigen::MatrixXd l = cholesky_with_jitter(b, "pencil metric");

    // C = L^{-1} A L^{-T}, symmetrized against roundoff
    Eigen::MatrixXd reduced = l.triangularView<Eigen::Lower>().solve(a);
    reduced = l.triangularView<Eigen::Lower>()
                  .solve(reduced.transpose())
                  .transpose()
                  .eval();
    reduced = 0.5 * (reduced + reduced.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eig_failed", "gsym_eig: symmetric eigensolver did not converge");
    }

    const int count = static_cast<int>(std::min<Eigen::Index>(m, p));
    std::vector<EigenPair> pairs;
    pairs.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const Eigen::Index idx = p - 1 - k;  // solver sorts ascending
        EigenPair pair;
        pair.vector = l.transpose().triangularView<Eigen::Upper>().solve(eig.eigenvectors().col(idx));
        pair.value = eig.eigenvalues()[idx];
        fix_sign(pair.vector);
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

}  // namespace ordifun
