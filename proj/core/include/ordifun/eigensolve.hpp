#pragma once

#include <Eigen/Core>
#include <vector>

namespace ordifun {

/// One canonical direction pair: b^T S1 b = theta^T S2 theta = 1 under the
/// metrics supplied at solve time, with correlation value rho.
struct CanonicalTriple {
    Eigen::VectorXd b;
    Eigen::VectorXd theta;
    double rho = 0.0;
};

/// Canonical correlation directions of the cross matrix c12 under SPD metrics
/// s1 (left) and s2 (right), computed by Cholesky whitening and SVD:
/// with L1 L1^T = s1, L2 L2^T = s2 and M = L1^{-1} c12 L2^{-T} = U Sigma V^T,
/// b_k = L1^{-T} u_k, theta_k = L2^{-T} v_k, rho_k = sigma_k.
///
/// Returns min(m, rows, cols) triples, rho nonincreasing. The first nonzero
/// entry of each b_k is made positive (theta flips with it). Nearly singular
/// metrics get an escalating diagonal jitter; if the Cholesky still fails a
/// NumericalError is thrown.
std::vector<CanonicalTriple> cca_svd(const Eigen::MatrixXd& c12, const Eigen::MatrixXd& s1,
                                     const Eigen::MatrixXd& s2, int m);

struct EigenPair {
    Eigen::VectorXd vector;
    double value = 0.0;
};

/// Leading solutions of the symmetric-definite pencil A v = value * B v with
/// A symmetric PSD and B symmetric PD (after jitter), via Cholesky reduction
/// to an ordinary symmetric eigenproblem. Vectors satisfy v^T B v = 1, values
/// are nonincreasing, and the first-nonzero-entry sign convention applies.
std::vector<EigenPair> gsym_eig(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int m);

/// Lower Cholesky factor of a symmetric matrix, retrying with diagonal jitter
/// eps * trace(s)/p * I for eps in {1e-12, ..., 1e-8} when the plain
/// factorization fails. Throws NumericalError after the last attempt.
Eigen::MatrixXd cholesky_with_jitter(Eigen::MatrixXd s, const char* label);

/// Flip sign so the first entry larger than 1e-12 in magnitude is positive.
/// Returns +1 or -1 (the factor applied).
double fix_sign(Eigen::VectorXd& v);

}  // namespace ordifun
