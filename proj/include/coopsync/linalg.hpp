#ifndef COOPSYNC_LINALG_HPP
#define COOPSYNC_LINALG_HPP

#include <Eigen/Dense>
#include <cmath>

#include "coopsync/errors.hpp"
#include "coopsync/types.hpp"

namespace coopsync {

inline constexpr double kConditionLimit = 1e12;

/// Projector onto the orthogonal complement of the column space of X,
/// I - X (X^H X)^-1 X^H, computed from a rank-revealing QR.
/// Throws SingularDesign when X is rank deficient.
inline CMatrix projector_complement(const CMatrix& x) {
    Eigen::ColPivHouseholderQR<CMatrix> qr(x);
    qr.setThreshold(1e-12);
    if (qr.rank() < x.cols()) throw SingularDesign("design matrix is rank deficient");
    const CMatrix q_thin =
        qr.householderQ() * CMatrix::Identity(x.rows(), x.cols());
    return CMatrix::Identity(x.rows(), x.rows()) - q_thin * q_thin.adjoint();
}

/// Least squares solve (X^H X)^-1 X^H y with the same rank guard.
inline CVector least_squares(const CMatrix& x, const CVector& y) {
    Eigen::ColPivHouseholderQR<CMatrix> qr(x);
    qr.setThreshold(1e-12);
    if (qr.rank() < x.cols()) throw SingularDesign("design matrix is rank deficient");
    return qr.solve(y);
}

/// Inverse of a Hermitian positive definite matrix through its eigen
/// decomposition. Throws NumericalDegeneracy when the matrix is not
/// positive definite or its condition number exceeds kConditionLimit.
inline CMatrix hermitian_inverse(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(a);
    const RVector& ev = eig.eigenvalues();
    const double emax = ev.maxCoeff();
    const double emin = ev.minCoeff();
    if (!(emin > 0.0) || emax / emin > kConditionLimit)
        throw NumericalDegeneracy("matrix is singular or too ill-conditioned");
    return eig.eigenvectors() * ev.cwiseInverse().asDiagonal() *
           eig.eigenvectors().adjoint();
}

/// Real symmetric positive definite inverse with the same guards.
inline RMatrix symmetric_inverse(const RMatrix& a) {
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(a);
    const RVector& ev = eig.eigenvalues();
    const double emax = ev.maxCoeff();
    const double emin = ev.minCoeff();
    if (!(emin > 0.0) || emax / emin > kConditionLimit)
        throw NumericalDegeneracy("matrix is singular or too ill-conditioned");
    return eig.eigenvectors() * ev.cwiseInverse().asDiagonal() *
           eig.eigenvectors().transpose();
}

/// Numerically stable sum: pairwise reduction in fixed index order.
inline double pairwise_sum(const double* data, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

}  // namespace coopsync

#endif  // COOPSYNC_LINALG_HPP
