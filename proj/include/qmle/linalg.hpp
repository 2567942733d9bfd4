#pragma once

#include <Eigen/Dense>
#include <vector>

namespace qmle {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Numerical rank via singular values, threshold relative to sigma_max.
template <typename Scalar>
int numeric_rank(const DenseMatrix<Scalar>& A, double rel_tol) {
    if (A.rows() == 0 || A.cols() == 0) return 0;
    Eigen::JacobiSVD<DenseMatrix<Scalar>> svd(A);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0) return 0;
    const double thresh = rel_tol * sv(0);
    int r = 0;
    while (r < sv.size() && sv(r) > thresh) ++r;
    return r;
}

// Orthonormal basis of the kernel (columns). Empty kernel gives a cols x 0 matrix.
template <typename Scalar>
DenseMatrix<Scalar> nullspace(const DenseMatrix<Scalar>& A, double rel_tol) {
    const Eigen::Index n = A.cols();
    if (A.rows() == 0) return DenseMatrix<Scalar>::Identity(n, n);
    Eigen::JacobiSVD<DenseMatrix<Scalar>> svd(A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    int r = 0;
    if (smax > 0) {
        const double thresh = rel_tol * smax;
        while (r < sv.size() && sv(r) > thresh) ++r;
    }
    return svd.matrixV().rightCols(n - r);
}

// Orthonormal basis of the column space, rank decided by rel_tol (or forced).
template <typename Scalar>
DenseMatrix<Scalar> column_space(const DenseMatrix<Scalar>& A, double rel_tol,
                                 int forced_rank = -1) {
    if (A.cols() == 0 || A.rows() == 0) return DenseMatrix<Scalar>(A.rows(), 0);
    Eigen::JacobiSVD<DenseMatrix<Scalar>> svd(A, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    int r = forced_rank;
    if (r < 0) {
        const double smax = sv.size() > 0 ? sv(0) : 0.0;
        r = 0;
        if (smax > 0) {
            const double thresh = rel_tol * smax;
            while (r < sv.size() && sv(r) > thresh) ++r;
        }
    }
    r = std::min<int>(r, static_cast<int>(svd.matrixU().cols()));
    return svd.matrixU().leftCols(r);
}

// Extends the orthonormal columns of U to an orthonormal basis of the ambient
// space: returns [U | U_perp], square.
template <typename Scalar>
DenseMatrix<Scalar> complete_basis(const DenseMatrix<Scalar>& U) {
    const Eigen::Index n = U.rows();
    const Eigen::Index k = U.cols();
    if (k == n) return U;
    DenseMatrix<Scalar> full(n, n);
    full.leftCols(k) = U;
    // Project the identity off U and orthonormalize what is left.
    DenseMatrix<Scalar> resid = DenseMatrix<Scalar>::Identity(n, n) - U * U.adjoint();
    Eigen::JacobiSVD<DenseMatrix<Scalar>> svd(resid, Eigen::ComputeThinU);
    full.rightCols(n - k) = svd.matrixU().leftCols(n - k);
    return full;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    Eigen::MatrixXcd K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

}  // namespace qmle
