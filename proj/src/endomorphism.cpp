#include "qmle/endomorphism.hpp"

#include "qmle/linalg.hpp"

namespace qmle {

namespace detail {

template <typename Scalar>
std::vector<std::pair<DenseMatrix<Scalar>, DenseMatrix<Scalar>>> end_basis(
    const std::vector<DenseMatrix<Scalar>>& mats, double rank_tol) {
    const int m = static_cast<int>(mats.size());
    const int p = static_cast<int>(mats[0].rows());
    const int q = static_cast<int>(mats[0].cols());
    const int nvar = p * p + q * q;

    // (A Y_i - Y_i B)(r,c) = 0; unknowns vec(A) then vec(B), column-major.
    DenseMatrix<Scalar> sys = DenseMatrix<Scalar>::Zero(m * p * q, nvar);
    int row = 0;
    for (int i = 0; i < m; ++i) {
        const auto& Y = mats[i];
        for (int c = 0; c < q; ++c) {
            for (int r = 0; r < p; ++r) {
                for (int k = 0; k < p; ++k) sys(row, k * p + r) = Y(k, c);
                for (int l = 0; l < q; ++l) sys(row, p * p + c * q + l) -= Y(r, l);
                ++row;
            }
        }
    }

    DenseMatrix<Scalar> ker = nullspace<Scalar>(sys, rank_tol);
    std::vector<std::pair<DenseMatrix<Scalar>, DenseMatrix<Scalar>>> basis;
    basis.reserve(ker.cols());
    for (Eigen::Index j = 0; j < ker.cols(); ++j) {
        DenseMatrix<Scalar> A =
            Eigen::Map<const DenseMatrix<Scalar>>(ker.col(j).data(), p, p);
        DenseMatrix<Scalar> B =
            Eigen::Map<const DenseMatrix<Scalar>>(ker.col(j).data() + p * p, q, q);
        basis.emplace_back(std::move(A), std::move(B));
    }
    return basis;
}

template std::vector<std::pair<DenseMatrix<double>, DenseMatrix<double>>> end_basis(
    const std::vector<DenseMatrix<double>>&, double);
template std::vector<std::pair<DenseMatrix<complexd>, DenseMatrix<complexd>>> end_basis(
    const std::vector<DenseMatrix<complexd>>&, double);

template <typename Scalar>
std::vector<std::pair<DenseMatrix<Scalar>, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>>
star_end_basis(const std::vector<DenseMatrix<Scalar>>& mats, double rank_tol) {
    const int m = static_cast<int>(mats.size());
    const int p = static_cast<int>(mats[0].rows());
    const int q = static_cast<int>(mats[0].cols());
    const int nvar = p * p + q;

    // A*y_{ij} - b_j*y_{ij} = 0 for every arm j and arrow i.
    DenseMatrix<Scalar> sys = DenseMatrix<Scalar>::Zero(m * q * p, nvar);
    int row = 0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < q; ++j) {
            for (int r = 0; r < p; ++r) {
                for (int k = 0; k < p; ++k) sys(row, k * p + r) = mats[i](k, j);
                sys(row, p * p + j) = -mats[i](r, j);
                ++row;
            }
        }
    }

    DenseMatrix<Scalar> ker = nullspace<Scalar>(sys, rank_tol);
    std::vector<std::pair<DenseMatrix<Scalar>, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>> basis;
    basis.reserve(ker.cols());
    for (Eigen::Index j = 0; j < ker.cols(); ++j) {
        DenseMatrix<Scalar> A =
            Eigen::Map<const DenseMatrix<Scalar>>(ker.col(j).data(), p, p);
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b =
            Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(
                ker.col(j).data() + p * p, q);
        basis.emplace_back(std::move(A), std::move(b));
    }
    return basis;
}

template std::vector<std::pair<DenseMatrix<double>, Eigen::VectorXd>> star_end_basis(
    const std::vector<DenseMatrix<double>>&, double);
template std::vector<std::pair<DenseMatrix<complexd>, Eigen::VectorXcd>> star_end_basis(
    const std::vector<DenseMatrix<complexd>>&, double);

}  // namespace detail

EndAlgebra end_algebra(const RepTuple& Y, const Tolerances& tols) {
    if (!Y.well_formed()) throw std::invalid_argument("end_algebra: malformed tuple");
    EndAlgebra out;
    if (Y.field == Field::Real) {
        auto basis = detail::end_basis<double>(Y.real_matrices(), tols.rank);
        for (auto& [A, B] : basis)
            out.basis.emplace_back(A.cast<complexd>(), B.cast<complexd>());
    } else {
        auto basis = detail::end_basis<complexd>(
            std::vector<Eigen::MatrixXcd>(Y.matrices.begin(), Y.matrices.end()), tols.rank);
        for (auto& [A, B] : basis) out.basis.emplace_back(std::move(A), std::move(B));
    }
    out.dimension = static_cast<int>(out.basis.size());
    return out;
}

int stabilizer_dimension(const RepTuple& Y, const Tolerances& tols) {
    const EndAlgebra alg = end_algebra(Y, tols);
    if (alg.dimension == 0) return 0;
    // Rank of the two trace functionals restricted to End(Y).
    Eigen::MatrixXcd traces(2, alg.dimension);
    for (int j = 0; j < alg.dimension; ++j) {
        traces(0, j) = alg.basis[j].first.trace();
        traces(1, j) = alg.basis[j].second.trace();
    }
    return alg.dimension - numeric_rank<complexd>(traces, tols.rank);
}

double endomorphism_residual(const RepTuple& Y, const Eigen::MatrixXcd& A,
                             const Eigen::MatrixXcd& B) {
    double worst = 0;
    const double scale = Y.norm();
    for (const auto& M : Y.matrices)
        worst = std::max(worst, (A * M - M * B).norm());
    return scale > 0 ? worst / scale : worst;
}

}  // namespace qmle
