#pragma once

#include <utility>
#include <vector>

#include "qmle/linalg.hpp"
#include "qmle/rep.hpp"

namespace qmle {

// Endomorphism algebra of a Kronecker-quiver representation: all pairs (A,B)
// with A*Y_i = Y_i*B for every i, computed over the tuple's field.
struct EndAlgebra {
    int dimension = 0;
    // Orthonormal (as vectors in pair space) basis; (A, B) with A p x p, B q x q.
    std::vector<std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd>> basis;
};

EndAlgebra end_algebra(const RepTuple& Y, const Tolerances& tols = default_tols());

// Dimension of the stabilizer Lie algebra inside sl_p x sl_q: endomorphism
// pairs with both traces zero. Zero together with polystability certifies a
// stable point.
int stabilizer_dimension(const RepTuple& Y, const Tolerances& tols = default_tols());

// Worst-case relative residual max_i ||A Y_i - Y_i B|| / ||Y||; diagnostic.
double endomorphism_residual(const RepTuple& Y, const Eigen::MatrixXcd& A,
                             const Eigen::MatrixXcd& B);

namespace detail {

// Nullspace basis of the intertwiner system for an explicit matrix list.
template <typename Scalar>
std::vector<std::pair<DenseMatrix<Scalar>, DenseMatrix<Scalar>>> end_basis(
    const std::vector<DenseMatrix<Scalar>>& mats, double rank_tol);

// Star-quiver variant: endomorphisms (A, b_1..b_q) with A*y_{ij} = b_j*y_{ij}
// for the j-th column y_{ij} of each sample. Returns pairs (A, diag-vector b).
template <typename Scalar>
std::vector<std::pair<DenseMatrix<Scalar>, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>>
star_end_basis(const std::vector<DenseMatrix<Scalar>>& mats, double rank_tol);

}  // namespace detail

}  // namespace qmle
