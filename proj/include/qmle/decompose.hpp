#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmle/endomorphism.hpp"
#include "qmle/quiver.hpp"
#include "qmle/rep.hpp"

namespace qmle {

// Raised when the eigenvalue clustering that drives the splitting cannot be
// trusted (inter-cluster gaps at the clustering tolerance) or when repeated
// numeric-generic trials disagree.
struct AmbiguousSplit : std::runtime_error {
    explicit AmbiguousSplit(const std::string& what, double gap = -1.0)
        : std::runtime_error(what), min_gap(gap) {}
    double min_gap;
};

// Realization of a tuple as a direct sum: after the recorded basis change
// row_basis^{-1} * Y_i * col_basis every matrix is block diagonal with the
// listed block dimensions (in order).
struct SummandSplit {
    Field field = Field::Real;
    std::vector<DimVec2> dims;
    Eigen::MatrixXcd row_basis;  // p x p invertible
    Eigen::MatrixXcd col_basis;  // q x q invertible
};

// Splits Y into indecomposable summands over its field by sampling random
// endomorphisms and cutting along their eigenvalue clusters. Over the reals,
// conjugate eigenvalue pairs are clustered together so the split stays real.
SummandSplit decompose_representation(const RepTuple& Y, std::uint64_t rng_seed,
                                      const Tolerances& tols = default_tols());

// Multiset of summand dimensions, sorted; (dim, multiplicity).
std::vector<std::pair<DimVec2, int>> dim_multiset(const SummandSplit& split);

// Total off-block mass of row_basis^{-1} Y_i col_basis relative to its norm.
double off_block_mass(const RepTuple& Y, const SummandSplit& split);

// Star-quiver counterpart, used by the star canonical decomposition: summand
// dimension vectors (x-dimension, set of arms) of a tuple viewed as a
// representation of the star quiver with q one-dimensional arms.
std::vector<StarDimVec> star_decompose_dims(const RepTuple& Y, std::uint64_t rng_seed,
                                            const Tolerances& tols = default_tols());

}  // namespace qmle
