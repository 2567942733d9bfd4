#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qmle/decompose.hpp"
#include "qmle/quiver.hpp"
#include "qmle/rep.hpp"

namespace qmle {

enum class Exactness { Exact, NumericGeneric };

struct InvalidCanDec : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Canonical decomposition of a dimension vector: the summand dimensions of a
// generic representation, with multiplicities.
struct CanDec {
    int m = 1;
    long long p = 0, q = 0;
    std::vector<std::pair<DimVec2, int>> summands;  // sorted (dim, multiplicity)
    Exactness exactness = Exactness::Exact;
    int confidence = 0;  // agreeing numeric trials when NumericGeneric
};

struct StarCanDec {
    int m = 1;
    long long p = 0, q = 0;
    std::vector<std::pair<StarDimVec, int>> summands;
    Exactness exactness = Exactness::Exact;
    int confidence = 0;
};

// Canonical decomposition of (p,q) for the m-Kronecker quiver. The three
// closed-form cases (discriminant p^2+q^2-mpq negative, zero, or equal to
// gcd^2) are exact; otherwise the result is established numerically from
// generic samples and tagged NumericGeneric.
CanDec candec_kronecker(int m, long long p, long long q,
                        std::uint64_t seed = kDefaultSeed,
                        const Tolerances& tols = default_tols());

// Schofield scaling: the canonical decomposition of k*alpha given the one of
// alpha. Real/isotropic Schur summands multiply their multiplicity, imaginary
// ones scale their dimension vector.
CanDec scale_candec(int m, const CanDec& base, int k);

// Canonical decomposition of (p,1,...,1) on the star quiver with q arms and m
// arrows per arm: arm summands when mq = p, indecomposable when mq > p,
// numeric-generic otherwise.
StarCanDec candec_star(long long p, long long q, int m,
                       std::uint64_t seed = kDefaultSeed,
                       const Tolerances& tols = default_tols());

// Number of numeric trials that must agree before a NumericGeneric result is
// reported.
inline constexpr int kNumericTrials = 5;

}  // namespace qmle
