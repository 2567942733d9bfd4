#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

// Integer combinatorics of the m-Kronecker quiver (two vertices x, y with m
// arrows y -> x) and the star quiver (one sink x, q arms, m arrows per arm).
// Everything here is exact integer arithmetic.

namespace qmle {

struct DimVec2 {
    long long a = 0;  // dimension at the sink vertex x (rows)
    long long b = 0;  // dimension at the source vertex y (columns)

    friend bool operator==(const DimVec2&, const DimVec2&) = default;
    friend auto operator<=>(const DimVec2&, const DimVec2&) = default;
};

struct Weight2 {
    long long sx = 0;
    long long sy = 0;

    friend bool operator==(const Weight2&, const Weight2&) = default;
};

// Dimension vector for the star quiver: x-coordinate plus one entry per arm.
struct StarDimVec {
    long long x = 0;
    std::vector<int> arms;  // entries in {0,1} for the dimension vectors used here

    friend bool operator==(const StarDimVec&, const StarDimVec&) = default;
    friend auto operator<=>(const StarDimVec&, const StarDimVec&) = default;
};

enum class RootClass { Real, Isotropic, ImaginaryNonIsotropic, NotRoot };

struct ZeroVectorError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Euler form of the m-Kronecker quiver: <beta,gamma> = b.a*g.a + b.b*g.b - m*b.b*g.a.
long long euler_form(int m, const DimVec2& beta, const DimVec2& gamma);

// Tits form q(beta) = <beta,beta>.
long long tits_form(int m, const DimVec2& beta);

// Classifies beta by the sign of q(beta): 1 real, 0 isotropic, <0 imaginary,
// >1 not a root. Rejects beta = (0,0).
RootClass classify_root(int m, const DimVec2& beta);

// True iff the generic representation of dimension beta is indecomposable:
// q(beta) < 0, or q(beta) in {0,1} with gcd(beta.a, beta.b) = 1.
bool is_schur_root(int m, const DimVec2& beta);

// The unique (up to positive scaling) effective weight for dimension (p,q):
// sigma = (-q/d, p/d) with d = gcd(p,q).
Weight2 canonical_weight(long long p, long long q);

long long weight_value(const Weight2& sigma, const DimVec2& beta);

const char* to_string(RootClass c);

}  // namespace qmle
