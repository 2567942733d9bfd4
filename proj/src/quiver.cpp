#include "qmle/quiver.hpp"

#include <numeric>

namespace qmle {

namespace {

void require_nonzero(const DimVec2& beta) {
    if (beta.a == 0 && beta.b == 0)
        throw ZeroVectorError("dimension vector (0,0) is not a root");
    if (beta.a < 0 || beta.b < 0)
        throw std::invalid_argument("dimension vector entries must be nonnegative");
}

void require_arrow_count(int m) {
    if (m < 1) throw std::invalid_argument("quiver needs at least one arrow");
}

}  // namespace

long long euler_form(int m, const DimVec2& beta, const DimVec2& gamma) {
    require_arrow_count(m);
    return beta.a * gamma.a + beta.b * gamma.b - static_cast<long long>(m) * beta.b * gamma.a;
}

long long tits_form(int m, const DimVec2& beta) { return euler_form(m, beta, beta); }

RootClass classify_root(int m, const DimVec2& beta) {
    require_arrow_count(m);
    require_nonzero(beta);
    const long long q = tits_form(m, beta);
    if (q == 1) return RootClass::Real;
    if (q == 0) return RootClass::Isotropic;
    if (q < 0) return RootClass::ImaginaryNonIsotropic;
    return RootClass::NotRoot;
}

bool is_schur_root(int m, const DimVec2& beta) {
    require_arrow_count(m);
    require_nonzero(beta);
    const long long q = tits_form(m, beta);
    if (q < 0) return true;
    if (q > 1) return false;
    // Real and isotropic roots are Schur exactly when indivisible.
    return std::gcd(beta.a, beta.b) == 1;
}

Weight2 canonical_weight(long long p, long long q) {
    if (p < 1 || q < 1) throw std::invalid_argument("canonical_weight requires p,q >= 1");
    const long long d = std::gcd(p, q);
    return Weight2{-q / d, p / d};
}

long long weight_value(const Weight2& sigma, const DimVec2& beta) {
    return sigma.sx * beta.a + sigma.sy * beta.b;
}

const char* to_string(RootClass c) {
    switch (c) {
        case RootClass::Real: return "real";
        case RootClass::Isotropic: return "isotropic";
        case RootClass::ImaginaryNonIsotropic: return "imaginary";
        case RootClass::NotRoot: return "not_root";
    }
    return "?";
}

}  // namespace qmle
