#include "qmle/candec.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace qmle {

namespace {

std::vector<std::pair<DimVec2, int>> to_multiset(const std::vector<DimVec2>& dims) {
    std::map<DimVec2, int> counts;
    for (const auto& d : dims) counts[d]++;
    return {counts.begin(), counts.end()};
}

std::vector<std::pair<StarDimVec, int>> to_multiset(const std::vector<StarDimVec>& dims) {
    std::map<StarDimVec, int> counts;
    for (const auto& d : dims) counts[d]++;
    return {counts.begin(), counts.end()};
}

}  // namespace

CanDec candec_kronecker(int m, long long p, long long q, std::uint64_t seed,
                        const Tolerances& tols) {
    if (m < 1 || p < 1 || q < 1)
        throw std::invalid_argument("candec_kronecker requires m,p,q >= 1");
    CanDec out;
    out.m = m;
    out.p = p;
    out.q = q;

    const long long d = std::gcd(p, q);
    const long long disc = p * p + q * q - m * p * q;

    if (disc < 0) {
        out.summands = {{DimVec2{p, q}, 1}};
        out.exactness = Exactness::Exact;
        return out;
    }
    if (disc == 0 || disc == d * d) {
        out.summands = {{DimVec2{p / d, q / d}, static_cast<int>(d)}};
        out.exactness = Exactness::Exact;
        return out;
    }

    // Generic representations decide the remaining case; require kNumericTrials
    // independent samples to agree on the dimension multiset.
    out.exactness = Exactness::NumericGeneric;
    std::vector<std::pair<DimVec2, int>> agreed;
    for (int trial = 0; trial < kNumericTrials; ++trial) {
        const auto Y = sample_gaussian(static_cast<int>(p), static_cast<int>(q), m,
                                       Field::Complex, derive_seed(seed, {7u, (std::uint64_t)trial}));
        const auto split = decompose_representation(Y, derive_seed(seed, {11u, (std::uint64_t)trial}), tols);
        auto ms = dim_multiset(split);
        if (trial == 0) {
            agreed = std::move(ms);
        } else if (ms != agreed) {
            throw AmbiguousSplit("generic samples disagree on the canonical decomposition");
        }
    }
    out.summands = std::move(agreed);
    out.confidence = kNumericTrials;
    return out;
}

CanDec scale_candec(int m, const CanDec& base, int k) {
    if (k < 1) throw std::invalid_argument("scale_candec requires k >= 1");
    CanDec out;
    out.m = m;
    out.p = base.p * k;
    out.q = base.q * k;
    out.exactness = base.exactness;
    out.confidence = base.confidence;

    std::map<DimVec2, int> counts;
    for (const auto& [beta, mult] : base.summands) {
        if (!is_schur_root(m, beta))
            throw InvalidCanDec("canonical decomposition summand is not a Schur root");
        const RootClass cls = classify_root(m, beta);
        if (cls == RootClass::Real || cls == RootClass::Isotropic)
            counts[beta] += mult * k;
        else
            counts[DimVec2{beta.a * k, beta.b * k}] += mult;
    }
    out.summands.assign(counts.begin(), counts.end());
    return out;
}

StarCanDec candec_star(long long p, long long q, int m, std::uint64_t seed,
                       const Tolerances& tols) {
    if (m < 1 || p < 1 || q < 1)
        throw std::invalid_argument("candec_star requires m,p,q >= 1");
    StarCanDec out;
    out.m = m;
    out.p = p;
    out.q = q;

    const long long mq = static_cast<long long>(m) * q;
    if (mq == p) {
        for (int j = 0; j < q; ++j) {
            StarDimVec s;
            s.x = m;
            s.arms.assign(q, 0);
            s.arms[j] = 1;
            out.summands.push_back({std::move(s), 1});
        }
        out.exactness = Exactness::Exact;
        return out;
    }
    if (mq > p) {
        StarDimVec s;
        s.x = p;
        s.arms.assign(q, 1);
        out.summands = {{std::move(s), 1}};
        out.exactness = Exactness::Exact;
        return out;
    }

    out.exactness = Exactness::NumericGeneric;
    std::vector<std::pair<StarDimVec, int>> agreed;
    for (int trial = 0; trial < kNumericTrials; ++trial) {
        const auto Y = sample_gaussian(static_cast<int>(p), static_cast<int>(q), m,
                                       Field::Complex, derive_seed(seed, {13u, (std::uint64_t)trial}));
        auto dims = star_decompose_dims(Y, derive_seed(seed, {17u, (std::uint64_t)trial}), tols);
        auto ms = to_multiset(dims);
        if (trial == 0) {
            agreed = std::move(ms);
        } else if (ms != agreed) {
            throw AmbiguousSplit("generic samples disagree on the star canonical decomposition");
        }
    }
    out.summands = std::move(agreed);
    out.confidence = kNumericTrials;
    return out;
}

}  // namespace qmle
