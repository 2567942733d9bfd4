#include "qmle/thresholds.hpp"

#include <numeric>
#include <stdexcept>

namespace qmle {

namespace {

void require_positive(long long p, long long q, long long m = 1) {
    if (p < 1 || q < 1 || m < 1)
        throw std::invalid_argument("p, q and m must be positive");
}

}  // namespace

MnmVerdict classify_mnm(long long p, long long q, long long m) {
    require_positive(p, q, m);
    const long long d = std::gcd(p, q);
    const long long disc = p * p + q * q - m * p * q;

    MnmVerdict v;
    if (disc < 0) {
        v.outcome = MnmOutcome::MleExistsUniqueAS;
    } else if (disc == 0 || disc == d * d) {
        v.outcome = (d == 1) ? MnmOutcome::MleExistsUniqueAS
                             : MnmOutcome::MleExistsNotAlmostSurelyUnique;
        if (p == 2 && q == 2 && m == 2) v.indeterminate_real_case = true;
    } else {
        v.outcome = MnmOutcome::LikelihoodUnbounded;
        v.holds_for_all_inputs = true;
    }
    return v;
}

ThresholdReport thresholds_mnm(long long p, long long q) {
    require_positive(p, q);
    ThresholdReport rep;
    rep.p = p;
    rep.q = q;
    rep.model = Model::MatrixNormal;

    if (p == q) {
        rep.mlt_b = rep.mlt_e = 1;
        rep.mlt_u = (p == 1) ? 1 : 3;
        return rep;
    }

    const long long d = std::gcd(p, q);
    const long long num = p * p + q * q - d * d;
    if (num % (p * q) == 0) {
        const long long r = num / (p * q);
        rep.mlt_b = rep.mlt_e = r;
        rep.mlt_u = (d == 1) ? r : r + 1;
    } else {
        // ceil((p^2+q^2)/(pq))
        const long long s = p * p + q * q;
        rep.mlt_b = rep.mlt_e = rep.mlt_u = (s + p * q - 1) / (p * q);
    }
    return rep;
}

MnmVerdict classify_propcov(long long p, long long q, long long m) {
    require_positive(p, q, m);
    MnmVerdict v;
    if (m * q < p) {
        v.outcome = MnmOutcome::LikelihoodUnbounded;
        v.holds_for_all_inputs = true;  // every sample, not just almost every
    } else if (m * q == p) {
        v.outcome = (q == 1) ? MnmOutcome::MleExistsUniqueAS
                             : MnmOutcome::MleExistsNotAlmostSurelyUnique;
    } else {
        v.outcome = MnmOutcome::MleExistsUniqueAS;
    }
    return v;
}

ThresholdReport thresholds_propcov(long long p, long long q) {
    require_positive(p, q);
    ThresholdReport rep;
    rep.p = p;
    rep.q = q;
    rep.model = Model::ProportionalCovariance;

    if (p % q == 0) {
        const long long r = p / q;
        rep.mlt_b = rep.mlt_e = r;
        rep.mlt_u = (q == 1) ? r : r + 1;
    } else {
        rep.mlt_b = rep.mlt_e = rep.mlt_u = (p + q - 1) / q;
    }
    return rep;
}

const char* to_string(MnmOutcome o) {
    switch (o) {
        case MnmOutcome::LikelihoodUnbounded: return "unbounded";
        case MnmOutcome::MleExistsNotAlmostSurelyUnique: return "exists_not_unique";
        case MnmOutcome::MleExistsUniqueAS: return "exists_unique";
    }
    return "?";
}

const char* to_string(Model m) {
    return m == Model::MatrixNormal ? "mnm" : "propcov";
}

}  // namespace qmle
