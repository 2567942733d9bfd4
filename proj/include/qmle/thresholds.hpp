#pragma once

#include <string>

#include "qmle/quiver.hpp"

// Exact sample-size classification and maximum-likelihood threshold functions
// for the matrix normal model M(p,q) and the proportional-covariance model
// N(p,q). All integer arithmetic.

namespace qmle {

enum class Model { MatrixNormal, ProportionalCovariance };

enum class MnmOutcome {
    LikelihoodUnbounded,
    MleExistsNotAlmostSurelyUnique,
    MleExistsUniqueAS,
};

struct MnmVerdict {
    MnmOutcome outcome = MnmOutcome::LikelihoodUnbounded;
    // Only for (p,q,m) = (2,2,2) over the reals: an MLE exists a.s. and is not
    // almost surely unique, but the unique-MLE set is full-dimensional, so
    // per-sample assertions about non-uniqueness are unsafe.
    bool indeterminate_real_case = false;
    // The unbounded cases hold for every sample, not just almost surely.
    bool holds_for_all_inputs = false;

    friend bool operator==(const MnmVerdict&, const MnmVerdict&) = default;
};

struct ThresholdReport {
    long long p = 0;
    long long q = 0;
    long long mlt_b = 0;  // bounded log-likelihood
    long long mlt_e = 0;  // MLE existence
    long long mlt_u = 0;  // MLE uniqueness
    Model model = Model::MatrixNormal;

    friend bool operator==(const ThresholdReport&, const ThresholdReport&) = default;
};

// Sample-size classification for M(p,q) with m samples, via the sign of
// p^2 + q^2 - mpq against {0, gcd(p,q)^2}.
MnmVerdict classify_mnm(long long p, long long q, long long m);

// The three thresholds for M(p,q).
ThresholdReport thresholds_mnm(long long p, long long q);

// Sample-size classification for N(p,q): compares mq against p.
MnmVerdict classify_propcov(long long p, long long q, long long m);

// The three thresholds for N(p,q), driven by r = p/q.
ThresholdReport thresholds_propcov(long long p, long long q);

const char* to_string(MnmOutcome o);
const char* to_string(Model m);

}  // namespace qmle
