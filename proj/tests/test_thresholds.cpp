#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qmle/thresholds.hpp"

using namespace qmle;

namespace {

int strength(MnmOutcome o) {
    switch (o) {
        case MnmOutcome::LikelihoodUnbounded: return 0;
        case MnmOutcome::MleExistsNotAlmostSurelyUnique: return 1;
        case MnmOutcome::MleExistsUniqueAS: return 2;
    }
    return -1;
}

}  // namespace

TEST_CASE("matrix normal sample-size classification") {
    CHECK(classify_mnm(5, 4, 2).outcome == MnmOutcome::MleExistsUniqueAS);
    CHECK(classify_mnm(7, 4, 2).outcome == MnmOutcome::LikelihoodUnbounded);
    CHECK(classify_mnm(7, 4, 2).holds_for_all_inputs);
    CHECK(classify_mnm(6, 4, 2).outcome == MnmOutcome::MleExistsNotAlmostSurelyUnique);
    CHECK(classify_mnm(8, 4, 2).outcome == MnmOutcome::MleExistsNotAlmostSurelyUnique);
    CHECK(classify_mnm(2, 2, 3).outcome == MnmOutcome::MleExistsUniqueAS);
}

TEST_CASE("the (2,2,2) real anomaly is flagged, and only there") {
    const auto v = classify_mnm(2, 2, 2);
    CHECK(v.indeterminate_real_case);
    CHECK(v.outcome == MnmOutcome::MleExistsNotAlmostSurelyUnique);
    for (long long p = 1; p <= 6; ++p)
        for (long long q = 1; q <= 6; ++q)
            for (long long m = 1; m <= 6; ++m)
                if (!(p == 2 && q == 2 && m == 2))
                    CHECK_FALSE(classify_mnm(p, q, m).indeterminate_real_case);
}

TEST_CASE("matrix normal thresholds") {
    CHECK(thresholds_mnm(1, 1) == ThresholdReport{1, 1, 1, 1, 1, Model::MatrixNormal});
    CHECK(thresholds_mnm(3, 3) == ThresholdReport{3, 3, 1, 1, 3, Model::MatrixNormal});
    CHECK(thresholds_mnm(6, 4) == ThresholdReport{6, 4, 2, 2, 3, Model::MatrixNormal});
    CHECK(thresholds_mnm(4, 7) == ThresholdReport{4, 7, 3, 3, 3, Model::MatrixNormal});
}

TEST_CASE("thresholds are symmetric and satisfy mlt_b = mlt_e <= mlt_u") {
    for (long long p = 1; p <= 30; ++p)
        for (long long q = 1; q <= 30; ++q) {
            const auto r = thresholds_mnm(p, q);
            const auto rt = thresholds_mnm(q, p);
            CHECK(r.mlt_b == rt.mlt_b);
            CHECK(r.mlt_e == rt.mlt_e);
            CHECK(r.mlt_u == rt.mlt_u);
            CHECK(r.mlt_b == r.mlt_e);
            CHECK(r.mlt_e <= r.mlt_u);
        }
}

TEST_CASE("classification is consistent with the thresholds") {
    for (long long p = 1; p <= 20; ++p)
        for (long long q = 1; q <= 20; ++q) {
            const auto r = thresholds_mnm(p, q);
            int prev = -1;
            for (long long m = 1; m <= 2 * std::max(p, q); ++m) {
                const auto v = classify_mnm(p, q, m);
                CHECK((v.outcome == MnmOutcome::LikelihoodUnbounded) == (m < r.mlt_b));
                CHECK((v.outcome == MnmOutcome::MleExistsUniqueAS) == (m >= r.mlt_u));
                CHECK(strength(v.outcome) >= prev);
                prev = strength(v.outcome);
            }
        }
}

TEST_CASE("proportional covariance classification") {
    CHECK(classify_propcov(3, 2, 1).outcome == MnmOutcome::LikelihoodUnbounded);
    CHECK(classify_propcov(3, 2, 1).holds_for_all_inputs);
    CHECK(classify_propcov(2, 2, 1).outcome == MnmOutcome::MleExistsNotAlmostSurelyUnique);
    CHECK(classify_propcov(2, 2, 2).outcome == MnmOutcome::MleExistsUniqueAS);
}

TEST_CASE("proportional covariance thresholds") {
    CHECK(thresholds_propcov(6, 3) ==
          ThresholdReport{6, 3, 2, 2, 3, Model::ProportionalCovariance});
    CHECK(thresholds_propcov(5, 1) ==
          ThresholdReport{5, 1, 5, 5, 5, Model::ProportionalCovariance});
    CHECK(thresholds_propcov(7, 3) ==
          ThresholdReport{7, 3, 3, 3, 3, Model::ProportionalCovariance});
}

TEST_CASE("proportional covariance classification matches its thresholds") {
    for (long long p = 1; p <= 20; ++p)
        for (long long q = 1; q <= 20; ++q) {
            const auto r = thresholds_propcov(p, q);
            CHECK(r.mlt_b == r.mlt_e);
            CHECK(r.mlt_e <= r.mlt_u);
            int prev = -1;
            for (long long m = 1; m <= 2 * std::max(p, q); ++m) {
                const auto v = classify_propcov(p, q, m);
                CHECK((v.outcome == MnmOutcome::LikelihoodUnbounded) == (m < r.mlt_b));
                CHECK((v.outcome == MnmOutcome::MleExistsUniqueAS) == (m >= r.mlt_u));
                CHECK(strength(v.outcome) >= prev);
                prev = strength(v.outcome);
            }
        }
}
