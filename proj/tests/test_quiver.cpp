#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "qmle/quiver.hpp"

using namespace qmle;

TEST_CASE("euler form on the m-Kronecker quiver") {
    CHECK(euler_form(2, {1, 2}, {1, 2}) == 1);
    CHECK(euler_form(2, {1, 1}, {1, 1}) == 0);
    CHECK(euler_form(3, {1, 1}, {1, 1}) == -1);
    CHECK_THROWS_AS(euler_form(0, {1, 1}, {1, 1}), std::invalid_argument);
}

TEST_CASE("euler form is additive in each argument") {
    std::mt19937_64 eng(7);
    std::uniform_int_distribution<long long> u(0, 9);
    std::uniform_int_distribution<int> um(1, 5);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = um(eng);
        const DimVec2 b1{u(eng), u(eng)}, b2{u(eng), u(eng)}, g{u(eng), u(eng)};
        CHECK(euler_form(m, {b1.a + b2.a, b1.b + b2.b}, g) ==
              euler_form(m, b1, g) + euler_form(m, b2, g));
        CHECK(euler_form(m, g, {b1.a + b2.a, b1.b + b2.b}) ==
              euler_form(m, g, b1) + euler_form(m, g, b2));
    }
}

TEST_CASE("root classification") {
    CHECK(classify_root(2, {2, 3}) == RootClass::Real);
    CHECK(classify_root(2, {3, 3}) == RootClass::Isotropic);
    CHECK(classify_root(2, {1, 3}) == RootClass::NotRoot);
    CHECK(classify_root(3, {1, 1}) == RootClass::ImaginaryNonIsotropic);
    CHECK_THROWS_AS(classify_root(2, {0, 0}), ZeroVectorError);
}

TEST_CASE("root classification is symmetric in the two coordinates") {
    for (int m = 1; m <= 4; ++m)
        for (long long a = 0; a <= 6; ++a)
            for (long long b = 0; b <= 6; ++b) {
                if (a == 0 && b == 0) continue;
                CHECK(classify_root(m, {a, b}) == classify_root(m, {b, a}));
            }
}

TEST_CASE("Schur roots") {
    CHECK(is_schur_root(2, {2, 3}));        // real root
    CHECK_FALSE(is_schur_root(2, {2, 2}));  // divisible isotropic
    CHECK(is_schur_root(3, {2, 2}));        // imaginary
    CHECK_THROWS_AS(is_schur_root(2, {0, 0}), ZeroVectorError);
}

TEST_CASE("real and isotropic roots are Schur exactly when indivisible") {
    for (int m = 1; m <= 4; ++m)
        for (long long a = 0; a <= 8; ++a)
            for (long long b = 0; b <= 8; ++b) {
                if (a == 0 && b == 0) continue;
                const RootClass c = classify_root(m, {a, b});
                if (c == RootClass::Real || c == RootClass::Isotropic)
                    CHECK(is_schur_root(m, {a, b}) == (std::gcd(a, b) == 1));
            }
}

TEST_CASE("canonical weight") {
    CHECK(canonical_weight(4, 7) == Weight2{-7, 4});
    CHECK(canonical_weight(6, 4) == Weight2{-2, 3});
    CHECK(weight_value(Weight2{-7, 4}, {4, 7}) == 0);

    for (long long p = 1; p <= 12; ++p)
        for (long long q = 1; q <= 12; ++q) {
            const Weight2 s = canonical_weight(p, q);
            CHECK(std::gcd(-s.sx, s.sy) == 1);
            for (long long k = 0; k <= 3; ++k)
                CHECK(weight_value(s, {k * p, k * q}) == 0);
        }
}
