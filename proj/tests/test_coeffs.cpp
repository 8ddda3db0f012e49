#include <catch2/catch_amalgamated.hpp>

#include "symten/boundary_coeffs.hpp"

#include <random>

using namespace symten;

TEST_CASE("even chain coefficients match the worked m=4 example", "[coeffs]") {
    REQUIRE(a_coeff(3, 4, 0, 0) == Rational(1, 100));
    REQUIRE(a_coeff(3, 4, 1, 0) == Rational(-1, 96));
    REQUIRE(a_coeff(3, 4, 1, 1) == Rational(1, 4800));
}

TEST_CASE("coefficient indices are validated", "[coeffs]") {
    REQUIRE_THROWS_AS(a_coeff(3, 2, 3, 0), std::out_of_range); // s > m
    REQUIRE_THROWS_AS(a_coeff(3, 2, 1, 2), std::out_of_range); // k > s
    REQUIRE_THROWS_AS(b_coeff(3, 2, 0, -1), std::out_of_range);
    REQUIRE_THROWS_AS(a_coeff(1, 2, 0, 0), std::out_of_range); // n < 2
    REQUIRE_THROWS_AS(ap_coeff(3, 2, -1, 0), std::out_of_range);
    REQUIRE_THROWS_AS(ap_coeff(3, 2, 5, 0), std::out_of_range); // l > 2m
    REQUIRE_THROWS_AS(bp_coeff(2, 5, 0), std::out_of_range);
}

TEST_CASE("closed forms reproduce their defining recurrences", "[coeffs]") {
    for (int n = 2; n <= 5; ++n)
        for (int m = 0; m <= 5; ++m) {
            CAPTURE(n, m);
            REQUIRE(coeff_table_a(n, m, CoeffSource::ClosedForm).vals ==
                    coeff_table_a(n, m, CoeffSource::Recurrence).vals);
            REQUIRE(coeff_table_b(n, m, CoeffSource::ClosedForm).vals ==
                    coeff_table_b(n, m, CoeffSource::Recurrence).vals);
        }
}

TEST_CASE("three-term sum rules hold, and only with the corrected denominator", "[coeffs]") {
    for (int n = 2; n <= 5; ++n)
        for (int m = 0; m <= 5; ++m) {
            CAPTURE(n, m);
            REQUIRE(verify_identity_535(n, m));
            REQUIRE(verify_identity_536(n, m));
            if (m >= 1) REQUIRE_FALSE(identity_536_printed_variant(n, m));
        }
}

TEST_CASE("ladder routes agree on a non-flat exact metric", "[coeffs]") {
    std::mt19937_64 rng(99);
    auto rnd = [&] {
        return Rational(static_cast<long long>(rng() % 19) - 9,
                        static_cast<long long>(1 + rng() % 7));
    };

    Mat<Rational> gm(3, std::vector<Rational>(3, Rational(0)));
    gm[0][0] = 1;
    gm[1][1] = 2;
    gm[2][2] = 3;
    gm[0][1] = gm[1][0] = Rational(1, 2);
    const MetricPoint<Rational> g(gm);

    const int n = 4, m = 2;
    SymTensor<Rational> u2m(3, 2 * m), u2m1(3, 2 * m + 1);
    for (int t = 0; t < u2m.size(); ++t) u2m[t] = rnd();
    for (int t = 0; t < u2m1.size(); ++t) u2m1[t] = rnd();

    const auto v = normal_derivative_tensors(u2m, u2m1, g, n, m);
    const auto w = normal_derivative_tensors_recursive(u2m, u2m1, g, n, m);
    REQUIRE(v.size() == static_cast<std::size_t>(2 * m + 2));
    REQUIRE(w.size() == v.size());
    for (std::size_t s = 0; s < v.size(); ++s) {
        CAPTURE(s);
        REQUIRE((v[s] - w[s]).is_zero());
    }

    // the ladder repeats the trace chain of its seeds
    for (int s = 0; s <= m - 1; ++s) {
        REQUIRE((v[2 * s] + trace(v[2 * s + 2], g)).is_zero());
        REQUIRE((v[2 * s + 1] + trace(v[2 * s + 3], g)).is_zero());
    }
}

TEST_CASE("ladder rejects mismatched ranks", "[coeffs]") {
    const MetricPoint<Rational> g = MetricPoint<Rational>::euclidean(2);
    SymTensor<Rational> a(2, 2), b(2, 2);
    REQUIRE_THROWS_AS(normal_derivative_tensors(a, b, g, 3, 1), std::invalid_argument);
}

TEST_CASE("reduction coefficients vanish exactly outside their windows", "[coeffs]") {
    for (int m = 1; m <= 5; ++m)
        for (int l = 0; l <= 2 * m; ++l) {
            const auto [a_lo, a_hi] = ap_support(m, l);
            const auto [b_lo, b_hi] = bp_support(m, l);
            for (int p = -2; p <= 2 * m + 2; ++p) {
                CAPTURE(m, l, p);
                if (p < a_lo || p > a_hi) {
                    REQUIRE(ap_coeff(3, m, l, p) == 0);
                    REQUIRE(ap_coeff(5, m, l, p) == 0);
                }
                if (p < b_lo || p > b_hi) REQUIRE(bp_coeff(m, l, p) == 0);
            }
            if (a_lo <= a_hi) {
                REQUIRE(ap_coeff(3, m, l, a_lo) != 0);
                REQUIRE(ap_coeff(3, m, l, a_hi) != 0);
            }
        }
}

TEST_CASE("zero-convention binomial", "[coeffs]") {
    REQUIRE(binom_z(5, 2) == 10);
    REQUIRE(binom_z(5, 0) == 1);
    REQUIRE(binom_z(3, 5) == 0);
    REQUIRE(binom_z(3, -1) == 0);
}
