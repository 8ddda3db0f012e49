#include <catch2/catch_amalgamated.hpp>

#include "symten/sphere.hpp"
#include "symten/tensor.hpp"

#include <algorithm>
#include <random>

using namespace symten;

TEST_CASE("dim_sym counts sorted multi-indices", "[tensor]") {
    for (int n = 1; n <= 4; ++n)
        for (int m = 0; m <= 5; ++m) {
            int count = 0;
            MultiIndex idx(m, 0);
            do
                ++count;
            while (multi_index_next(n, idx));
            REQUIRE(count == dim_sym(n, m));
            REQUIRE(dim_sym(n, m) == binom(n + m - 1, m));
        }
}

TEST_CASE("multiplicity equals the number of distinct permutations", "[tensor]") {
    for (int n = 2; n <= 3; ++n)
        for (int m = 1; m <= 5; ++m) {
            MultiIndex idx(m, 0);
            do {
                // a sorted multi-index is the first permutation, so the
                // std::next_permutation loop visits each arrangement once
                std::vector<int> perm = idx;
                long long count = 0;
                do
                    ++count;
                while (std::next_permutation(perm.begin(), perm.end()));
                REQUIRE(multiplicity(idx) == count);
            } while (multi_index_next(n, idx));
        }
}

TEST_CASE("multi_index_unrank inverts multi_index_rank", "[tensor]") {
    const int n = 3, m = 4;
    for (int pos = 0; pos < dim_sym(n, m); ++pos) {
        MultiIndex idx = multi_index_unrank(n, m, pos);
        REQUIRE(multi_index_rank(n, idx) == pos);
    }
}

TEST_CASE("at_any sorts the index before lookup", "[tensor]") {
    SymTensor<double> t(3, 3);
    t.at({0, 1, 2}) = 7.5;
    REQUIRE(t.at_any({2, 0, 1}) == 7.5);
    REQUIRE(t.at_any({1, 2, 0}) == 7.5);
    REQUIRE(t.at({0, 1, 2}) == 7.5);
}

TEST_CASE("component storage lines up with unrank order", "[tensor]") {
    SymTensor<double> t(2, 3);
    for (int pos = 0; pos < t.size(); ++pos) t[pos] = 10.0 + pos;
    for (int pos = 0; pos < t.size(); ++pos)
        REQUIRE(t.at(multi_index_unrank(2, 3, pos)) == 10.0 + pos);
}

TEST_CASE("sym_product multiplies the associated polynomials", "[tensor]") {
    // kappa(u v)(xi) = kappa(u)(xi) kappa(v)(xi) characterizes the
    // symmetric product, since a symmetric tensor is determined by its
    // polynomial.
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int n : {2, 3}) {
        SymTensor<double> u(n, 2), v(n, 3);
        for (int t = 0; t < u.size(); ++t) u[t] = U(rng);
        for (int t = 0; t < v.size(); ++t) v[t] = U(rng);
        const SymTensor<double> w = sym_product(u, v);
        REQUIRE(w.rank() == 5);
        for (int rep = 0; rep < 8; ++rep) {
            std::vector<double> xi(n);
            for (auto& c : xi) c = U(rng);
            REQUIRE(kappa_eval(w, xi) ==
                    Catch::Approx(kappa_eval(u, xi) * kappa_eval(v, xi)).margin(1e-12));
        }
    }
}

TEST_CASE("symmetrize averages over slot permutations", "[tensor]") {
    RawTensor<double> raw(2, 2);
    raw.at({0, 1}) = 3.0;
    raw.at({1, 0}) = 1.0;
    raw.at({0, 0}) = 2.0;
    const SymTensor<double> s = symmetrize(raw);
    REQUIRE(s.at({0, 1}) == Catch::Approx(2.0));
    REQUIRE(s.at({0, 0}) == Catch::Approx(2.0));
    REQUIRE(s.at({1, 1}) == 0.0);
}

TEST_CASE("basis covectors restrict to coordinate functions", "[tensor]") {
    const SymTensor<double> e1 = basis_covector(3, 1);
    const std::vector<double> xi = {0.3, -0.7, 0.2};
    REQUIRE(kappa_eval(e1, xi) == Catch::Approx(-0.7));
    REQUIRE(kappa_eval(scalar_tensor(3, 2.5), xi) == Catch::Approx(2.5));
}

TEST_CASE("arithmetic works componentwise with scalars on both sides", "[tensor]") {
    SymTensor<double> u(2, 2), v(2, 2);
    for (int t = 0; t < u.size(); ++t) {
        u[t] = t + 1.0;
        v[t] = 0.5 * t;
    }
    const SymTensor<double> s = u + v;
    const SymTensor<double> d = u - v;
    for (int t = 0; t < u.size(); ++t) {
        REQUIRE(s[t] == Catch::Approx(u[t] + v[t]));
        REQUIRE(d[t] == Catch::Approx(u[t] - v[t]));
        REQUIRE((2.0 * u)[t] == Catch::Approx(2.0 * u[t]));
        REQUIRE((u * 2.0)[t] == Catch::Approx(2.0 * u[t]));
    }
    REQUIRE(u.max_abs() == Catch::Approx(u.size()));
}

TEST_CASE("shape mismatches are rejected", "[tensor]") {
    SymTensor<double> a(2, 2), b(3, 2), c(2, 3);
    REQUIRE_THROWS_AS(a + b, std::invalid_argument);
    REQUIRE_THROWS_AS(a + c, std::invalid_argument);
}
