#include <catch2/catch_amalgamated.hpp>

#include "symten/harmonic.hpp"
#include "symten/linalg.hpp"

#include <algorithm>
#include <random>

using namespace symten;

namespace {

SymTensor<double> rand_tensor(int n, int m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    SymTensor<double> t(n, m);
    for (int k = 0; k < t.size(); ++k) t[k] = U(rng);
    return t;
}

MetricPoint<double> bumped_metric(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-0.15, 0.15);
    Mat<double> g(n, std::vector<double>(n, 0.0));
    for (int r = 0; r < n; ++r) {
        g[r][r] = 1.0 + std::abs(U(rng));
        for (int c = r + 1; c < n; ++c) g[r][c] = g[c][r] = U(rng) / n;
    }
    return MetricPoint<double>(g);
}

double rel(const SymTensor<double>& a, const SymTensor<double>& b) {
    return (a - b).max_abs() / (1.0 + a.max_abs() + b.max_abs());
}

} // namespace

TEST_CASE("trace ladder eigenvalues match the dense spectrum", "[harmonic]") {
    // Assemble the map u -> j(i u) on all of S^m in the component basis,
    // symmetrize with multiplicity weights (the map is self-adjoint for the
    // euclidean pairing), and compare the spectrum against the predicted
    // eigenvalues with their trace-free multiplicities.
    struct Shape {
        int n, m;
    };
    for (const auto& [n, m] : {Shape{3, 2}, Shape{3, 3}, Shape{2, 4}}) {
        const auto g = MetricPoint<double>::euclidean(n);
        const int d = dim_sym(n, m);
        std::vector<double> mult(d);
        for (int pos = 0; pos < d; ++pos)
            mult[pos] = static_cast<double>(multiplicity(multi_index_unrank(n, m, pos)));
        DMatrix S(d, d);
        for (int c = 0; c < d; ++c) {
            SymTensor<double> e(n, m);
            e[c] = 1.0;
            const SymTensor<double> w = ji_apply(e, g, 1);
            for (int r = 0; r < d; ++r) S(r, c) = std::sqrt(mult[r] / mult[c]) * w[r];
        }
        std::vector<double> ev = jacobi_eigen(S);
        std::vector<double> expect;
        for (int k = 0; 2 * k <= m; ++k) {
            const int r = m - 2 * k;
            const int tf = dim_sym(n, r) - (r >= 2 ? dim_sym(n, r - 2) : 0);
            for (int t = 0; t < tf; ++t) expect.push_back(ji_eigenvalue<double>(n, m, k));
        }
        std::sort(expect.begin(), expect.end());
        REQUIRE(ev.size() == expect.size());
        for (std::size_t i = 0; i < ev.size(); ++i)
            REQUIRE(ev[i] == Catch::Approx(expect[i]).margin(1e-10));
    }
}

TEST_CASE("harmonic decomposition reconstructs and is trace-free per level", "[harmonic]") {
    std::mt19937_64 rng(21);
    for (int m : {2, 3, 4, 5}) {
        const int n = 3;
        const MetricPoint<double> g = bumped_metric(n, 300 + m);
        const SymTensor<double> u = rand_tensor(n, m, rng);
        const HarmonicParts<double> h = harmonic_decompose(u, g);
        REQUIRE(static_cast<int>(h.parts.size()) == m / 2 + 1);
        SymTensor<double> acc(n, m);
        for (int k = 0; k < static_cast<int>(h.parts.size()); ++k) {
            REQUIRE(h.parts[k].rank() == m - 2 * k);
            if (h.parts[k].rank() >= 2)
                REQUIRE(trace(h.parts[k], g).max_abs() < 1e-10);
            SymTensor<double> lift = h.parts[k];
            for (int t = 0; t < k; ++t) lift = mul_metric(lift, g);
            acc += lift;
        }
        REQUIRE(rel(acc, u) < 1e-12);
        REQUIRE(rel(harmonic_reconstruct(h, g), u) < 1e-12);
    }
}

TEST_CASE("p and q are complementary orthogonal projections", "[harmonic]") {
    std::mt19937_64 rng(22);
    const int n = 3, m = 4;
    const MetricPoint<double> g = bumped_metric(n, 17);
    const SymTensor<double> u = rand_tensor(n, m, rng);
    const SymTensor<double> pu = project_p(u, g);
    const SymTensor<double> qu = project_q(u, g);
    REQUIRE(rel(pu + qu, u) < 1e-12);
    REQUIRE(trace(pu, g).max_abs() < 1e-10);
    REQUIRE(std::abs(inner(pu, qu, g)) < 1e-10);
    REQUIRE(rel(project_p(pu, g), pu) < 1e-11);
    REQUIRE(rel(project_q(qu, g), qu) < 1e-11);

    // p annihilates metric multiples, q fixes them
    const SymTensor<double> w = rand_tensor(n, m - 2, rng);
    const SymTensor<double> gw = mul_metric(w, g);
    REQUIRE(project_p(gw, g).max_abs() < 1e-10 * (1 + gw.max_abs()));
    REQUIRE(rel(project_q(gw, g), gw) < 1e-11);
}

TEST_CASE("projections are the identity on ranks without a trace", "[harmonic]") {
    std::mt19937_64 rng(23);
    const MetricPoint<double> g = bumped_metric(3, 5);
    for (int m : {0, 1}) {
        const SymTensor<double> u = rand_tensor(3, m, rng);
        REQUIRE(rel(project_p(u, g), u) == 0.0);
        REQUIRE(project_q(u, g).max_abs() == 0.0);
    }
}

TEST_CASE("trace_free_basis spans the right dimension orthonormally", "[harmonic]") {
    for (int n : {2, 3})
        for (int m : {2, 3, 4}) {
            const MetricPoint<double> g = bumped_metric(n, 40 + 10 * n + m);
            const auto basis = trace_free_basis(n, m, g);
            REQUIRE(static_cast<int>(basis.size()) == dim_sym(n, m) - dim_sym(n, m - 2));
            for (std::size_t i = 0; i < basis.size(); ++i) {
                REQUIRE(trace(basis[i], g).max_abs() < 1e-9);
                for (std::size_t j = 0; j <= i; ++j)
                    REQUIRE(inner(basis[i], basis[j], g) ==
                            Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-9));
            }
        }
}

TEST_CASE("commutation ladder holds for every rank including vectors", "[harmonic]") {
    // Ranks 0 and 1 have no trace part; the ladder must still hold with the
    // second term absent.
    std::mt19937_64 rng(24);
    for (int n : {2, 3})
        for (int m = 0; m <= 4; ++m)
            for (int k = 1; k <= 3; ++k) {
                const MetricPoint<double> g = bumped_metric(n, 60 + 10 * n + m + 100 * k);
                const SymTensor<double> u = rand_tensor(n, m, rng);
                SymTensor<double> lift = u;
                for (int t = 0; t < k; ++t) lift = mul_metric(lift, g);
                const SymTensor<double> lhs = trace(lift, g);
                REQUIRE(rel(lhs, ji_commutation_rhs(u, g, k)) < 1e-12);
            }
}

TEST_CASE("j(i u) scales vectors by (n+2)/3 on the euclidean metric", "[harmonic]") {
    std::mt19937_64 rng(25);
    for (int n : {2, 3, 4}) {
        const auto g = MetricPoint<double>::euclidean(n);
        const SymTensor<double> u = rand_tensor(n, 1, rng);
        const SymTensor<double> lhs = ji_apply(u, g, 1);
        REQUIRE(rel(lhs, ((n + 2.0) / 3.0) * u) < 1e-14);
    }
}

TEST_CASE("symbol matrix is positive definite for nonzero covectors", "[harmonic]") {
    std::mt19937_64 rng(26);
    const MetricPoint<double> g = bumped_metric(3, 91);
    SymTensor<double> xi = rand_tensor(3, 1, rng);
    const DMatrix M = symbol_matrix(xi, g, 2);
    const std::vector<double> ev = jacobi_eigen(M);
    REQUIRE(ev.front() > 0.0);

    SymTensor<double> zero(3, 1);
    REQUIRE_THROWS_AS(symbol_matrix(zero, g, 2), std::invalid_argument);
}
