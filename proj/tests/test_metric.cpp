#include <catch2/catch_amalgamated.hpp>

#include "symten/metric.hpp"
#include "symten/sphere.hpp"

#include <random>

using namespace symten;

namespace {

// every index tuple of length m over {0..n-1}, with repetition
std::vector<std::vector<int>> raw_tuples(int n, int m) {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(m, 0);
    while (true) {
        out.push_back(idx);
        int k = m - 1;
        while (k >= 0 && idx[k] == n - 1) idx[k--] = 0;
        if (k < 0) break;
        ++idx[k];
    }
    return out;
}

MetricPoint<double> sample_metric(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-0.2, 0.2);
    Mat<double> g(n, std::vector<double>(n, 0.0));
    for (int r = 0; r < n; ++r) {
        g[r][r] = 1.0 + std::abs(U(rng));
        for (int c = r + 1; c < n; ++c) g[r][c] = g[c][r] = U(rng) / n;
    }
    return MetricPoint<double>(g);
}

SymTensor<double> rand_tensor(int n, int m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    SymTensor<double> t(n, m);
    for (int k = 0; k < t.size(); ++k) t[k] = U(rng);
    return t;
}

} // namespace

TEST_CASE("inner contracts every slot pair with the inverse metric", "[metric]") {
    std::mt19937_64 rng(7);
    for (int n : {2, 3}) {
        const int m = 2;
        const MetricPoint<double> g = sample_metric(n, 100 + n);
        const SymTensor<double> u = rand_tensor(n, m, rng);
        const SymTensor<double> v = rand_tensor(n, m, rng);
        double oracle = 0;
        for (const auto& I : raw_tuples(n, m))
            for (const auto& J : raw_tuples(n, m)) {
                double w = 1;
                for (int k = 0; k < m; ++k) w *= g.g_inv()[I[k]][J[k]];
                oracle += u.at_any(I) * v.at_any(J) * w;
            }
        REQUIRE(inner(u, v, g) == Catch::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("trace contracts two slots with the inverse metric", "[metric]") {
    std::mt19937_64 rng(8);
    const int n = 3, m = 3;
    const MetricPoint<double> g = sample_metric(n, 55);
    const SymTensor<double> u = rand_tensor(n, m, rng);
    const SymTensor<double> tr = trace(u, g);
    REQUIRE(tr.rank() == m - 2);
    MultiIndex K(m - 2, 0);
    do {
        double oracle = 0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                std::vector<int> full(K);
                full.push_back(a);
                full.push_back(b);
                oracle += g.g_inv()[a][b] * u.at_any(full);
            }
        REQUIRE(tr.at(K) == Catch::Approx(oracle).epsilon(1e-12));
    } while (multi_index_next(n, K));
}

TEST_CASE("i_xi is symmetric multiplication by the covector", "[metric]") {
    std::mt19937_64 rng(9);
    const int n = 3, m = 2;
    const SymTensor<double> u = rand_tensor(n, m, rng);
    const SymTensor<double> xi = rand_tensor(n, 1, rng);
    const SymTensor<double> lhs = i_xi(u, xi);
    const SymTensor<double> rhs = sym_product(xi, u);
    for (int t = 0; t < lhs.size(); ++t) REQUIRE(lhs[t] == Catch::Approx(rhs[t]).margin(1e-14));
}

TEST_CASE("j_xi is the adjoint of i_xi", "[metric]") {
    std::mt19937_64 rng(10);
    for (int n : {2, 3})
        for (int m = 1; m <= 3; ++m) {
            const MetricPoint<double> g = sample_metric(n, 200 + 10 * n + m);
            const SymTensor<double> u = rand_tensor(n, m, rng);
            const SymTensor<double> v = rand_tensor(n, m + 1, rng);
            const SymTensor<double> xi = rand_tensor(n, 1, rng);
            const double lhs = inner(i_xi(u, xi), v, g);
            const double rhs = inner(u, j_xi(v, xi, g), g);
            REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-11).margin(1e-13));
        }
}

TEST_CASE("mul_metric is the adjoint of trace", "[metric]") {
    std::mt19937_64 rng(11);
    const int n = 3, m = 2;
    const MetricPoint<double> g = sample_metric(n, 31);
    const SymTensor<double> u = rand_tensor(n, m, rng);
    const SymTensor<double> v = rand_tensor(n, m + 2, rng);
    REQUIRE(inner(mul_metric(u, g), v, g) ==
            Catch::Approx(inner(u, trace(v, g), g)).epsilon(1e-11));
}

TEST_CASE("metric_tensor reproduces the quadratic form", "[metric]") {
    const MetricPoint<double> g = sample_metric(3, 77);
    const std::vector<double> xi = {0.4, -0.9, 0.3};
    double oracle = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) oracle += g.g()[i][j] * xi[i] * xi[j];
    REQUIRE(kappa_eval(g.metric_tensor(), xi) == Catch::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("MetricPoint rejects bad matrices", "[metric]") {
    REQUIRE_THROWS_AS(MetricPoint<double>({{1.0, 0.5}, {0.2, 1.0}}), std::invalid_argument);
    REQUIRE_THROWS_AS(MetricPoint<double>({{1.0, 0.0}, {0.0, -1.0}}), std::invalid_argument);
    REQUIRE_THROWS_AS(MetricPoint<double>({{0.0, 1.0}, {1.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("g_inv is the actual inverse", "[metric]") {
    const MetricPoint<double> g = sample_metric(3, 123);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double prod = 0;
            for (int k = 0; k < 3; ++k) prod += g.g()[i][k] * g.g_inv()[k][j];
            REQUIRE(prod == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-12));
        }
}
