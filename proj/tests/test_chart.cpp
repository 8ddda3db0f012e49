#include <catch2/catch_amalgamated.hpp>

#include "symten/chart.hpp"
#include "symten/field.hpp"

#include <cmath>

using namespace symten;

namespace {

// Christoffel symbols straight from the metric by central differences:
// Gamma^k_ij = (1/2) g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
Christoffel christoffel_fd(const Chart& chart, const Vec& x, double h) {
    const int n = chart.dim();
    std::vector<Mat<double>> dg(n);
    for (int a = 0; a < n; ++a) {
        Vec xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        const Mat<double> gp = chart.g(xp), gm = chart.g(xm);
        dg[a] = Mat<double>(n, std::vector<double>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) dg[a][i][j] = (gp[i][j] - gm[i][j]) / (2 * h);
    }
    const Mat<double> ginv = chart.metric(x).g_inv();
    Christoffel out(n, Mat<double>(n, std::vector<double>(n, 0.0)));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0;
                for (int l = 0; l < n; ++l)
                    s += ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                out[k][i][j] = 0.5 * s;
            }
    return out;
}

} // namespace

TEST_CASE("polar-like chart has the textbook connection", "[chart]") {
    auto chart = chart_polar_like();
    const Vec x = {1.4, 3.0};
    const Christoffel ch = chart->christoffel(x);
    REQUIRE(ch[0][1][1] == Catch::Approx(-1.4));
    REQUIRE(ch[1][0][1] == Catch::Approx(1.0 / 1.4));
    REQUIRE(ch[1][1][0] == Catch::Approx(1.0 / 1.4));
    REQUIRE(ch[0][0][0] == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(ch[0][0][1] == Catch::Approx(0.0).margin(1e-14));
    REQUIRE(ch[1][1][1] == Catch::Approx(0.0).margin(1e-14));
}

TEST_CASE("christoffel symbols agree with finite differences of the metric", "[chart]") {
    for (const auto& chart : {chart_sphere_patch(), chart_polar_like(),
                              chart_conformal(2, scalar_jet_half_r2(2), 0.1, 0.9)}) {
        const Vec x = {0.5 * (chart->lo()[0] + chart->hi()[0]) + 0.03,
                       0.5 * (chart->lo()[1] + chart->hi()[1]) - 0.02};
        const Christoffel fd = christoffel_fd(*chart, x, 1e-6);
        const Christoffel an = chart->christoffel(x);
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    REQUIRE(an[k][i][j] == Catch::Approx(fd[k][i][j]).margin(1e-6));
    }
}

TEST_CASE("connection derivatives agree with finite differences", "[chart]") {
    auto chart = chart_sphere_patch();
    const Vec x = {1.2, 2.8};
    const double h = 1e-5;
    const DChristoffel an = chart->dchristoffel(x);
    for (int a = 0; a < 2; ++a) {
        Vec xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        const Christoffel cp = chart->christoffel(xp), cm = chart->christoffel(xm);
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    REQUIRE(an[a][k][i][j] ==
                            Catch::Approx((cp[k][i][j] - cm[k][i][j]) / (2 * h)).margin(1e-5));
    }
}

TEST_CASE("constant-curvature charts produce the expected ricci tensors", "[chart]") {
    // sign convention: for the sphere patch the ricci matrix equals -g
    {
        auto chart = chart_sphere_patch();
        const Vec x = {1.1, 2.3};
        const CurvatureData cd = curvature(*chart, x);
        const Mat<double> gm = chart->g(x);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                REQUIRE(cd.ricci[i][j] == Catch::Approx(-gm[i][j]).margin(1e-9));
    }
    // e^{-r^2} conformal factor: ricci is exactly 2 delta_ij in coordinates
    {
        auto chart = chart_conformal(2, scalar_jet_half_r2(2), 0.1, 0.9);
        const CurvatureData cd = curvature(*chart, {0.4, 0.7});
        REQUIRE(cd.ricci[0][0] == Catch::Approx(2.0).margin(1e-9));
        REQUIRE(cd.ricci[1][1] == Catch::Approx(2.0).margin(1e-9));
        REQUIRE(cd.ricci[0][1] == Catch::Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("flat charts carry no curvature", "[chart]") {
    for (const auto& chart :
         {chart_euclidean(2), chart_conformal(2, scalar_jet_x(2), 0.0, 1.0)}) {
        const CurvatureData cd = curvature(*chart, {0.3, 0.6});
        double sup = 0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) sup = std::max(sup, std::abs(cd.ricci[i][j]));
        REQUIRE(sup < 1e-10);
    }
    const Christoffel ch = chart_euclidean(3)->christoffel({0.5, 0.5, 0.5});
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) REQUIRE(ch[k][i][j] == 0.0);
}

TEST_CASE("evaluating a chart outside its domain throws", "[chart]") {
    auto chart = chart_euclidean(2);
    REQUIRE_THROWS_AS(chart->g({-0.5, 0.5}), std::domain_error);
    REQUIRE_THROWS_AS(chart->metric({0.5, 1.5}), std::domain_error);
    REQUIRE(chart->contains({0.5, 0.5}));
}
