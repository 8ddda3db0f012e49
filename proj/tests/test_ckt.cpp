#include <catch2/catch_amalgamated.hpp>

#include "symten/ckt.hpp"
#include "symten/poly_field.hpp"

#include <cmath>

using namespace symten;

TEST_CASE("harmonic tensors restrict to pure circle modes", "[ckt]") {
    for (int m = 0; m <= 4; ++m) {
        const SymTensor<double> tc = cos_harmonic_tensor(m);
        const SymTensor<double> ts = sin_harmonic_tensor(m);
        for (int s = 0; s < 9; ++s) {
            const double t = 2 * M_PI * s / 9 + 0.1;
            const std::vector<double> xi = {std::cos(t), std::sin(t)};
            REQUIRE(kappa_eval(tc, xi) == Catch::Approx(std::cos(m * t)).margin(1e-12));
            if (m > 0)
                REQUIRE(kappa_eval(ts, xi) == Catch::Approx(std::sin(m * t)).margin(1e-12));
        }
    }
}

TEST_CASE("angular pair fields are trace-free with the expected restriction", "[ckt]") {
    const ScalarJet mu = scalar_jet_x(2);
    auto chart = chart_conformal(2, mu, 0.0, 1.0);
    const int m = 3;
    const ScalarJet A = scalar_jet_from_poly([] {
        Polynomial<double> p(2);
        p.add_term({1, 1}, 0.8);
        p.add_term({0, 0}, -0.3);
        return p;
    }());
    const ScalarJet B = scalar_jet_from_poly([] {
        Polynomial<double> p(2);
        p.add_term({2, 0}, 0.5);
        return p;
    }());
    const TensorField u = angular_pair_field(chart, m, A, B);

    const Vec x = {0.37, 0.61};
    const MetricPoint<double> g = chart->metric(x);
    REQUIRE(trace(u.eval(x), g).max_abs() < 1e-13);

    // restriction to the metric unit circle: e^{-m mu} (A cos + B sin)
    const double emu = std::exp(-mu.value(x));
    for (int s = 0; s < 7; ++s) {
        const double t = 2 * M_PI * s / 7;
        const std::vector<double> xi = {emu * std::cos(t), emu * std::sin(t)};
        const double want = std::pow(emu, m) *
                            (A.value(x) * std::cos(m * t) + B.value(x) * std::sin(m * t));
        REQUIRE(kappa_eval(u.eval(x), xi) == Catch::Approx(want).margin(1e-12));
    }
}

TEST_CASE("isothermic reduction recovers the angular amplitudes", "[ckt]") {
    const ScalarJet mu = scalar_jet_x(2);
    auto chart = chart_conformal(2, mu, 0.0, 1.0);
    const int m = 2;
    const ScalarJet A = scalar_jet_from_poly([] {
        Polynomial<double> p(2);
        p.add_term({1, 0}, 1.0);
        p.add_term({0, 2}, -0.4);
        return p;
    }());
    const ScalarJet B = scalar_jet_from_poly([] {
        Polynomial<double> p(2);
        p.add_term({0, 1}, 0.7);
        return p;
    }());
    const TensorField u = angular_pair_field(chart, m, A, B);
    const auto [a, b] = isothermic_reduce(u, mu);
    for (const Vec x : {Vec{0.3, 0.4}, Vec{0.62, 0.18}}) {
        const double scale = std::exp(-m * mu.value(x));
        REQUIRE(a.eval(x)[0] == Catch::Approx(scale * A.value(x)).margin(1e-12));
        REQUIRE(b.eval(x)[0] == Catch::Approx(scale * B.value(x)).margin(1e-12));
        // reductions carry analytic gradients
        const auto da = a.d1(x);
        const double h = 1e-6;
        const double fd =
            (a.eval({x[0] + h, x[1]})[0] - a.eval({x[0] - h, x[1]})[0]) / (2 * h);
        REQUIRE(da[0][0] == Catch::Approx(fd).margin(1e-8));
    }
}

TEST_CASE("the radial vector field is conformal Killing with unit potential", "[ckt]") {
    auto chart = chart_euclidean(2);
    TensorField u;
    u.chart = chart;
    u.rank = 1;
    u.eval = [](const Vec& p) {
        SymTensor<double> t(2, 1);
        t[0] = p[0];
        t[1] = p[1];
        return t;
    };
    u.d1 = [](const Vec&) {
        std::vector<SymTensor<double>> d(2, SymTensor<double>(2, 1));
        d[0][0] = 1;
        d[1][1] = 1;
        return d;
    };
    const CKReport rep = ck_residual(u);
    REQUIRE(rep.accept);
    REQUIRE(rep.pdu_sup < 1e-12);
    const TensorField v = recover_v(u);
    REQUIRE(v.eval({0.5, 0.5})[0] == Catch::Approx(1.0));
    REQUIRE(v.eval({0.21, 0.84})[0] == Catch::Approx(1.0));
}

TEST_CASE("dimension bound formula gives known values", "[ckt]") {
    REQUIRE(ck_dimension_bound(3, 0) == 1);
    REQUIRE(ck_dimension_bound(3, 1) == 10);
    REQUIRE(ck_dimension_bound(4, 1) == 15);
    REQUIRE(ck_dimension_bound(3, 2) == 35);
    REQUIRE_THROWS_AS(ck_dimension_bound(2, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(ck_dimension_bound(3, -1), std::invalid_argument);
}

TEST_CASE("planar polynomial kernels grow two dimensions per degree", "[ckt]") {
    // trace-free conformal Killing tensors in the plane correspond to
    // polynomial holomorphic data: real dimension 2(deg+1)
    REQUIRE(poly_ck_kernel(2, 1, 1).size() == 4);
    REQUIRE(poly_ck_kernel(2, 1, 2).size() == 6);
    REQUIRE(poly_ck_kernel(2, 2, 2).size() == 6);
    for (const auto& u : poly_ck_kernel(2, 2, 2)) {
        REQUIRE(pt_p(pt_d(u)).is_zero());
        REQUIRE(pt_j(u).is_zero());
    }
}

TEST_CASE("full-order jet constraints kill the planar kernel", "[ckt]") {
    REQUIRE(constrained_ck_kernel(2, 1, 2, {CKConstraint::jet(2)}).empty());
    REQUIRE_FALSE(constrained_ck_kernel(2, 1, 2, {CKConstraint::jet(1)}).empty());
}

TEST_CASE("geodesic generator components on conformal charts", "[ckt]") {
    const auto flat = geodesic_generator_2d(scalar_jet_zero(2), 0.3, 0.4, 1.1);
    REQUIRE(flat[0] == Catch::Approx(std::cos(1.1)));
    REQUIRE(flat[1] == Catch::Approx(std::sin(1.1)));
    REQUIRE(flat[2] == Catch::Approx(0.0).margin(1e-15));

    const auto curved = geodesic_generator_2d(scalar_jet_x(2), 0.3, 0.4, 1.1);
    REQUIRE(curved[2] == Catch::Approx(-std::exp(-0.3) * std::sin(1.1)));
}
