#include <catch2/catch_amalgamated.hpp>

#include "symten/kinetic.hpp"
#include "symten/ckt.hpp"

#include <random>

using namespace symten;

namespace {

Polynomial<double> rand_poly(std::mt19937_64& rng, int deg) {
    std::uniform_real_distribution<double> coeff(-0.6, 0.6);
    Polynomial<double> p(2);
    for (int a = 0; a <= deg; ++a)
        for (int b = 0; a + b <= deg; ++b) p.add_term({a, b}, coeff(rng));
    return p;
}

// trace-free stack of ranks 0..M built from random polynomial data
KineticStack rand_stack(std::shared_ptr<const Chart> chart, int M, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<TensorField> parts;
    for (int m = 0; m <= M; ++m) {
        const Polynomial<double> p = rand_poly(rng, 2);
        const Polynomial<double> q = rand_poly(rng, 2);
        if (m == 0)
            parts.push_back(field_from_poly(chart, {p}, 0));
        else if (m == 1)
            parts.push_back(field_from_poly(chart, {p, q}, 1));
        else
            parts.push_back(angular_pair_field(chart, m, scalar_jet_from_poly(p),
                                               scalar_jet_from_poly(q)));
    }
    return make_kinetic_stack(chart, std::move(parts));
}

} // namespace

TEST_CASE("stack construction validates ranks and charts", "[kinetic]") {
    auto chart = chart_euclidean(2);
    auto other = chart_euclidean(2);
    Polynomial<double> p(2);
    p.add_term({1, 0}, 1.0);

    std::vector<TensorField> bad = {field_from_poly(chart, {p, p}, 1)};
    REQUIRE_THROWS_AS(make_kinetic_stack(chart, bad), std::invalid_argument);

    std::vector<TensorField> wrong_chart = {field_from_poly(other, {p}, 0)};
    REQUIRE_THROWS_AS(make_kinetic_stack(chart, wrong_chart), std::invalid_argument);

    std::vector<TensorField> good = {field_from_poly(chart, {p}, 0),
                                     field_from_poly(chart, {p, p}, 1)};
    REQUIRE(make_kinetic_stack(chart, good).max_rank() == 1);
}

TEST_CASE("moment ladder matches the angular transform of the transported function",
          "[kinetic]") {
    const ScalarJet flat = scalar_jet_zero(2);
    const ScalarJet slope = scalar_jet_x(2);
    int mu_case = 0;
    for (const ScalarJet& mu : {flat, slope}) {
        auto chart = chart_conformal(2, mu);
        for (int M : {0, 1, 3}) {
            CAPTURE(mu_case, M);
            const KineticStack U = rand_stack(chart, M, 2000 + 10 * mu_case + M);
            const KineticStack lhs = transport_relations(U);
            const KineticStack rhs = fourier_of_HU(U, mu);
            REQUIRE(lhs.max_rank() == M + 1);
            REQUIRE(rhs.max_rank() == M + 1);
            REQUIRE(kinetic_sup_diff(lhs, rhs, 5) < 1e-10);
        }
        ++mu_case;
    }
}

TEST_CASE("transport output of the empty ladder rung is the divergence seed", "[kinetic]") {
    // stack with only a rank-1 part: f_0 = (1/2) delta(u_1) in the plane
    auto chart = chart_euclidean(2);
    Polynomial<double> p(2), q(2);
    p.add_term({2, 0}, 1.0); // u = (x^2, xy)
    q.add_term({1, 1}, 1.0);
    std::vector<TensorField> parts = {field_from_poly(chart, {Polynomial<double>(2)}, 0),
                                      field_from_poly(chart, {p, q}, 1)};
    const KineticStack U = make_kinetic_stack(chart, std::move(parts));
    const KineticStack F = transport_relations(U);
    const Vec x = {0.3, 0.7};
    // delta(u) = 2x + x = 3x
    REQUIRE(F.parts[0].eval(x)[0] == Catch::Approx(0.5 * 3 * x[0]).margin(1e-12));
}

TEST_CASE("stacks with a trace leak are rejected", "[kinetic]") {
    auto chart = chart_euclidean(2);
    Polynomial<double> one(2);
    one.add_term({0, 0}, 1.0);
    Polynomial<double> zero(2);
    // u_2 = diag(1, 1) has trace 2
    std::vector<TensorField> parts = {
        field_from_poly(chart, {zero}, 0), field_from_poly(chart, {zero, zero}, 1),
        field_from_poly(chart, {one, zero, one}, 2)};
    const KineticStack U = make_kinetic_stack(chart, std::move(parts));
    REQUIRE_THROWS_AS(transport_relations(U), std::invalid_argument);
}
