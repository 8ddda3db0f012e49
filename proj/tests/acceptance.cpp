// End-to-end verification gate: eleven numbered checks, each with a pinned
// tolerance and a wall-clock budget. Prints one line per check and exits
// nonzero if any of them fails. Runs under ctest but works standalone.

#include "symten/ckt.hpp"
#include "symten/decomp.hpp"
#include "symten/kinetic.hpp"
#include "symten/poly_field.hpp"
#include "symten/suites.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace symten;

namespace {

constexpr std::uint64_t kSeed = 20260815ull;

int g_failures = 0;

std::string strf(const char* fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

template <class F>
void gate(int id, const char* name, double limit, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail = strf("exception: %s", e.what());
        pass = false;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > limit) {
        pass = false;
        detail += " [over time budget]";
    }
    std::printf("[%2d] %s  %-32s %s  (%.1fs / %.0fs)\n", id, pass ? "PASS" : "FAIL", name,
                detail.c_str(), secs, limit);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

bool suite_gate(const SuiteReport& rep, double budget, std::string& detail) {
    double worst = 0;
    long long cases = 0;
    for (const auto& c : rep.checks) {
        worst = std::max(worst, c.residual);
        cases += c.cases;
    }
    detail = strf("worst residual %.2e (budget %.0e, %lld case evaluations)", worst, budget,
                  cases);
    return rep.all_pass;
}

// ---- helpers for the holomorphic family ------------------------------------

Polynomial<double> poly2(std::initializer_list<std::pair<std::array<int, 2>, double>> ts) {
    Polynomial<double> p(2);
    for (const auto& [e, c] : ts) p.add_term({e[0], e[1]}, c);
    return p;
}

// real and imaginary parts of z^k for k = 0..3
std::pair<Polynomial<double>, Polynomial<double>> zpow(int k) {
    switch (k) {
    case 0: return {poly2({{{0, 0}, 1.0}}), poly2({})};
    case 1: return {poly2({{{1, 0}, 1.0}}), poly2({{{0, 1}, 1.0}})};
    case 2: return {poly2({{{2, 0}, 1.0}, {{0, 2}, -1.0}}), poly2({{{1, 1}, 2.0}})};
    default:
        return {poly2({{{3, 0}, 1.0}, {{1, 2}, -3.0}}),
                poly2({{{2, 1}, 3.0}, {{0, 3}, -1.0}})};
    }
}

// Jet of e^{c x} q(x, y) with analytic gradient and Hessian.
ScalarJet exp_poly_jet(double c, const Polynomial<double>& q) {
    struct Cache {
        Polynomial<double> p, px, py, pxx, pxy, pyy;
        explicit Cache(const Polynomial<double>& q)
            : p(q), px(q.derivative(0)), py(q.derivative(1)), pxx(px.derivative(0)),
              pxy(px.derivative(1)), pyy(py.derivative(1)) {}
    };
    auto J = std::make_shared<Cache>(q);
    ScalarJet out;
    out.value = [J, c](const Vec& x) { return std::exp(c * x[0]) * J->p.eval(x); };
    out.grad = [J, c](const Vec& x) {
        const double e = std::exp(c * x[0]);
        return Vec{e * (c * J->p.eval(x) + J->px.eval(x)), e * J->py.eval(x)};
    };
    out.hess = [J, c](const Vec& x) {
        const double e = std::exp(c * x[0]);
        Mat<double> h(2, std::vector<double>(2));
        h[0][0] = e * (c * c * J->p.eval(x) + 2 * c * J->px.eval(x) + J->pxx.eval(x));
        h[0][1] = h[1][0] = e * (c * J->py.eval(x) + J->pxy.eval(x));
        h[1][1] = e * J->pyy.eval(x);
        return h;
    };
    return out;
}

// ---- manufactured decomposition data ---------------------------------------

// f = d v0 + i lambda0 + f~0 on the unit square, with v0 zero on the
// boundary, lambda0 a smooth trace factor, and f~0 the trace-free
// divergence-free pair built from z^3.
GridField manufactured(int N) {
    const double pi = M_PI;
    return grid_sample(N, 2, [pi](double x, double y) {
        SymTensor<double> t(2, 2);
        const double lam = std::cos(pi * x) * y + 0.3;
        const double d00 = 0.5 * pi * std::cos(pi * x) * std::sin(pi * y);
        const double d11 = x * (1 - x) * (1 - 2 * y);
        const double d01 = 0.5 * (0.5 * pi * std::sin(pi * x) * std::cos(pi * y) +
                                  (1 - 2 * x) * y * (1 - y));
        const double re3 = x * x * x - 3 * x * y * y;
        const double im3 = 3 * x * x * y - y * y * y;
        t.at({0, 0}) = d00 + lam + re3;
        t.at({0, 1}) = d01 - im3;
        t.at({1, 1}) = d11 + lam - re3;
        return t;
    });
}

GridField manufactured_v(int N) {
    const double pi = M_PI;
    return grid_sample(N, 1, [pi](double x, double y) {
        SymTensor<double> t(2, 1);
        t[0] = 0.5 * std::sin(pi * x) * std::sin(pi * y);
        t[1] = x * (1 - x) * y * (1 - y);
        return t;
    });
}

GridField manufactured_lambda(int N) {
    const double pi = M_PI;
    return grid_sample(N, 0, [pi](double x, double y) {
        SymTensor<double> t(2, 0);
        t[0] = std::cos(pi * x) * y + 0.3;
        return t;
    });
}

GridField manufactured_ftilde(int N) {
    return grid_sample(N, 2, [](double x, double y) {
        SymTensor<double> t(2, 2);
        const double re3 = x * x * x - 3 * x * y * y;
        const double im3 = 3 * x * x * y - y * y * y;
        t.at({0, 0}) = re3;
        t.at({0, 1}) = -im3;
        t.at({1, 1}) = -re3;
        return t;
    });
}

} // namespace

int main() {
    gate(1, "pointwise algebra identities", 30, [](std::string& d) {
        SuiteReport rep = run_algebra_suite(kSeed, 200, 4, 5, 1e-10);
        return suite_gate(rep, 1e-10, d);
    });

    gate(2, "sphere norm constant", 10, [](std::string& d) {
        SuiteReport rep = run_norm_constant_suite(kSeed, 3, 4, 1e-9);
        return suite_gate(rep, 1e-9, d);
    });

    gate(3, "differential commutators", 60, [](std::string& d) {
        SuiteReport rep = run_differential_suite(kSeed, 3, 2, 1e-8);
        return suite_gate(rep, 1e-8, d);
    });

    gate(4, "flat power identities (exact)", 60, [](std::string& d) {
        SuiteReport rep = run_flat_exact_suite(kSeed, 3, 3);
        double worst = 0;
        for (const auto& c : rep.checks) worst = std::max(worst, c.residual);
        d = strf("largest surviving coefficient %.1f (target 0, rational arithmetic)", worst);
        return rep.all_pass;
    });

    gate(5, "flat polynomial kernel dims", 300, [](std::string& d) {
        struct Case {
            int n, m, deg;
            long long want;
        };
        const Case cases[] = {{3, 1, 2, 10}, {4, 1, 2, 15}, {3, 2, 4, 35}};
        bool ok = true;
        std::string dims;
        for (const auto& c : cases) {
            const auto ker = poly_ck_kernel(c.n, c.m, c.deg);
            const auto dim = static_cast<long long>(ker.size());
            const long long bound = ck_dimension_bound(c.n, c.m);
            bool exact = true;
            for (const auto& u : ker)
                exact = exact && pt_p(pt_d(u)).is_zero() && pt_j(u).is_zero();
            ok = ok && dim == c.want && dim == bound && exact;
            dims += strf("%s(%d,%d)->%lld=bound", dims.empty() ? "" : " ", c.n, c.m, dim);
        }
        d = dims + ", members verified exactly";
        return ok;
    });

    gate(6, "vanishing-set constraints", 300, [](std::string& d) {
        struct Case {
            int n, m, deg;
        };
        const Case zero_cases[] = {{2, 1, 2}, {2, 2, 4}, {3, 1, 2}, {3, 2, 4}};
        bool ok = true;
        for (const auto& c : zero_cases) {
            const auto ker =
                constrained_ck_kernel(c.n, c.m, c.deg, {CKConstraint::hyperplane()});
            ok = ok && ker.empty();
        }
        const auto line = constrained_ck_kernel(3, 2, 4, {CKConstraint::line()});
        ok = ok && line.size() == 10;
        d = strf("hyperplane kernels all empty, line kernel dim %zu (want 10)", line.size());
        return ok;
    });

    gate(7, "jet determination order", 120, [](std::string& d) {
        const auto k1 = constrained_ck_kernel(3, 1, 2, {CKConstraint::jet(2)});
        const auto k2 = constrained_ck_kernel(3, 1, 2, {CKConstraint::jet(1)});
        const auto k3 = constrained_ck_kernel(3, 2, 4, {CKConstraint::jet(4)});
        const auto k4 = constrained_ck_kernel(3, 2, 4, {CKConstraint::jet(3)});
        d = strf("m=1: order 2 -> %zu, order 1 -> %zu; m=2: order 4 -> %zu, order 3 -> %zu",
                 k1.size(), k2.size(), k3.size(), k4.size());
        return k1.empty() && !k2.empty() && k3.empty() && !k4.empty();
    });

    gate(8, "boundary coefficient tables", 60, [](std::string& d) {
        SuiteReport rep = run_coeff_suite(kSeed, 8, 8, 6);
        long long cases = 0;
        for (const auto& c : rep.checks) cases += c.cases;
        d = strf("all identities exact over %lld table/ladder cases", cases);
        return rep.all_pass;
    });

    gate(9, "moment transport vs generator", 60, [](std::string& d) {
        double sups[2] = {0, 0};
        for (int mu_case = 0; mu_case < 2; ++mu_case) {
            const ScalarJet mu = mu_case ? scalar_jet_x(2) : scalar_jet_zero(2);
            auto chart = chart_conformal(2, mu, 0.0, 1.0);
            std::mt19937_64 rng(suites_detail::splitmix64(kSeed + mu_case));
            std::uniform_real_distribution<double> dist(-0.6, 0.6);
            auto rand_poly = [&](int deg) {
                Polynomial<double> p(2);
                std::vector<int> e(2, 0);
                for (int dx = 0; dx <= deg; ++dx)
                    for (int dy = 0; dx + dy <= deg; ++dy) {
                        e[0] = dx;
                        e[1] = dy;
                        p.add_term(e, dist(rng));
                    }
                return p;
            };
            std::vector<TensorField> parts;
            for (int m = 0; m <= 3; ++m) {
                if (m == 0) {
                    parts.push_back(field_from_poly(chart, {rand_poly(2)}, 0));
                } else if (m == 1) {
                    parts.push_back(field_from_poly(chart, {rand_poly(2), rand_poly(2)}, 1));
                } else {
                    parts.push_back(angular_pair_field(chart, m,
                                                       scalar_jet_from_poly(rand_poly(2)),
                                                       scalar_jet_from_poly(rand_poly(2))));
                }
            }
            const KineticStack U = make_kinetic_stack(chart, parts);
            sups[mu_case] = kinetic_sup_diff(transport_relations(U), fourier_of_HU(U, mu), 7);
        }
        d = strf("sup gap flat %.2e, mu=x %.2e (budget 1e-6)", sups[0], sups[1]);
        return sups[0] <= 1e-6 && sups[1] <= 1e-6;
    });

    gate(10, "2D conformal Killing = holomorphic", 30, [](std::string& d) {
        double worst_pdu = 0, worst_cr = 0;
        bool all_accept = true;
        double perturbed_min = 1e300;
        for (int mu_case = 0; mu_case < 2; ++mu_case) {
            const ScalarJet mu = mu_case ? scalar_jet_x(2) : scalar_jet_zero(2);
            auto chart = mu_case ? chart_conformal(2, mu, 0.0, 1.0) : chart_euclidean(2);
            for (int m = 1; m <= 3; ++m) {
                // the angular amplitudes carry e^{2m mu} so that the
                // isothermic pair is e^{m mu} times the holomorphic datum
                const double c = mu_case ? 2.0 * m : 0.0;
                for (int k = 0; k <= 3; ++k) {
                    const auto [re, im] = zpow(k);
                    TensorField u = angular_pair_field(chart, m, exp_poly_jet(c, re),
                                                       exp_poly_jet(c, im));
                    const CKReport rep = ck_residual(u);
                    worst_pdu = std::max(worst_pdu, rep.pdu_sup);
                    all_accept = all_accept && rep.accept;
                    auto [a, b] = isothermic_reduce(u, mu);
                    worst_cr = std::max(worst_cr, cr_residual(a, b, mu, m));
                }
            }
            // 10% admixture of conj(z)^2 breaks holomorphy
            const double c = mu_case ? 4.0 : 0.0;
            TensorField bad = angular_pair_field(
                chart, 2, exp_poly_jet(c, poly2({{{2, 0}, 1.1}, {{0, 2}, -1.1}})),
                exp_poly_jet(c, poly2({{{1, 1}, 1.8}})));
            perturbed_min = std::min(perturbed_min, ck_residual(bad).pdu_sup);
        }
        d = strf("holomorphic worst %.2e (budget 1e-9), perturbed min %.2e (must exceed 1e-3)",
                 std::max(worst_pdu, worst_cr), perturbed_min);
        return worst_pdu < 1e-9 && worst_cr < 1e-9 && all_accept && perturbed_min > 1e-3;
    });

    gate(11, "grid decomposition solver", 300, [](std::string& d) {
        const int levels[3] = {17, 33, 65};
        double ev[3], el[3], ef[3];
        bool ok = true;
        for (int t = 0; t < 3; ++t) {
            const int N = levels[t];
            const double h = 1.0 / (N - 1);
            const DecompositionResult res = decompose_field(manufactured(N));
            ok = ok && res.within_tol && res.solve.converged;
            ok = ok && res.jf_residual <= 10 * h * h && res.delta_f_residual <= 10 * h * h;
            ev[t] = grid_norm(grid_sub(res.v, manufactured_v(N)));
            el[t] = grid_norm(grid_sub(res.lambda, manufactured_lambda(N)));
            ef[t] = grid_norm(grid_sub(res.f_tilde, manufactured_ftilde(N)));
        }
        auto order = [](double c, double f) { return std::log2(c / f); };
        const double ov = std::min(order(ev[0], ev[1]), order(ev[1], ev[2]));
        const double ol = std::min(order(el[0], el[1]), order(el[1], el[2]));
        const double of = std::min(order(ef[0], ef[1]), order(ef[1], ef[2]));
        ok = ok && ov >= 1.8 && ol >= 1.8 && of >= 1.8;
        const double eig = smallest_eigenvalue_estimate(assemble_bvp(manufactured(17)).A);
        ok = ok && eig > 0;
        d = strf("orders v/lambda/f~ = %.2f/%.2f/%.2f (need 1.8), min eig %.2f", ov, ol, of,
                 eig);
        return ok;
    });

    std::printf("%d of 11 checks failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
