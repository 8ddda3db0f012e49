// Batch verification drivers shared by the CLI and the test binaries.
// Each suite runs a fixed list of identity checks, randomized or exact,
// and reports the worst residual seen per check. Case draws depend only
// on (seed, case index), so sharding across threads cannot change the
// numbers, only the wall time.
#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "symten/boundary_coeffs.hpp"
#include "symten/field.hpp"
#include "symten/harmonic.hpp"
#include "symten/poly_field.hpp"
#include "symten/sphere.hpp"

namespace symten {

struct CheckResult {
    std::string name;
    std::string anchor; // the identity being exercised, in operator shorthand
    double residual = 0.0;
    double budget = 0.0;
    long long cases = 0;
    bool pass = true;
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckResult> checks;
    bool all_pass = true;
    double seconds = 0.0;
};

namespace suites_detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4568bull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline double rel_diff(const SymTensor<double>& a, const SymTensor<double>& b) {
    return (a - b).max_abs() / (1.0 + a.max_abs() + b.max_abs());
}

inline double rel_diff(double a, double b) {
    return std::abs(a - b) / (1.0 + std::abs(a) + std::abs(b));
}

struct Acc {
    double worst = 0.0;
    long long cases = 0;
    void add(double r) {
        worst = std::max(worst, r);
        ++cases;
    }
    void merge(const Acc& o) {
        worst = std::max(worst, o.worst);
        cases += o.cases;
    }
};

inline SymTensor<double> rand_tensor(int n, int m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    SymTensor<double> t(n, m);
    for (int c = 0; c < t.size(); ++c) t[c] = dist(rng);
    return t;
}

// Identity plus a small symmetric bump: Gershgorin keeps every eigenvalue
// above 0.8, so the draw is always a valid metric and never ill-conditioned.
inline MetricPoint<double> rand_metric(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-0.2, 0.2);
    Mat<double> g = mat_identity<double>(n);
    for (int r = 0; r < n; ++r)
        for (int c = r; c < n; ++c) {
            const double v = dist(rng) / n;
            g[r][c] += v;
            if (c != r) g[c][r] += v;
        }
    return MetricPoint<double>(g);
}

inline std::vector<Polynomial<double>> rand_poly_comps(int n, int m, int deg,
                                                       std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-0.3, 0.3);
    std::vector<Polynomial<double>> comps;
    comps.reserve(dim_sym(n, m));
    for (int t = 0; t < dim_sym(n, m); ++t) {
        Polynomial<double> p(n);
        std::vector<int> e(n, 0);
        std::function<void(int, int)> rec = [&](int v, int left) {
            if (v == n) {
                p.add_term(e, dist(rng));
                return;
            }
            for (int d = 0; d <= left; ++d) {
                e[v] = d;
                rec(v + 1, left - d);
            }
            e[v] = 0;
        };
        rec(0, deg);
        comps.push_back(std::move(p));
    }
    return comps;
}

inline PolyTensor<Rational> rand_poly_tensor(int n, int m, int deg, std::mt19937_64& rng) {
    PolyTensor<Rational> u(n, m);
    for (auto& comp : u.comps) {
        std::vector<int> e(n, 0);
        std::function<void(int, int)> rec = [&](int v, int left) {
            if (v == n) {
                long long c = static_cast<long long>(rng() % 19) - 9;
                if (c != 0) comp.add_term(e, Rational(c));
                return;
            }
            for (int d = 0; d <= left; ++d) {
                e[v] = d;
                rec(v + 1, left - d);
            }
            e[v] = 0;
        };
        rec(0, deg);
    }
    return u;
}

inline int env_threads() {
    const char* s = std::getenv("SYMTEN_THREADS");
    if (!s) return 1;
    const int t = std::atoi(s);
    if (t < 1) return 1;
    return std::min(t, 64);
}

inline Rational factorial_q(int k) {
    Rational r = 1;
    for (int t = 2; t <= k; ++t) r *= t;
    return r;
}

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace suites_detail

// Pointwise algebra of i, j, p, q, i_xi, j_xi over random tensors and random
// metrics. Every check is a closed-form identity, so the budget can sit at
// the rounding floor.
inline SuiteReport run_algebra_suite(std::uint64_t seed, int cases = 200, int n_max = 4,
                                     int m_max = 5, double budget = 1e-10,
                                     int threads = 0) {
    using namespace suites_detail;
    enum {
        kTraceLadder1,
        kTraceLadderK,
        kSplitReconstruct,
        kSplitEigen,
        kSphereRestrict,
        kVerticalLap,
        kCovectorTraceSwap,
        kCovectorPairSwap,
        kTraceFreeCovector,
        kTraceAdjoint,
        kSymbolPositive,
        kNumChecks
    };
    static const struct {
        const char* name;
        const char* anchor;
    } kChecks[kNumChecks] = {
        {"metric-trace-commute", "j i = c1 id + c2 i j"},
        {"metric-trace-ladder", "j i^k = c1(k) i^(k-1) + c2(k) i^k j, k = 2, 3"},
        {"trace-split-reconstruct", "u = sum_k i^k u_k with j u_k = 0"},
        {"trace-split-eigenvalue", "j i (i^k w) = lambda_k i^k w on j w = 0"},
        {"sphere-restriction", "kappa(i u) = kappa(u) on the unit sphere of g"},
        {"vertical-laplacian", "Delta_xi kappa(u) = m (m-1) kappa(j u)"},
        {"covector-trace-swap", "j i_xi = 2/(m+1) j_xi + (m-1)/(m+1) i_xi j"},
        {"covector-pair-swap", "j_xi i_xi = |xi|^2/(m+1) id + m/(m+1) i_xi j_xi"},
        {"tracefree-covector-commute", "p i_xi = i_xi p - 2/(m+1) i (j i)^{-1} j_xi p"},
        {"trace-adjoint", "<i u, v> = <u, j v>"},
        {"symbol-positive", "j_xi p i_xi positive definite on ker j"},
    };

    const int nthreads = threads > 0 ? threads : env_threads();
    std::vector<std::array<Acc, kNumChecks>> acc(nthreads);

    auto run_case = [&](std::uint64_t c, std::array<Acc, kNumChecks>& a) {
        std::mt19937_64 rng(splitmix64(seed) ^ splitmix64(c + 1));
        const int n = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(n_max - 1));
        const int m = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(m_max));
        const MetricPoint<double> g = rand_metric(n, rng);
        const SymTensor<double> u = rand_tensor(n, m, rng);
        const SymTensor<double> v = rand_tensor(n, m + 2, rng);
        const SymTensor<double> xi = rand_tensor(n, 1, rng);

        a[kTraceLadder1].add(rel_diff(ji_apply(u, g, 1), ji_commutation_rhs(u, g, 1)));
        for (int k = 2; k <= 3; ++k)
            a[kTraceLadderK].add(rel_diff(ji_apply(u, g, k), ji_commutation_rhs(u, g, k)));

        const HarmonicParts<double> h = harmonic_decompose(u, g);
        double split = rel_diff(harmonic_reconstruct(h, g), u);
        for (const auto& part : h.parts)
            if (part.rank() >= 2)
                split = std::max(split, trace(part, g).max_abs() / (1.0 + part.max_abs()));
        a[kSplitReconstruct].add(split);

        for (int k = 0; k < static_cast<int>(h.parts.size()); ++k) {
            SymTensor<double> x = h.parts[k];
            for (int t = 0; t < k; ++t) x = mul_metric(x, g);
            const SymTensor<double> jix = trace(mul_metric(x, g), g);
            a[kSplitEigen].add(rel_diff(jix, ji_eigenvalue<double>(n, m, k) * x));
        }

        {
            std::vector<double> unit(n);
            for (int p = 0; p < n; ++p) unit[p] = xi[p];
            const double s = kappa_eval(g.metric_tensor(), unit);
            for (auto& c0 : unit) c0 /= std::sqrt(s);
            a[kSphereRestrict].add(
                rel_diff(kappa_eval(mul_metric(u, g), unit), kappa_eval(u, unit)));
        }

        a[kVerticalLap].add(vertical_laplacian_check(u, g) / (1.0 + u.max_abs()));

        {
            SymTensor<double> lhs = trace(i_xi(u, xi), g);
            SymTensor<double> rhs = (2.0 / (m + 1)) * j_xi(u, xi, g);
            if (m >= 2) rhs += (double(m - 1) / (m + 1)) * i_xi(trace(u, g), xi);
            a[kCovectorTraceSwap].add(rel_diff(lhs, rhs));
        }
        {
            double xn2 = 0.0;
            for (int p = 0; p < n; ++p)
                for (int q = 0; q < n; ++q) xn2 += g.g_inv()[p][q] * xi[p] * xi[q];
            SymTensor<double> lhs = j_xi(i_xi(u, xi), xi, g);
            SymTensor<double> rhs = (xn2 / (m + 1)) * u +
                                    (double(m) / (m + 1)) * i_xi(j_xi(u, xi, g), xi);
            a[kCovectorPairSwap].add(rel_diff(lhs, rhs));
        }
        {
            const SymTensor<double> w = project_p(u, g);
            SymTensor<double> lhs = project_p(i_xi(w, xi), g);
            SymTensor<double> rhs =
                i_xi(w, xi) -
                (2.0 / (m + 1)) * mul_metric(ji_inverse(j_xi(w, xi, g), g), g);
            a[kTraceFreeCovector].add(rel_diff(lhs, rhs));
        }

        a[kTraceAdjoint].add(
            rel_diff(inner(mul_metric(u, g), v, g), inner(u, trace(v, g), g)));

        // Building the trace-free basis dominates the whole suite at the top
        // ranks, so the positivity check samples every fourth case.
        if (c % 4 == 0) {
            const std::vector<double> eig = jacobi_eigen(symbol_matrix(xi, g, m));
            const double lo = *std::min_element(eig.begin(), eig.end());
            a[kSymbolPositive].add(lo > 0.0 ? 0.0 : -lo);
        }
    };

    const Timer timer;
    if (nthreads <= 1) {
        for (std::uint64_t c = 0; c < static_cast<std::uint64_t>(cases); ++c)
            run_case(c, acc[0]);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&, t] {
                for (std::uint64_t c = t; c < static_cast<std::uint64_t>(cases);
                     c += nthreads)
                    run_case(c, acc[t]);
            });
        for (auto& th : pool) th.join();
    }

    SuiteReport rep;
    rep.suite = "algebra";
    for (int k = 0; k < kNumChecks; ++k) {
        Acc total;
        for (const auto& a : acc) total.merge(a[k]);
        CheckResult cr;
        cr.name = kChecks[k].name;
        cr.anchor = kChecks[k].anchor;
        cr.residual = total.worst;
        cr.budget = budget;
        cr.cases = total.cases;
        cr.pass = total.worst <= budget;
        rep.all_pass = rep.all_pass && cr.pass;
        rep.checks.push_back(std::move(cr));
    }
    rep.seconds = timer.seconds();
    return rep;
}

// Spherical-harmonic normalization: the sphere inner product of two
// trace-free restrictions equals a fixed dimensional constant times the
// tensor inner product. Verified by quadrature for both basis pairs and
// random trace-free pairs.
inline SuiteReport run_norm_constant_suite(std::uint64_t seed, int n_max = 3, int m_max = 4,
                                           double budget = 1e-9) {
    using namespace suites_detail;
    const Timer timer;
    std::mt19937_64 rng(splitmix64(seed));

    Acc basis_acc, pair_acc;
    for (int n = 2; n <= n_max; ++n) {
        const MetricPoint<double> g = MetricPoint<double>::euclidean(n);
        for (int m = 0; m <= m_max; ++m) {
            const double c = norm_constant(n, m);
            const auto basis = trace_free_basis(n, m, g);
            const int order = 2 * m + 4;
            for (size_t a = 0; a < basis.size(); ++a)
                for (size_t b = a; b < basis.size(); ++b) {
                    auto phi = [&](const std::vector<double>& xi) {
                        return kappa_eval(basis[a], xi);
                    };
                    auto psi = [&](const std::vector<double>& xi) {
                        return kappa_eval(basis[b], xi);
                    };
                    const double got = sphere_inner(n, g, phi, psi, order);
                    const double want = c * (a == b ? 1.0 : 0.0);
                    basis_acc.add(std::abs(got - want) / c);
                }
            for (int rep = 0; rep < 3; ++rep) {
                const SymTensor<double> u = project_p(rand_tensor(n, m, rng), g);
                const SymTensor<double> v = project_p(rand_tensor(n, m, rng), g);
                auto phi = [&](const std::vector<double>& xi) { return kappa_eval(u, xi); };
                auto psi = [&](const std::vector<double>& xi) { return kappa_eval(v, xi); };
                const double got = sphere_inner(n, g, phi, psi, order);
                const double want = c * inner(u, v, g);
                pair_acc.add(std::abs(got - want) / (c * (1.0 + std::abs(inner(u, v, g)))));
            }
        }
    }

    SuiteReport rep;
    rep.suite = "norm";
    auto push = [&](const char* name, const char* anchor, const Acc& a) {
        CheckResult cr;
        cr.name = name;
        cr.anchor = anchor;
        cr.residual = a.worst;
        cr.budget = budget;
        cr.cases = a.cases;
        cr.pass = a.worst <= budget;
        rep.all_pass = rep.all_pass && cr.pass;
        rep.checks.push_back(std::move(cr));
    };
    push("restriction-norm-basis", "<kappa u, kappa v>_S = c(n,m) <u, v>, basis pairs",
         basis_acc);
    push("restriction-norm-random", "<kappa u, kappa v>_S = c(n,m) <u, v>, random pairs",
         pair_acc);
    rep.seconds = timer.seconds();
    return rep;
}

// First-order calculus on 2D charts: commutation of d and delta with the
// trace algebra, the projected commutators, the rough-Laplacian split with
// its curvature correction, and the integration-by-parts identity on the
// flat square. Fields are random polynomials, so every derivative the
// operators take is exact and the budget reflects rounding only.
inline SuiteReport run_differential_suite(std::uint64_t seed, int m_max = 3,
                                          int fields_per_case = 2, double budget = 1e-8) {
    using namespace suites_detail;
    enum {
        kDI,
        kDeltaJ,
        kPdP,
        kPDeltaP,
        kQdQ,
        kQDeltaQ,
        kPdQ,
        kQDeltaP,
        kDeltaISwap,
        kJdSwap,
        kDQComm,
        kQDeltaComm,
        kDPComm,
        kPDeltaComm,
        kLaplaceSplit,
        kGreens,
        kNumChecks
    };
    static const struct {
        const char* name;
        const char* anchor;
    } kChecks[kNumChecks] = {
        {"d-metric-commute", "d i = i d"},
        {"delta-trace-commute", "delta j = j delta"},
        {"tracefree-d-stable", "p d p = p d"},
        {"tracefree-delta-stable", "p delta p = delta p"},
        {"metric-range-d-stable", "q d q = d q"},
        {"metric-range-delta-stable", "q delta q = q delta"},
        {"mixed-d-vanish", "p d q = 0"},
        {"mixed-delta-vanish", "q delta p = 0"},
        {"delta-metric-swap", "delta i = 2/(m+2) d + m/(m+2) i delta"},
        {"trace-d-swap", "j d = 2/(m+1) delta + (m-1)/(m+1) d j"},
        {"d-q-commutator", "d q = q d - m/(n+2m-2) i delta p"},
        {"q-delta-commutator", "q delta = delta q - (m-1)/(n+2m-4) p d j"},
        {"d-p-commutator", "d p = p d + m/(n+2m-2) i delta p"},
        {"p-delta-commutator", "p delta = delta p + (m-1)/(n+2m-4) p d j"},
        {"laplace-split", "delta d = (m d delta + Delta - R)/(m+1)"},
        {"greens-identity", "int <d u, v> + <u, delta v> = boundary <i_nu u, v>"},
    };

    const Timer timer;
    std::mt19937_64 rng(splitmix64(seed ^ 0xd1ffe7ull));
    std::array<Acc, kNumChecks> acc;

    struct NamedChart {
        std::shared_ptr<const Chart> chart;
        bool flat;
    };
    const std::vector<NamedChart> charts = {
        {chart_euclidean(2, 0.0, 1.0), true},
        {chart_conformal(2, scalar_jet_x(2), 0.0, 1.0), false},
        {chart_conformal(2, scalar_jet_half_r2(2), 0.1, 0.9), false},
    };

    const int n = 2;
    for (const auto& nc : charts) {
        const auto pts = interior_lattice(*nc.chart, 3, 0.15);
        for (int m = 0; m <= m_max; ++m) {
            for (int rep = 0; rep < fields_per_case; ++rep) {
                const TensorField u =
                    field_from_poly(nc.chart, rand_poly_comps(n, m, 3, rng), m);
                auto probe = [&](int idx, const TensorField& lhs, const TensorField& rhs) {
                    for (const auto& x : pts)
                        acc[idx].add(rel_diff(lhs.eval(x), rhs.eval(x)));
                };

                probe(kDI, d_op(i_op(u)), i_op(d_op(u)));
                if (m >= 3) probe(kDeltaJ, delta_op(j_op(u)), j_op(delta_op(u)));
                probe(kPdP, p_op(d_op(p_op(u))), p_op(d_op(u)));
                if (m >= 1) probe(kPDeltaP, p_op(delta_op(p_op(u))), delta_op(p_op(u)));
                probe(kQdQ, q_op(d_op(q_op(u))), d_op(q_op(u)));
                if (m >= 1) probe(kQDeltaQ, q_op(delta_op(q_op(u))), q_op(delta_op(u)));
                {
                    const TensorField zero_hi = field_constant(
                        nc.chart, SymTensor<double>(n, m + 1));
                    probe(kPdQ, p_op(d_op(q_op(u))), zero_hi);
                }
                if (m >= 1) {
                    const TensorField zero_lo = field_constant(
                        nc.chart, SymTensor<double>(n, m - 1));
                    probe(kQDeltaP, q_op(delta_op(p_op(u))), zero_lo);
                }

                {
                    TensorField rhs = field_scale(d_op(u), 2.0 / (m + 2));
                    if (m >= 1)
                        rhs = field_add(rhs, field_scale(i_op(delta_op(u)),
                                                         double(m) / (m + 2)));
                    probe(kDeltaISwap, delta_op(i_op(u)), rhs);
                }
                if (m >= 1) {
                    TensorField rhs = field_scale(delta_op(u), 2.0 / (m + 1));
                    if (m >= 2)
                        rhs = field_add(rhs, field_scale(d_op(j_op(u)),
                                                         double(m - 1) / (m + 1)));
                    probe(kJdSwap, j_op(d_op(u)), rhs);
                }

                if (m >= 1) {
                    const TensorField corr =
                        field_scale(i_op(delta_op(p_op(u))),
                                    double(m) / (n + 2 * m - 2));
                    probe(kDQComm, d_op(q_op(u)), field_sub(q_op(d_op(u)), corr));
                    probe(kDPComm, d_op(p_op(u)), field_add(p_op(d_op(u)), corr));
                }
                if (m >= 2) {
                    const TensorField corr =
                        field_scale(p_op(d_op(j_op(u))),
                                    double(m - 1) / (n + 2 * m - 4));
                    probe(kQDeltaComm, q_op(delta_op(u)),
                          field_sub(delta_op(q_op(u)), corr));
                    probe(kPDeltaComm, p_op(delta_op(u)),
                          field_add(delta_op(p_op(u)), corr));
                }

                if (m >= 1) {
                    TensorField rhs = field_scale(
                        field_sub(field_add(field_scale(d_op(delta_op(u)), double(m)),
                                            laplace_op(u)),
                                  curvature_action_field(u)),
                        1.0 / (m + 1));
                    probe(kLaplaceSplit, delta_op(d_op(u)), rhs);
                }

                if (nc.flat && m <= m_max - 1) {
                    const TensorField v =
                        field_from_poly(nc.chart, rand_poly_comps(n, m + 1, 3, rng), m + 1);
                    acc[kGreens].add(greens_residual(u, v, 8));
                }
            }
        }
    }

    SuiteReport rep;
    rep.suite = "differential";
    for (int k = 0; k < kNumChecks; ++k) {
        CheckResult cr;
        cr.name = kChecks[k].name;
        cr.anchor = kChecks[k].anchor;
        cr.residual = acc[k].worst;
        cr.budget = budget;
        cr.cases = acc[k].cases;
        cr.pass = acc[k].worst <= budget;
        rep.all_pass = rep.all_pass && cr.pass;
        rep.checks.push_back(std::move(cr));
    }
    rep.seconds = timer.seconds();
    return rep;
}

// Flat-space power identities over rational polynomial fields. Both sides
// are computed exactly, so the expected residual is literally zero and any
// nonzero coefficient in the difference is a failure.
inline SuiteReport run_flat_exact_suite(std::uint64_t seed, int k_max = 3, int m_max = 3) {
    using namespace suites_detail;
    using R = Rational;
    enum { kPower, kTracePower, kDivLadder, kSplitFlat, kNumChecks };
    static const struct {
        const char* name;
        const char* anchor;
    } kChecks[kNumChecks] = {
        {"power-commutator",
         "delta^l d^k = l! (m+k-l)!/(m+k)! sum_p C(k,p) C(m,l-p) d^(k-p) Lap^p delta^(l-p)"},
        {"trace-of-power",
         "j d^k = (2km d^(k-1) delta + k(k-1) d^(k-2) Lap + m(m-1) d^k j)/((m+k-1)(m+k))"},
        {"divergence-ladder-metric",
         "delta^k i = (2k(m-k+2) d delta^(k-1) + k(k-1) Lap delta^(k-2) + "
         "(m-k+1)(m-k+2) i delta^k)/((m+1)(m+2))"},
        {"laplace-split-flat", "delta d = (m d delta + Lap)/(m+1)"},
    };

    const Timer timer;
    std::mt19937_64 rng(splitmix64(seed ^ 0xf1a7ull));
    std::array<Acc, kNumChecks> acc;

    auto d_pow = [](PolyTensor<R> u, int k) {
        for (int t = 0; t < k; ++t) u = pt_d(u);
        return u;
    };
    auto delta_pow = [](PolyTensor<R> u, int k) {
        for (int t = 0; t < k; ++t) u = pt_delta(u);
        return u;
    };
    auto lap_pow = [](PolyTensor<R> u, int k) {
        for (int t = 0; t < k; ++t) u = pt_laplace(u);
        return u;
    };
    auto score = [&](int idx, const PolyTensor<R>& lhs, const PolyTensor<R>& rhs) {
        const PolyTensor<R> diff = lhs - rhs;
        acc[idx].add(diff.is_zero() ? 0.0 : diff.max_abs_coeff());
    };

    for (int n = 2; n <= 3; ++n) {
        for (int m = 0; m <= m_max; ++m) {
            for (int k = 0; k <= k_max; ++k) {
                for (int l = 0; l <= k_max; ++l) {
                    if (l > m + k) continue;
                    const PolyTensor<R> u = rand_poly_tensor(n, m, k + l + 2, rng);
                    PolyTensor<R> rhs(n, m + k - l);
                    for (int p = 0; p <= std::min(k, l); ++p) {
                        const Rational cp =
                            Rational(binom_z(k, p)) * Rational(binom_z(m, l - p));
                        if (cp == 0) continue;
                        rhs += d_pow(lap_pow(delta_pow(u, l - p), p), k - p) * cp;
                    }
                    const Rational pre = factorial_q(l) * factorial_q(m + k - l) /
                                         factorial_q(m + k);
                    score(kPower, delta_pow(d_pow(u, k), l), rhs * pre);
                }

                if (m + k >= 2 && k >= 1) {
                    const PolyTensor<R> u = rand_poly_tensor(n, m, k + 2, rng);
                    PolyTensor<R> rhs(n, m + k - 2);
                    if (m >= 1)
                        rhs += d_pow(pt_delta(u), k - 1) * Rational(2LL * k * m);
                    if (k >= 2)
                        rhs += d_pow(pt_laplace(u), k - 2) *
                               Rational(static_cast<long long>(k) * (k - 1));
                    if (m >= 2)
                        rhs += d_pow(pt_j(u), k) *
                               Rational(static_cast<long long>(m) * (m - 1));
                    const Rational pre(1, static_cast<long long>(m + k - 1) * (m + k));
                    score(kTracePower, pt_j(d_pow(u, k)), rhs * pre);
                }

                if (k <= m + 2) {
                    const PolyTensor<R> u = rand_poly_tensor(n, m, k + 2, rng);
                    PolyTensor<R> rhs(n, m - k + 2);
                    if (k >= 1 && k <= m + 1)
                        rhs += pt_d(delta_pow(u, k - 1)) *
                               Rational(2LL * k * (m - k + 2));
                    if (k >= 2)
                        rhs += pt_laplace(delta_pow(u, k - 2)) *
                               Rational(static_cast<long long>(k) * (k - 1));
                    if (k <= m)
                        rhs += pt_i(delta_pow(u, k)) *
                               Rational(static_cast<long long>(m - k + 1) * (m - k + 2));
                    const Rational pre(1, static_cast<long long>(m + 1) * (m + 2));
                    score(kDivLadder, delta_pow(pt_i(u), k), rhs * pre);
                }
            }

            {
                const PolyTensor<R> u = rand_poly_tensor(n, m, 4, rng);
                PolyTensor<R> rhs = pt_laplace(u) * Rational(1, m + 1);
                if (m >= 1)
                    rhs += pt_d(pt_delta(u)) * Rational(m, m + 1);
                score(kSplitFlat, pt_delta(pt_d(u)), rhs);
            }
        }
    }

    SuiteReport rep;
    rep.suite = "flat-exact";
    for (int k = 0; k < kNumChecks; ++k) {
        CheckResult cr;
        cr.name = kChecks[k].name;
        cr.anchor = kChecks[k].anchor;
        cr.residual = acc[k].worst;
        cr.budget = 0.0;
        cr.cases = acc[k].cases;
        cr.pass = acc[k].worst == 0.0;
        rep.all_pass = rep.all_pass && cr.pass;
        rep.checks.push_back(std::move(cr));
    }
    rep.seconds = timer.seconds();
    return rep;
}

// Boundary-ladder coefficient combinatorics, all exact rational arithmetic:
// closed forms against their recurrences, the two sum rules, the rejected
// misprinted variant of the odd sum rule, the assembled ladder against its
// independent recursion, and the support pattern of the reduction
// coefficients.
inline SuiteReport run_coeff_suite(std::uint64_t seed, int n_max = 8, int m_max = 8,
                                   int mp_max = 6) {
    using namespace suites_detail;
    const Timer timer;
    SuiteReport rep;
    rep.suite = "coeffs";

    auto push = [&](const char* name, const char* anchor, long long cases, bool good) {
        CheckResult cr;
        cr.name = name;
        cr.anchor = anchor;
        cr.residual = good ? 0.0 : 1.0;
        cr.budget = 0.0;
        cr.cases = cases;
        cr.pass = good;
        rep.all_pass = rep.all_pass && cr.pass;
        rep.checks.push_back(std::move(cr));
    };

    {
        bool ok = true;
        long long cases = 0;
        for (int n = 2; n <= n_max; ++n)
            for (int m = 0; m <= m_max; ++m) {
                ok = ok &&
                     coeff_table_a(n, m, CoeffSource::ClosedForm).vals ==
                         coeff_table_a(n, m, CoeffSource::Recurrence).vals &&
                     coeff_table_b(n, m, CoeffSource::ClosedForm).vals ==
                         coeff_table_b(n, m, CoeffSource::Recurrence).vals;
                ++cases;
            }
        push("table-dual-route", "closed-form a, b tables equal their recurrences",
             cases, ok);
    }
    {
        bool ok535 = true, ok536 = true, misprint_rejected = true;
        long long cases = 0, nontrivial = 0;
        for (int n = 2; n <= n_max; ++n)
            for (int m = 0; m <= m_max; ++m) {
                ok535 = ok535 && verify_identity_535(n, m);
                ok536 = ok536 && verify_identity_536(n, m);
                ++cases;
                if (m >= 1) {
                    misprint_rejected =
                        misprint_rejected && !identity_536_printed_variant(n, m);
                    ++nontrivial;
                }
            }
        push("sum-rule-even", "sum_k a(s,k) telescopes to the even seed", cases, ok535);
        push("sum-rule-odd", "sum_k b(s,k) telescopes to the odd seed", cases, ok536);
        push("sum-rule-odd-misprint-rejected",
             "variant with denominator (s+1)(2s+1) fails everywhere", nontrivial,
             misprint_rejected);
    }
    {
        std::mt19937_64 rng(splitmix64(seed ^ 0xb0a2dull));
        auto rnd = [&] {
            return Rational(static_cast<long long>(rng() % 2001) - 1000,
                            1 + static_cast<long long>(rng() % 97));
        };
        bool routes = true, chains = true;
        long long cases = 0;
        const std::pair<int, int> shapes[] = {{3, 1}, {3, 2}, {4, 2}, {4, 3}};
        for (const auto& [n, m] : shapes) {
            const MetricPoint<Rational> g = MetricPoint<Rational>::euclidean(n - 1);
            SymTensor<Rational> u2m(n - 1, 2 * m), u2m1(n - 1, 2 * m + 1);
            for (int t = 0; t < u2m.size(); ++t) u2m[t] = rnd();
            for (int t = 0; t < u2m1.size(); ++t) u2m1[t] = rnd();
            const auto v = normal_derivative_tensors(u2m, u2m1, g, n, m);
            const auto v2 = normal_derivative_tensors_recursive(u2m, u2m1, g, n, m);
            for (int s = 0; s <= 2 * m + 1; ++s)
                routes = routes && (v[s] - v2[s]).is_zero();
            for (int s = 0; s <= m - 1; ++s) {
                chains = chains && (v[2 * s] + trace(v[2 * s + 2], g)).is_zero() &&
                         (v[2 * s + 1] + trace(v[2 * s + 3], g)).is_zero();
            }
            ++cases;
        }
        push("ladder-dual-route", "coefficient ladder equals the two-term recursion",
             cases, routes);
        push("ladder-trace-chain", "v^(s) = -j v^(s+2) down both parities", cases,
             chains);
    }
    {
        bool ok = true;
        long long cases = 0;
        for (int m = 1; m <= mp_max; ++m)
            for (int l = 0; l <= 2 * m; ++l) {
                const auto [a_lo, a_hi] = ap_support(m, l);
                const auto [b_lo, b_hi] = bp_support(m, l);
                for (int p = -2; p <= 2 * m + 2; ++p) {
                    for (int n = 2; n <= n_max; ++n)
                        if ((p < a_lo || p > a_hi) && ap_coeff(n, m, l, p) != 0) ok = false;
                    if ((p < b_lo || p > b_hi) && bp_coeff(m, l, p) != 0) ok = false;
                }
                if (a_lo <= a_hi)
                    ok = ok && ap_coeff(3, m, l, a_lo) != 0 && ap_coeff(3, m, l, a_hi) != 0;
                ++cases;
            }
        push("reduction-support", "a', b' vanish outside their index windows", cases, ok);
    }

    rep.seconds = timer.seconds();
    return rep;
}

} // namespace symten
