// Conformal Killing tensor machinery: residual detection on charts, exact
// polynomial kernels on flat space, the dimension bound, and the 2D
// isothermic reduction to a Cauchy-Riemann system.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "symten/field.hpp"
#include "symten/linalg.hpp"
#include "symten/poly_field.hpp"
#include "symten/rational.hpp"
#include "symten/sphere.hpp"

namespace symten {

// Dimension of the space of trace-free conformal Killing rank-m fields on
// flat n-space (n >= 3):
//   (n+m-3)! (n+m-2)! (n+2m-2)(n+2m-1)(n+2m) / (m! (m+1)! (n-2)! n!).
inline long long ck_dimension_bound(int n, int m) {
    if (n < 3) throw std::invalid_argument("ck_dimension_bound: stated for n >= 3");
    if (m < 0) throw std::invalid_argument("ck_dimension_bound: m >= 0");
    BigInt num = big_factorial(n + m - 3) * big_factorial(n + m - 2);
    num *= (n + 2 * m - 2);
    num *= (n + 2 * m - 1);
    num *= (n + 2 * m);
    BigInt den = big_factorial(m) * big_factorial(m + 1) * big_factorial(n - 2) * big_factorial(n);
    if (num % den != 0) throw std::logic_error("ck_dimension_bound: non-integer value");
    return static_cast<long long>(BigInt(num / den));
}

struct CKReport {
    double pdu_sup = 0; // sup |p(du)|
    double ju_sup = 0;  // sup |j(u)|
    double dv_gap = 0;  // sup |du - i v| with v recovered from the divergence
    double tol = 0;
    bool accept = false;
};

namespace detail {

inline double tensor_norm(const SymTensor<double>& w, const MetricPoint<double>& g) {
    return std::sqrt(std::max(0.0, inner(w, w, g)));
}

} // namespace detail

// Pointwise conformal Killing test over a deterministic interior lattice:
// a trace-free conformal Killing field satisfies p(du) = 0 and j(u) = 0,
// and then du = iv holds with v = (m/(n+2m-2)) delta(u).
inline CKReport ck_residual(const TensorField& u, double tol = 1e-9, int per_axis = 11) {
    const auto& chart = *u.chart;
    const int n = chart.dim();
    const int m = u.rank;
    CKReport rep;
    rep.tol = tol;

    TensorField du = d_op(u);
    TensorField pdu = p_op(du);
    auto pts = interior_lattice(*u.chart, per_axis);

    if (m == 0) {
        for (const auto& x : pts) {
            MetricPoint<double> g = chart.metric(x);
            rep.pdu_sup = std::max(rep.pdu_sup, detail::tensor_norm(du.eval(x), g));
        }
        rep.ju_sup = 0;
        rep.dv_gap = rep.pdu_sup;
        rep.accept = rep.pdu_sup <= tol;
        return rep;
    }

    TensorField dv = delta_op(u);
    const double c = static_cast<double>(m) / (n + 2 * m - 2);
    for (const auto& x : pts) {
        MetricPoint<double> g = chart.metric(x);
        rep.pdu_sup = std::max(rep.pdu_sup, detail::tensor_norm(pdu.eval(x), g));
        if (m >= 2)
            rep.ju_sup = std::max(rep.ju_sup, detail::tensor_norm(trace(u.eval(x), g), g));
        SymTensor<double> gap = du.eval(x) - mul_metric(dv.eval(x) * c, g);
        rep.dv_gap = std::max(rep.dv_gap, detail::tensor_norm(gap, g));
    }
    rep.accept = rep.pdu_sup <= tol && rep.ju_sup <= tol;
    return rep;
}

// v = (m/(n+2m-2)) delta(u), the unique factor field when u is trace-free
// conformal Killing. Rejects inputs with a visible trace.
inline TensorField recover_v(const TensorField& u, double trace_tol = 1e-8, int per_axis = 5) {
    if (u.rank < 1) throw std::invalid_argument("recover_v: rank >= 1 required");
    const auto& chart = *u.chart;
    if (u.rank >= 2) {
        for (const auto& x : interior_lattice(*u.chart, per_axis)) {
            MetricPoint<double> g = chart.metric(x);
            if (detail::tensor_norm(trace(u.eval(x), g), g) > trace_tol)
                throw std::invalid_argument("recover_v: input is not trace-free");
        }
    }
    const double c = static_cast<double>(u.rank) / (chart.dim() + 2 * u.rank - 2);
    return field_scale(delta_op(u), c);
}

// ----------------------------------------------------------------------------
// Exact polynomial kernels on flat space.

struct CKConstraint {
    enum class Kind { VanishHyperplane, VanishLine, JetVanish };
    Kind kind = Kind::VanishHyperplane;
    int order = 0; // JetVanish only: kill all coefficients of total degree <= order

    static CKConstraint hyperplane() { return {Kind::VanishHyperplane, 0}; }
    static CKConstraint line() { return {Kind::VanishLine, 0}; }
    static CKConstraint jet(int order) { return {Kind::JetVanish, order}; }
};

namespace detail {

inline std::vector<std::vector<int>> monomials_up_to(int n, int degree) {
    std::vector<std::vector<int>> out;
    std::vector<int> e(n, 0);
    // Odometer over exponents bounded by total degree.
    while (true) {
        int sum = 0;
        for (int v : e) sum += v;
        if (sum <= degree) out.push_back(e);
        int k = n - 1;
        while (k >= 0) {
            if (++e[k] > degree) {
                e[k] = 0;
                --k;
            } else {
                break;
            }
        }
        if (k < 0) break;
    }
    return out;
}

inline bool constraint_drops(const CKConstraint& c, int n, const std::vector<int>& expo) {
    switch (c.kind) {
    case CKConstraint::Kind::VanishHyperplane:
        // u = 0 on {x_n = 0}: every monomial surviving there has no x_n factor.
        return expo[n - 1] == 0;
    case CKConstraint::Kind::VanishLine: {
        // u = 0 on the x_1 axis: kill monomials depending on x_1 alone.
        for (int v = 1; v < n; ++v)
            if (expo[v] != 0) return false;
        return true;
    }
    case CKConstraint::Kind::JetVanish: {
        int sum = 0;
        for (int v : expo) sum += v;
        return sum <= c.order;
    }
    }
    return false;
}

} // namespace detail

// Kernel of {p(du) = 0, j(u) = 0} over rank-m polynomial fields of degree
// <= degree on flat n-space, with optional linear vanishing constraints
// imposed as exact coefficient conditions. Exact rational elimination.
inline std::vector<PolyTensor<Rational>> constrained_ck_kernel(
    int n, int m, int degree, const std::vector<CKConstraint>& constraints,
    std::size_t unknown_cap = 20000) {
    if (n < 2 || m < 0 || degree < 0) throw std::invalid_argument("ck kernel: bad parameters");

    const auto monos = detail::monomials_up_to(n, degree);
    const int ncomp = dim_sym(n, m);

    // Unknowns: coefficient of monomial a in component t, minus the ones a
    // constraint forces to zero.
    struct Unknown {
        int comp;
        int mono;
    };
    std::vector<Unknown> unknowns;
    for (int t = 0; t < ncomp; ++t)
        for (int a = 0; a < static_cast<int>(monos.size()); ++a) {
            bool dropped = false;
            for (const auto& c : constraints)
                if (detail::constraint_drops(c, n, monos[a])) {
                    dropped = true;
                    break;
                }
            if (!dropped) unknowns.push_back({t, a});
        }
    if (unknowns.size() > unknown_cap)
        throw std::runtime_error("ck kernel: unknown count exceeds cap");

    // Row ids keyed by (equation family, output component, output monomial).
    std::map<std::tuple<int, int, std::uint64_t>, int> row_of;
    std::vector<std::map<int, Rational>> rows;
    auto row_id = [&](int fam, int comp, std::uint64_t key) {
        auto it = row_of.find({fam, comp, key});
        if (it == row_of.end()) {
            it = row_of.emplace(std::make_tuple(fam, comp, key), static_cast<int>(rows.size()))
                     .first;
            rows.emplace_back();
        }
        return it->second;
    };

    for (int c = 0; c < static_cast<int>(unknowns.size()); ++c) {
        PolyTensor<Rational> e(n, m);
        e.comps[unknowns[c].comp].add_term(monos[unknowns[c].mono], Rational(1));
        PolyTensor<Rational> pdu = pt_p(pt_d(e));
        for (int t = 0; t < static_cast<int>(pdu.comps.size()); ++t)
            for (const auto& [key, coeff] : pdu.comps[t].terms())
                rows[row_id(0, t, key)][c] = coeff;
        if (m >= 2) {
            PolyTensor<Rational> ju = pt_j(e);
            for (int t = 0; t < static_cast<int>(ju.comps.size()); ++t)
                for (const auto& [key, coeff] : ju.comps[t].terms())
                    rows[row_id(1, t, key)][c] = coeff;
        }
    }

    auto basis = sparse_nullspace<Rational>(std::move(rows), static_cast<int>(unknowns.size()));

    std::vector<PolyTensor<Rational>> out;
    out.reserve(basis.size());
    for (const auto& vec : basis) {
        PolyTensor<Rational> u(n, m);
        for (int c = 0; c < static_cast<int>(vec.size()); ++c)
            if (vec[c] != 0) u.comps[unknowns[c].comp].add_term(monos[unknowns[c].mono], vec[c]);
        out.push_back(std::move(u));
    }
    return out;
}

inline std::vector<PolyTensor<Rational>> poly_ck_kernel(int n, int m, int degree,
                                                        std::size_t unknown_cap = 20000) {
    return constrained_ck_kernel(n, m, degree, {}, unknown_cap);
}

// ----------------------------------------------------------------------------
// Two-dimensional isothermic reduction.

// On a chart with metric e^{2 mu}(dx^2 + dy^2), the unit-sphere restriction
// of a trace-free rank-m field is a pure m-th harmonic in the fibre angle:
//   (restriction)(x, theta) = a(x) cos(m theta) + b(x) sin(m theta),
// with theta measured against the x-axis, i.e. xi = e^{-mu}(cos t, sin t).
// The pair (a, b) is extracted by a discrete Fourier transform in theta; the
// returned scalar fields carry first derivatives computed from the jets of u
// and mu, so downstream difference quotients are not needed.
inline std::pair<TensorField, TensorField> isothermic_reduce(const TensorField& u,
                                                             const ScalarJet& mu) {
    if (u.chart->dim() != 2) throw std::invalid_argument("isothermic_reduce: 2D charts only");
    const int m = u.rank;
    const int S = 4 * (m + 1);

    auto u_eval = u.eval;
    auto u_d1 = [u](const Vec& x) {
        return u.d1 ? u.d1(x) : field_d1(u, x);
    };

    // lambda(x, theta) and its spatial gradient. Differentiating through the
    // factor e^{-m mu} contributes -m (grad mu) lambda.
    struct Sample {
        double val;
        double dx, dy;
    };
    auto sample = [u_eval, u_d1, mu, m](const Vec& x, double theta) {
        const double mv = mu.value(x);
        const Vec mg = mu.grad(x);
        const double emu = std::exp(-mv);
        std::vector<double> xi = {emu * std::cos(theta), emu * std::sin(theta)};
        SymTensor<double> ut = u_eval(x);
        auto du = u_d1(x);
        Sample s;
        s.val = kappa_eval(ut, xi);
        s.dx = kappa_eval(du[0], xi) - m * mg[0] * s.val;
        s.dy = kappa_eval(du[1], xi) - m * mg[1] * s.val;
        return s;
    };

    auto project = [sample, m, S](const Vec& x, bool sine) {
        Sample acc{0, 0, 0};
        for (int s = 0; s < S; ++s) {
            const double th = 2.0 * M_PI * s / S;
            const double w = (m == 0 ? 1.0 : 2.0) / S *
                             (sine ? std::sin(m * th) : std::cos(m * th));
            Sample smp = sample(x, th);
            acc.val += w * smp.val;
            acc.dx += w * smp.dx;
            acc.dy += w * smp.dy;
        }
        return acc;
    };

    auto make_field = [&](bool sine) {
        TensorField f;
        f.chart = u.chart;
        f.rank = 0;
        f.eval = [project, sine](const Vec& x) {
            SymTensor<double> out(2, 0);
            out[0] = project(x, sine).val;
            return out;
        };
        f.d1 = [project, sine](const Vec& x) {
            Sample s = project(x, sine);
            std::vector<SymTensor<double>> g(2, SymTensor<double>(2, 0));
            g[0][0] = s.dx;
            g[1][0] = s.dy;
            return g;
        };
        return f;
    };

    return {make_field(false), make_field(true)};
}

// Constant 2D tensors whose circle restrictions are the pure harmonics:
// kappa(cos_harmonic_tensor(m))(cos t, sin t) = cos(m t), and likewise for
// sine. Components read off the binomial expansion of (z1 + i z2)^m.
inline SymTensor<double> cos_harmonic_tensor(int m) {
    SymTensor<double> t(2, m);
    for (int k = 0; k <= m; k += 2) {
        MultiIndex idx(m, 0);
        for (int a = 0; a < k; ++a) idx[m - 1 - a] = 1;
        t.at(idx) = (k % 4 == 0) ? 1.0 : -1.0;
    }
    return t;
}

inline SymTensor<double> sin_harmonic_tensor(int m) {
    SymTensor<double> t(2, m);
    for (int k = 1; k <= m; k += 2) {
        MultiIndex idx(m, 0);
        for (int a = 0; a < k; ++a) idx[m - 1 - a] = 1;
        t.at(idx) = (k % 4 == 1) ? 1.0 : -1.0;
    }
    return t;
}

// u(x) = A(x) cos_harmonic + B(x) sin_harmonic: the general trace-free
// rank-m field on a 2D chart, parameterized by two scalar jets. Carries
// analytic first and second derivatives.
inline TensorField angular_pair_field(std::shared_ptr<const Chart> chart, int m,
                                      const ScalarJet& A, const ScalarJet& B) {
    if (chart->dim() != 2) throw std::invalid_argument("angular_pair_field: 2D charts only");
    auto tc = std::make_shared<SymTensor<double>>(cos_harmonic_tensor(m));
    auto ts = std::make_shared<SymTensor<double>>(sin_harmonic_tensor(m));
    TensorField f;
    f.chart = std::move(chart);
    f.rank = m;
    f.eval = [tc, ts, A, B](const Vec& x) { return *tc * A.value(x) + *ts * B.value(x); };
    f.d1 = [tc, ts, A, B](const Vec& x) {
        Vec ga = A.grad(x), gb = B.grad(x);
        std::vector<SymTensor<double>> out;
        out.reserve(2);
        for (int k = 0; k < 2; ++k) out.push_back(*tc * ga[k] + *ts * gb[k]);
        return out;
    };
    f.d2 = [tc, ts, A, B](const Vec& x) {
        Mat<double> ha = A.hess(x), hb = B.hess(x);
        std::vector<std::vector<SymTensor<double>>> out(2);
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) out[k].push_back(*tc * ha[k][l] + *ts * hb[k][l]);
        return out;
    };
    return f;
}

// Sup norm of the first-order system characterizing conformal Killing data
// in isothermic coordinates:
//   a_x - b_y - m(mu_x a - mu_y b) = 0,
//   a_y + b_x - m(mu_y a + mu_x b) = 0.
inline double cr_residual(const TensorField& a, const TensorField& b, const ScalarJet& mu,
                          int m, int per_axis = 11) {
    if (a.chart->dim() != 2) throw std::invalid_argument("cr_residual: 2D charts only");
    double sup = 0;
    for (const auto& x : interior_lattice(*a.chart, per_axis)) {
        const Vec mg = mu.grad(x);
        auto da = a.d1 ? a.d1(x) : field_d1(a, x);
        auto db = b.d1 ? b.d1(x) : field_d1(b, x);
        const double av = a.eval(x)[0], bv = b.eval(x)[0];
        const double ax = da[0][0], ay = da[1][0];
        const double bx = db[0][0], by = db[1][0];
        const double r1 = ax - by - m * (mg[0] * av - mg[1] * bv);
        const double r2 = ay + bx - m * (mg[1] * av + mg[0] * bv);
        sup = std::max({sup, std::abs(r1), std::abs(r2)});
    }
    return sup;
}

// Geodesic flow generator on the unit circle bundle of a conformal 2D chart:
//   H = e^{-mu} (cos t d/dx + sin t d/dy + (-mu_x sin t + mu_y cos t) d/dt).
inline std::array<double, 3> geodesic_generator_2d(const ScalarJet& mu, double x, double y,
                                                   double theta) {
    const Vec pt = {x, y};
    const double emu = std::exp(-mu.value(pt));
    const Vec mg = mu.grad(pt);
    return {emu * std::cos(theta), emu * std::sin(theta),
            emu * (-mg[0] * std::sin(theta) + mg[1] * std::cos(theta))};
}

} // namespace symten
