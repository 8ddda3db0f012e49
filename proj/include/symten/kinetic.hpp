// Spherical-harmonics closure of the kinetic equation: the ladder relations
// between a truncated stack of trace-free moment tensors and the moments of
// the transported function, plus a direct sampling route through the 2D
// geodesic generator for cross-validation.
#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "symten/ckt.hpp"
#include "symten/field.hpp"
#include "symten/sphere.hpp"

namespace symten {

// Moment stack: parts[m] is a rank-m tensor field on a shared chart. The
// function it represents is U(x, xi) = sum_m kappa(u_m(x))(xi) on the unit
// sphere bundle. Parts beyond the stored range are zero by convention.
struct KineticStack {
    std::shared_ptr<const Chart> chart;
    std::vector<TensorField> parts;

    int max_rank() const { return static_cast<int>(parts.size()) - 1; }
};

inline KineticStack make_kinetic_stack(std::shared_ptr<const Chart> chart,
                                       std::vector<TensorField> parts) {
    for (int m = 0; m < static_cast<int>(parts.size()); ++m) {
        if (parts[m].rank != m)
            throw std::invalid_argument("make_kinetic_stack: parts[m] must have rank m");
        if (parts[m].chart != chart)
            throw std::invalid_argument("make_kinetic_stack: chart mismatch");
    }
    return {std::move(chart), std::move(parts)};
}

namespace detail {

inline void require_trace_free(const KineticStack& U, double tol, int per_axis) {
    const auto& chart = *U.chart;
    for (const auto& x : interior_lattice(chart, per_axis)) {
        MetricPoint<double> g = chart.metric(x);
        for (const auto& u : U.parts) {
            if (u.rank < 2) continue;
            if (tensor_norm(trace(u.eval(x), g), g) > tol)
                throw std::invalid_argument("kinetic stack: parts must be trace-free");
        }
    }
}

} // namespace detail

// Moment ladder of the transported function: with u_m = 0 beyond the stack,
//   f_0     = (1/n) delta(u_1),
//   f_{m+1} = p(d u_m) + ((m+2)/(n+2m+2)) delta(u_{m+2}).
// The output stack has one more rank than the input.
inline KineticStack transport_relations(const KineticStack& U, double trace_tol = 1e-8) {
    const int n = U.chart->dim();
    const int M = U.max_rank();
    if (M < 0) throw std::invalid_argument("transport_relations: empty stack");
    detail::require_trace_free(U, trace_tol, 3);

    auto zero_part = [&](int r) { return field_constant(U.chart, SymTensor<double>(n, r)); };
    std::vector<TensorField> f(static_cast<std::size_t>(M) + 2);

    f[0] = (M >= 1) ? field_scale(delta_op(U.parts[1]), 1.0 / n) : zero_part(0);
    for (int m = 0; m <= M; ++m) {
        TensorField part = p_op(d_op(U.parts[m]));
        if (m + 2 <= M) {
            const double c = static_cast<double>(m + 2) / (n + 2 * m + 2);
            part = field_add(part, field_scale(delta_op(U.parts[m + 2]), c));
        }
        f[m + 1] = part;
    }
    return {U.chart, std::move(f)};
}

// eta-directional derivative of the polynomial extension:
// sum_k eta_k d(kappa u)/d(xi_k) evaluated at xi.
inline double kappa_grad_dot(const SymTensor<double>& u, const Vec& xi, const Vec& eta) {
    const int n = u.dim(), m = u.rank();
    if (m == 0) return 0.0;
    double acc = 0;
    MultiIndex I(m, 0);
    bool more = true;
    do {
        const double w = static_cast<double>(multiplicity(I)) * u.at_any(I);
        if (w != 0.0) {
            for (int a = 0; a < m; ++a) {
                double prod = eta[I[a]];
                for (int b = 0; b < m; ++b)
                    if (b != a) prod *= xi[I[b]];
                acc += w * prod;
            }
        }
        more = multi_index_next(n, I);
    } while (more);
    return acc;
}

// H U at (x, theta) on a conformal 2D chart, by analytic differentiation:
// with xi(theta, x) = e^{-mu}(cos t, sin t),
//   dU/dx|_t = kappa(d_x u_m)(xi) - m mu_x kappa(u_m)(xi)   (and likewise y),
//   dU/dt    = <grad_xi kappa(u_m), e^{-mu}(-sin t, cos t)>,
// assembled through the generator e^{-mu}(cos t, sin t, -mu_x sin t + mu_y cos t).
inline double sample_HU(const KineticStack& U, const ScalarJet& mu, const Vec& x, double theta) {
    if (U.chart->dim() != 2) throw std::invalid_argument("sample_HU: 2D charts only");
    const double mv = mu.value(x);
    const Vec mg = mu.grad(x);
    const double emu = std::exp(-mv);
    const double ct = std::cos(theta), st = std::sin(theta);
    const Vec xi = {emu * ct, emu * st};
    const Vec dth_xi = {-emu * st, emu * ct};

    double total = 0;
    for (int m = 0; m <= U.max_rank(); ++m) {
        const TensorField& um = U.parts[m];
        SymTensor<double> ut = um.eval(x);
        auto du = um.d1 ? um.d1(x) : field_d1(um, x);
        const double k0 = kappa_eval(ut, xi);
        const double kx = kappa_eval(du[0], xi);
        const double ky = kappa_eval(du[1], xi);
        const double kth = kappa_grad_dot(ut, xi, dth_xi);
        total += emu * (ct * (kx - m * mg[0] * k0) + st * (ky - m * mg[1] * k0) +
                        (-mg[0] * st + mg[1] * ct) * kth);
    }
    return total;
}

// Fourier route to the same ladder: sample H U in the fibre angle and project
// back onto trace-free moments node by node. Output carries ranks up to M+1.
inline KineticStack fourier_of_HU(const KineticStack& U, const ScalarJet& mu) {
    if (U.chart->dim() != 2) throw std::invalid_argument("fourier_of_HU: 2D charts only");
    const int M = U.max_rank();
    const int M_out = M + 1;

    // One shared projection per evaluation point; each part extracts its rank.
    auto project_at = [U, mu, M_out](const Vec& x) {
        MetricPoint<double> g = U.chart->metric(x);
        auto phi = [&U, &mu, &x](const std::vector<double>& xi) {
            return sample_HU(U, mu, x, std::atan2(xi[1], xi[0]));
        };
        return fourier_project(phi, g, M_out);
    };

    std::vector<TensorField> parts(static_cast<std::size_t>(M_out) + 1);
    for (int m = 0; m <= M_out; ++m) {
        TensorField f;
        f.chart = U.chart;
        f.rank = m;
        f.eval = [project_at, m](const Vec& x) { return project_at(x).parts[m]; };
        parts[m] = std::move(f);
    }
    return {U.chart, std::move(parts)};
}

// Sup over a lattice of the largest componentwise deviation between two
// stacks, compared rank by rank (missing ranks count as zero).
inline double kinetic_sup_diff(const KineticStack& A, const KineticStack& B, int per_axis = 7) {
    const auto& chart = *A.chart;
    const int n = chart.dim();
    const int M = std::max(A.max_rank(), B.max_rank());
    double sup = 0;
    for (const auto& x : interior_lattice(chart, per_axis)) {
        MetricPoint<double> g = chart.metric(x);
        for (int m = 0; m <= M; ++m) {
            SymTensor<double> a = (m <= A.max_rank()) ? A.parts[m].eval(x) : SymTensor<double>(n, m);
            SymTensor<double> b = (m <= B.max_rank()) ? B.parts[m].eval(x) : SymTensor<double>(n, m);
            sup = std::max(sup, detail::tensor_norm(a - b, g));
        }
    }
    return sup;
}

} // namespace symten
