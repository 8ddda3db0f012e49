// Finite-difference decomposition of a symmetric tensor field on the flat
// unit square: f = dv + i(lambda) + f~ with v vanishing on the boundary and
// f~ trace-free with vanishing interior divergence. The potential solves the
// Dirichlet problem (delta p d) v = delta p f.
//
// Discretization: the quadratic form |p d v - p f|^2 is assembled from
// forward and backward difference rows at equal weight, so the operator is a
// Gram matrix (symmetric positive definite on the Dirichlet subspace by
// construction) and its interior stencil is the standard second-order
// central composite; for scalar potentials it is exactly the 5-point
// Laplacian. A plain averaged central-difference matrix for d is singular
// here (checkerboard kernel on odd grids), which is why the two one-sided
// Gram terms are used instead. Components are carried in
// multiplicity-weighted coordinates, making the grid inner product Euclidean
// and the trace-free projector an orthogonal one.
#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "symten/harmonic.hpp"
#include "symten/linalg.hpp"
#include "symten/metric.hpp"

namespace symten {

// Tensor samples on an N x N node grid over [0,1]^2, x index slow.
struct GridField {
    int N = 0;
    int rank = 0;
    std::vector<SymTensor<double>> vals;

    GridField() = default;
    GridField(int N_, int rank_)
        : N(N_), rank(rank_),
          vals(static_cast<std::size_t>(N_) * N_, SymTensor<double>(2, rank_)) {}

    double h() const { return 1.0 / (N - 1); }
    SymTensor<double>& at(int ix, int iy) { return vals[static_cast<std::size_t>(ix) * N + iy]; }
    const SymTensor<double>& at(int ix, int iy) const {
        return vals[static_cast<std::size_t>(ix) * N + iy];
    }
};

template <class F>
GridField grid_sample(int N, int rank, F&& f) {
    GridField g(N, rank);
    const double h = g.h();
    for (int ix = 0; ix < N; ++ix)
        for (int iy = 0; iy < N; ++iy) g.at(ix, iy) = f(ix * h, iy * h);
    return g;
}

// Discrete L2 norm: sqrt(h^2 sum_nodes |u|^2) with multiplicity weights.
inline double grid_norm(const GridField& u) {
    MetricPoint<double> e = MetricPoint<double>::euclidean(2);
    double acc = 0;
    for (const auto& t : u.vals) acc += inner(t, t, e);
    return std::sqrt(u.h() * u.h() * acc);
}

inline GridField grid_sub(const GridField& a, const GridField& b) {
    if (a.N != b.N || a.rank != b.rank) throw std::invalid_argument("grid_sub: shape mismatch");
    GridField r = a;
    for (std::size_t t = 0; t < r.vals.size(); ++t) r.vals[t] = r.vals[t] - b.vals[t];
    return r;
}

namespace detail {

inline std::vector<MultiIndex> sym_comps(int rank) {
    std::vector<MultiIndex> out;
    MultiIndex idx(rank, 0);
    do out.push_back(idx);
    while (multi_index_next(2, idx));
    return out;
}

// One term of (dv)_K = (1/m) sum_a D_{K_a} v_{K minus a}.
struct DTerm {
    int axis;
    int in_comp;
    double coeff;
};

inline std::vector<std::vector<DTerm>> d_stencil(int m) {
    std::vector<std::vector<DTerm>> rows;
    for (const auto& K : sym_comps(m)) {
        std::vector<DTerm> terms;
        for (int a = 0; a < m; ++a) {
            MultiIndex sub;
            for (int b = 0; b < m; ++b)
                if (b != a) sub.push_back(K[b]);
            const int c = multi_index_rank(2, sub);
            bool merged = false;
            for (auto& t : terms)
                if (t.axis == K[a] && t.in_comp == c) {
                    t.coeff += 1.0 / m;
                    merged = true;
                    break;
                }
            if (!merged) terms.push_back({K[a], c, 1.0 / m});
        }
        rows.push_back(std::move(terms));
    }
    return rows;
}

// Trace-free projector at rank m in multiplicity-weighted coordinates,
// where it is symmetric and idempotent.
inline std::vector<std::vector<double>> weighted_projector(int m) {
    MetricPoint<double> e = MetricPoint<double>::euclidean(2);
    const auto comps = sym_comps(m);
    const int C = static_cast<int>(comps.size());
    std::vector<double> w(C);
    for (int c = 0; c < C; ++c) w[c] = std::sqrt(static_cast<double>(multiplicity(comps[c])));
    std::vector<std::vector<double>> P(C, std::vector<double>(C, 0.0));
    for (int c = 0; c < C; ++c) {
        SymTensor<double> unit(2, m);
        unit[c] = 1.0;
        SymTensor<double> pc = project_p(unit, e);
        for (int r = 0; r < C; ++r) P[r][c] = w[r] * pc[r] / w[c];
    }
    return P;
}

} // namespace detail

// Assembled Dirichlet problem (delta p d) v = delta p f in Gram form. Dofs
// cover every node; boundary dofs carry identity rows and zero right side.
struct BvpSystem {
    int N = 0;
    int m = 0;
    int comps = 0;
    CsrMatrix A;
    std::vector<double> b;
    std::vector<char> boundary;
};

inline BvpSystem assemble_bvp(const GridField& f) {
    const int m = f.rank, N = f.N;
    if (m != 1 && m != 2) throw std::invalid_argument("assemble_bvp: rank must be 1 or 2");
    if (N < 5) throw std::invalid_argument("assemble_bvp: mesh too coarse");

    const auto in_comps = detail::sym_comps(m - 1);
    const auto out_comps = detail::sym_comps(m);
    const int Ci = static_cast<int>(in_comps.size());
    const int Co = static_cast<int>(out_comps.size());
    const auto dsten = detail::d_stencil(m);
    const auto P = detail::weighted_projector(m);
    std::vector<double> w_out(Co);
    for (int c = 0; c < Co; ++c)
        w_out[c] = std::sqrt(static_cast<double>(multiplicity(out_comps[c])));
    const double h = f.h();

    const int dofs = N * N * Ci;
    auto dof = [&](int ix, int iy, int c) { return (ix * N + iy) * Ci + c; };
    std::vector<char> bdry(dofs, 0);
    for (int ix = 0; ix < N; ++ix)
        for (int iy = 0; iy < N; ++iy)
            if (ix == 0 || iy == 0 || ix == N - 1 || iy == N - 1)
                for (int c = 0; c < Ci; ++c) bdry[dof(ix, iy, c)] = 1;

    std::vector<std::pair<std::pair<int, int>, double>> trip;
    trip.reserve(static_cast<std::size_t>(dofs) * 12);
    std::vector<double> b(dofs, 0.0);

    const int L = 3 * Ci; // local columns: base node, x neighbour, y neighbour
    std::vector<std::vector<double>> R(Co, std::vector<double>(L));
    std::vector<double> fw(Co), Pf(Co);
    std::vector<int> gdof(L);

    for (int sigma : {+1, -1}) {
        const int lo = (sigma > 0) ? 0 : 1;
        const int hi = (sigma > 0) ? N - 2 : N - 1;
        for (int ix = lo; ix <= hi; ++ix)
            for (int iy = lo; iy <= hi; ++iy) {
                for (int c = 0; c < Ci; ++c) {
                    gdof[c] = dof(ix, iy, c);
                    gdof[Ci + c] = dof(ix + sigma, iy, c);
                    gdof[2 * Ci + c] = dof(ix, iy + sigma, c);
                }
                for (auto& row : R) std::fill(row.begin(), row.end(), 0.0);
                for (int k = 0; k < Co; ++k)
                    for (const auto& t : dsten[k]) {
                        const double cf = w_out[k] * t.coeff * sigma / h;
                        R[k][(t.axis + 1) * Ci + t.in_comp] += cf;
                        R[k][t.in_comp] -= cf;
                    }
                const SymTensor<double>& fv = f.at(ix, iy);
                for (int k = 0; k < Co; ++k) fw[k] = w_out[k] * fv[k];
                for (int k = 0; k < Co; ++k) {
                    double s = 0;
                    for (int l = 0; l < Co; ++l) s += P[k][l] * fw[l];
                    Pf[k] = s;
                }
                for (int al = 0; al < L; ++al) {
                    if (bdry[gdof[al]]) continue;
                    double rb = 0;
                    for (int k = 0; k < Co; ++k) rb += R[k][al] * Pf[k];
                    b[gdof[al]] += 0.5 * rb;
                    for (int be = 0; be < L; ++be) {
                        if (bdry[gdof[be]]) continue;
                        double g = 0;
                        for (int k = 0; k < Co; ++k)
                            for (int l = 0; l < Co; ++l) g += R[k][al] * P[k][l] * R[l][be];
                        if (g != 0.0) trip.push_back({{gdof[al], gdof[be]}, 0.5 * g});
                    }
                }
            }
    }
    for (int dnum = 0; dnum < dofs; ++dnum)
        if (bdry[dnum]) trip.push_back({{dnum, dnum}, 1.0});

    BvpSystem sys;
    sys.N = N;
    sys.m = m;
    sys.comps = Ci;
    sys.A = CsrMatrix::from_triplets(dofs, dofs, std::move(trip));
    sys.b = std::move(b);
    sys.boundary = std::move(bdry);
    return sys;
}

// Nodal derivative of one scalar grid function along an axis: central in the
// interior; at the two edges, central against a cubic-extrapolated ghost
// node. The edge formula (-4u0 + 7u1 - 4u2 + u3)/(2h) has the same leading
// truncation term h^2 u'''/6 as the central stencil, so the derivative error
// field stays smooth up to the boundary and divergences of it remain second
// order. A plain one-sided formula would leave an O(h) divergence layer on
// the first interior ring.
namespace detail {

inline double axis_deriv(const GridField& u, int comp, int ix, int iy, int axis, double h) {
    auto val = [&](int jx, int jy) { return u.at(jx, jy)[comp]; };
    const int N = u.N;
    const int i = (axis == 0) ? ix : iy;
    auto shift = [&](int di) {
        return (axis == 0) ? val(ix + di, iy) : val(ix, iy + di);
    };
    if (i == 0)
        return (-4.0 * shift(0) + 7.0 * shift(1) - 4.0 * shift(2) + shift(3)) / (2.0 * h);
    if (i == N - 1)
        return (4.0 * shift(0) - 7.0 * shift(-1) + 4.0 * shift(-2) - shift(-3)) / (2.0 * h);
    return (shift(1) - shift(-1)) / (2.0 * h);
}

} // namespace detail

// Symmetrized derivative on the grid, rank r -> r+1.
inline GridField grid_d(const GridField& v) {
    const int N = v.N, m = v.rank + 1;
    const auto dsten = detail::d_stencil(m);
    const double h = v.h();
    GridField out(N, m);
    for (int ix = 0; ix < N; ++ix)
        for (int iy = 0; iy < N; ++iy) {
            SymTensor<double>& t = out.at(ix, iy);
            for (int k = 0; k < static_cast<int>(dsten.size()); ++k)
                for (const auto& s : dsten[k])
                    t[k] += s.coeff * detail::axis_deriv(v, s.in_comp, ix, iy, s.axis, h);
        }
    return out;
}

// Divergence on the grid, rank r -> r-1, central differences (interior
// nodes exact stencil, edges one-sided).
inline GridField grid_delta(const GridField& u) {
    const int N = u.N, r = u.rank;
    if (r < 1) throw std::invalid_argument("grid_delta: rank must be >= 1");
    const auto out_comps = detail::sym_comps(r - 1);
    const double h = u.h();
    GridField out(N, r - 1);
    for (int ix = 0; ix < N; ++ix)
        for (int iy = 0; iy < N; ++iy) {
            SymTensor<double>& t = out.at(ix, iy);
            for (int c = 0; c < static_cast<int>(out_comps.size()); ++c)
                for (int j = 0; j < 2; ++j) {
                    MultiIndex full = sorted_insert(out_comps[c], j);
                    t[c] += detail::axis_deriv(u, multi_index_rank(2, full), ix, iy, j, h);
                }
        }
    return out;
}

struct DecompositionResult {
    GridField v;        // rank m-1 potential, zero on the boundary
    GridField dv;       // its symmetrized derivative
    GridField lambda;   // rank m-2 trace part (rank 0 zeros when m = 1)
    GridField f_tilde;  // trace-free remainder
    double recon_residual = 0;   // |f - dv - i lambda - f~|
    double jf_residual = 0;      // |j f~| over all nodes
    double delta_f_residual = 0; // |delta f~| over interior nodes
    double f_norm = 0, v_norm = 0, lambda_norm = 0, f_tilde_norm = 0;
    double tol_reconstruct = 0, tol_constraint = 0;
    bool within_tol = false;
    CgResult solve;
    int dofs = 0;
};

inline DecompositionResult decompose_field(const GridField& f, double tol = 0.0) {
    const int m = f.rank, N = f.N;
    BvpSystem sys = assemble_bvp(f);
    std::vector<double> x;
    DecompositionResult res;
    res.solve = cg_solve(sys.A, sys.b, x);
    if (!res.solve.converged)
        throw std::runtime_error("decompose_field: linear solve did not converge");
    res.dofs = static_cast<int>(sys.b.size());

    MetricPoint<double> e = MetricPoint<double>::euclidean(2);
    res.v = GridField(N, m - 1);
    for (int ix = 0; ix < N; ++ix)
        for (int iy = 0; iy < N; ++iy) {
            if (ix == 0 || iy == 0 || ix == N - 1 || iy == N - 1) continue;
            for (int c = 0; c < sys.comps; ++c)
                res.v.at(ix, iy)[c] = x[(ix * N + iy) * sys.comps + c];
        }
    res.dv = grid_d(res.v);

    // Trace part: lambda = (ji)^{-1} j(f - dv). For the rank-0 lambda that
    // occurs here, j i acts as multiplication by trace(i 1) = n.
    GridField rem = grid_sub(f, res.dv);
    res.lambda = GridField(N, m - 2 >= 0 ? m - 2 : 0);
    double ji_factor = 1.0;
    if (m == 2) {
        SymTensor<double> one(2, 0);
        one[0] = 1.0;
        ji_factor = trace(mul_metric(one, e), e)[0];
    }
    res.f_tilde = GridField(N, m);
    GridField recon_err(N, m);
    GridField jf(N, m - 2 >= 0 ? m - 2 : 0);
    for (int ix = 0; ix < N; ++ix)
        for (int iy = 0; iy < N; ++iy) {
            const SymTensor<double>& r = rem.at(ix, iy);
            SymTensor<double> ft = project_p(r, e);
            res.f_tilde.at(ix, iy) = ft;
            SymTensor<double> err = r - ft;
            if (m == 2) {
                SymTensor<double> lam = trace(r, e);
                lam[0] /= ji_factor;
                res.lambda.at(ix, iy) = lam;
                err = err - mul_metric(lam, e);
                jf.at(ix, iy) = trace(ft, e);
            }
            recon_err.at(ix, iy) = err;
        }
    res.recon_residual = grid_norm(recon_err);
    res.jf_residual = grid_norm(jf);

    GridField df = grid_delta(res.f_tilde);
    GridField df_int(N, m - 1);
    for (int ix = 1; ix < N - 1; ++ix)
        for (int iy = 1; iy < N - 1; ++iy) df_int.at(ix, iy) = df.at(ix, iy);
    res.delta_f_residual = grid_norm(df_int);

    res.f_norm = grid_norm(f);
    res.v_norm = grid_norm(res.v);
    res.lambda_norm = grid_norm(res.lambda);
    res.f_tilde_norm = grid_norm(res.f_tilde);
    const double h = f.h();
    res.tol_reconstruct = std::max(10.0 * h * h, tol);
    res.tol_constraint = std::max(10.0 * h * h, tol);
    res.within_tol = res.recon_residual <= res.tol_reconstruct &&
                     res.jf_residual <= res.tol_constraint &&
                     res.delta_f_residual <= res.tol_constraint;
    return res;
}

// Empirical boundedness of the solution map across mesh refinements.
struct StabilityRow {
    int N = 0;
    double v_ratio = 0, lambda_ratio = 0, f_tilde_ratio = 0;
};

struct StabilityTable {
    std::vector<StabilityRow> rows;
    double max_spread = 0; // max over ratios of (max/min - 1)
    bool bounded = false;
};

inline StabilityTable stability_report(const std::vector<DecompositionResult>& runs,
                                       double spread_tol = 0.2) {
    if (runs.size() < 3) throw std::invalid_argument("stability_report: need >= 3 levels");
    StabilityTable tab;
    for (const auto& r : runs) {
        StabilityRow row;
        row.N = r.v.N;
        if (r.f_norm > 0) {
            row.v_ratio = r.v_norm / r.f_norm;
            row.lambda_ratio = r.lambda_norm / r.f_norm;
            row.f_tilde_ratio = r.f_tilde_norm / r.f_norm;
        }
        tab.rows.push_back(row);
    }
    auto spread = [&](auto get) {
        double lo = 1e300, hi = 0;
        for (const auto& row : tab.rows) {
            const double v = get(row);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi == 0) return 0.0; // identically zero ratio counts as stable
        return hi / lo - 1.0;
    };
    tab.max_spread = std::max({spread([](const StabilityRow& r) { return r.v_ratio; }),
                               spread([](const StabilityRow& r) { return r.lambda_ratio; }),
                               spread([](const StabilityRow& r) { return r.f_tilde_ratio; })});
    tab.bounded = tab.max_spread <= spread_tol;
    return tab;
}

// Smallest-eigenvalue estimate by inverse power iteration with CG solves.
inline double smallest_eigenvalue_estimate(const CsrMatrix& A, int iters = 40) {
    const int n = A.rows;
    std::vector<double> x(n), y, Ax(n);
    unsigned long long state = 88172645463325252ull;
    auto rnd = [&] {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return static_cast<double>(state % 10007) / 10007.0 - 0.5;
    };
    for (auto& v : x) v = rnd();
    auto normalize = [&](std::vector<double>& v) {
        double s = 0;
        for (double t : v) s += t * t;
        s = std::sqrt(s);
        for (double& t : v) t /= s;
    };
    normalize(x);
    for (int it = 0; it < iters; ++it) {
        cg_solve(A, x, y, 1e-12, 20000);
        x = y;
        normalize(x);
    }
    A.mul(x, Ax);
    double ray = 0;
    for (int t = 0; t < n; ++t) ray += x[t] * Ax[t];
    return ray;
}

} // namespace symten
