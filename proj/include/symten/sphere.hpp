// Tensors as polynomials on the fiber: kappa embeds a rank-m tensor as the
// homogeneous polynomial u_{i...} xi^i..., lambda restricts it to the unit
// sphere of the fiber metric. Quadrature integrates over that sphere by
// pulling back along the linear isometry eta -> g^{-1/2} eta from the round
// sphere, and the Fourier projection recovers a stack of trace-free tensors
// from a function on the sphere.
#pragma once

#include <cmath>
#include <cstring>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <vector>

#include "symten/harmonic.hpp"
#include "symten/poly.hpp"
#include "symten/linalg.hpp"

namespace symten {

template <class T>
T kappa_eval(const SymTensor<T>& u, const std::vector<T>& xi) {
    if (static_cast<int>(xi.size()) != u.dim())
        throw std::invalid_argument("kappa_eval: dim mismatch");
    const int n = u.dim(), m = u.rank();
    T acc = scalar_traits<T>::from_int(0);
    MultiIndex idx(m, 0);
    bool more = true;
    // Sum over sorted multi-indices with multiplicity weights; this equals the
    // full index-tuple sum because u is symmetric.
    do {
        T term = u.at(idx) * scalar_traits<T>::from_int(multiplicity(idx));
        for (int k : idx) term *= xi[k];
        acc += term;
        more = multi_index_next(n, idx);
    } while (more);
    return acc;
}

// Monomial form of kappa(u) as a polynomial in the fiber variable.
template <class T>
Polynomial<T> kappa_poly(const SymTensor<T>& u) {
    const int n = u.dim(), m = u.rank();
    Polynomial<T> p(n);
    MultiIndex idx(m, 0);
    bool more = true;
    do {
        std::vector<int> e(n, 0);
        for (int k : idx) ++e[k];
        T c = u.at(idx) * scalar_traits<T>::from_int(multiplicity(idx));
        p.add_term(e, c);
        more = multi_index_next(n, idx);
    } while (more);
    return p;
}

// Residual of the vertical-Laplacian relation: the fiber Laplacian
// g^{ab} d^2/dxi^a dxi^b of kappa(u) must equal m(m-1) kappa(ju). The left
// side is computed by literal polynomial differentiation so the two routes
// share no code.
inline double vertical_laplacian_check(const SymTensor<double>& u, const MetricPoint<double>& g) {
    const int n = u.dim(), m = u.rank();
    if (m < 2) return 0.0;
    Polynomial<double> P = kappa_poly(u);
    Polynomial<double> lap(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            lap += g.g_inv()[a][b] * P.derivative(a).derivative(b);
    SymTensor<double> ju = trace(u, g);
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double worst = 0.0;
    for (int s = 0; s < 20; ++s) {
        std::vector<double> xi(n);
        for (auto& c : xi) c = dist(rng);
        double lhs = lap.eval(xi);
        double rhs = static_cast<double>(m) * (m - 1) * kappa_eval(ju, xi);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

// Integral over the round unit sphere S^{n-1}, exact for polynomial
// integrands of total degree <= order. Supported for n = 2, 3.
inline double sphere_quadrature(int n, const std::function<double(const std::vector<double>&)>& f,
                                int order) {
    if (order < 0) throw std::invalid_argument("sphere_quadrature: negative order");
    if (n == 2) {
        const int K = order + 2;
        double acc = 0.0;
        for (int k = 0; k < K; ++k) {
            double th = 2.0 * M_PI * k / K;
            acc += f({std::cos(th), std::sin(th)});
        }
        return acc * (2.0 * M_PI / K);
    }
    if (n == 3) {
        const int G = (order + 2) / 2 + 1;
        const int K = order + 2;
        std::vector<double> z, w;
        gauss_legendre(G, z, w);
        double acc = 0.0;
        for (int i = 0; i < G; ++i) {
            double s = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
            double ring = 0.0;
            for (int k = 0; k < K; ++k) {
                double th = 2.0 * M_PI * k / K;
                ring += f({s * std::cos(th), s * std::sin(th), z[i]});
            }
            acc += w[i] * ring * (2.0 * M_PI / K);
        }
        return acc;
    }
    throw std::invalid_argument("sphere_quadrature: only n = 2, 3 supported");
}

// Square root of the inverse metric, i.e. the linear map sending the round
// sphere onto the unit sphere of g.
inline Mat<double> metric_inv_sqrt(const MetricPoint<double>& g) {
    const int n = g.dim();
    DMatrix A(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) A(r, c) = g.g()[r][c];
    DMatrix V(n, n);
    std::vector<double> ev = jacobi_eigen(A, &V);
    Mat<double> S = mat_identity<double>(n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) acc += V(r, k) * V(c, k) / std::sqrt(ev[k]);
            S[r][c] = acc;
        }
    return S;
}

// L2 inner product of two functions on the unit sphere of g, by pullback to
// the round sphere.
inline double sphere_inner(int n, const MetricPoint<double>& g,
                           const std::function<double(const std::vector<double>&)>& phi,
                           const std::function<double(const std::vector<double>&)>& psi,
                           int order) {
    Mat<double> A = metric_inv_sqrt(g);
    auto pull = [&](const std::vector<double>& eta) {
        std::vector<double> xi(n, 0.0);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) xi[r] += A[r][c] * eta[c];
        return phi(xi) * psi(xi);
    };
    return sphere_quadrature(n, pull, order);
}

// ||lambda u||^2 over the sphere equals this constant times <u, u> for
// trace-free u of rank m.
inline double norm_constant(int n, int m) {
    if (n < 2 || m < 0) throw std::invalid_argument("norm_constant: bad arguments");
    return factorial(m) * std::pow(M_PI, 0.5 * n) /
           (std::pow(2.0, m - 1) * std::tgamma(0.5 * n + m));
}

struct HarmonicStack {
    // parts[m] has rank m and is trace-free.
    std::vector<SymTensor<double>> parts;

    int max_rank() const { return static_cast<int>(parts.size()) - 1; }
};

namespace detail {

struct BasisKey {
    int n, m;
    std::vector<std::uint64_t> gbits;
    bool operator<(const BasisKey& o) const {
        if (n != o.n) return n < o.n;
        if (m != o.m) return m < o.m;
        return gbits < o.gbits;
    }
};

inline BasisKey basis_key(int n, int m, const MetricPoint<double>& g) {
    BasisKey k{n, m, {}};
    k.gbits.reserve(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            std::uint64_t bits;
            double v = g.g()[r][c];
            std::memcpy(&bits, &v, sizeof bits);
            k.gbits.push_back(bits);
        }
    return k;
}

} // namespace detail

// Cached orthonormal bases of the trace-free subspaces. fourier_project is
// called once per grid node in the kinetic checks, so the Gram-Schmidt work
// is shared. Readers take a shared lock; a missing entry is built under the
// exclusive lock.
inline std::shared_ptr<const std::vector<SymTensor<double>>>
cached_trace_free_basis(int n, int m, const MetricPoint<double>& g) {
    using Entry = std::shared_ptr<const std::vector<SymTensor<double>>>;
    static std::map<detail::BasisKey, Entry> cache;
    static std::shared_mutex mutex;
    detail::BasisKey key = detail::basis_key(n, m, g);
    {
        std::shared_lock lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    Entry built = std::make_shared<const std::vector<SymTensor<double>>>(trace_free_basis(n, m, g));
    std::unique_lock lock(mutex);
    auto [it, inserted] = cache.emplace(std::move(key), std::move(built));
    return it->second;
}

// Fourier coefficients of a function on the unit sphere of g with respect to
// the restricted-polynomial system: u_m = sum_alpha <phi, lambda e_alpha> /
// norm_constant(n, m) * e_alpha. Exact (up to quadrature) for phi that is a
// polynomial of degree <= M on the sphere.
inline HarmonicStack fourier_project(const std::function<double(const std::vector<double>&)>& phi,
                                     const MetricPoint<double>& g, int M, int order = -1) {
    const int n = g.dim();
    if (M < 0) throw std::invalid_argument("fourier_project: M must be >= 0");
    if (order < 0) order = 2 * M + 2;
    Mat<double> A = metric_inv_sqrt(g);
    // Pull phi and every basis polynomial back to the round sphere once.
    auto pulled_xi = [&](const std::vector<double>& eta) {
        std::vector<double> xi(n, 0.0);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) xi[r] += A[r][c] * eta[c];
        return xi;
    };
    HarmonicStack out;
    out.parts.reserve(M + 1);
    for (int m = 0; m <= M; ++m) {
        auto basis = cached_trace_free_basis(n, m, g);
        SymTensor<double> um(n, m);
        const double nc = norm_constant(n, m);
        for (const auto& e : *basis) {
            auto integrand = [&](const std::vector<double>& eta) {
                std::vector<double> xi = pulled_xi(eta);
                return phi(xi) * kappa_eval(e, xi);
            };
            double coeff = sphere_quadrature(n, integrand, order + m) / nc;
            um += coeff * e;
        }
        out.parts.push_back(std::move(um));
    }
    return out;
}

} // namespace symten
