// Trace decomposition of symmetric tensors: every u splits uniquely as
// u = sum_k i^k u_{m-2k} with each part trace-free. The composite map
// u -> j(iu) is diagonal on that splitting with the rational eigenvalues
// lambda_k below, which is how its inverse is applied (never by assembling
// and inverting a matrix). p and q are the complementary projections onto
// the trace-free part and the metric multiples.
#pragma once

#include <vector>
#include <stdexcept>

#include "symten/metric.hpp"
#include "symten/linalg.hpp"

namespace symten {

template <class T = double>
struct HarmonicParts {
    // parts[k] has rank m - 2k, k = 0..floor(m/2); all trace-free.
    std::vector<SymTensor<T>> parts;
};

// Eigenvalue of u -> j(iu) on the k-th summand of the rank-r splitting.
template <class T>
T ji_eigenvalue(int n, int r, int k) {
    return scalar_ratio<T>(2LL * (k + 1) * (n + 2 * r - 2 * k),
                           static_cast<long long>(r + 1) * (r + 2));
}

template <class T>
SymTensor<T> ji_inverse(const SymTensor<T>& v, const MetricPoint<T>& g);

template <class T>
HarmonicParts<T> harmonic_decompose(const SymTensor<T>& u, const MetricPoint<T>& g) {
    HarmonicParts<T> out;
    if (u.rank() <= 1) {
        out.parts.push_back(u);
        return out;
    }
    // w = (ji)^{-1} j u collects everything in the range of i; u - iw is the
    // trace-free head, and w decomposes recursively (its rank is m-2).
    SymTensor<T> w = ji_inverse(trace(u, g), g);
    out.parts.push_back(u - mul_metric(w, g));
    HarmonicParts<T> rest = harmonic_decompose(w, g);
    for (auto& p : rest.parts) out.parts.push_back(std::move(p));
    return out;
}

template <class T>
SymTensor<T> harmonic_reconstruct(const HarmonicParts<T>& h, const MetricPoint<T>& g) {
    if (h.parts.empty()) throw std::invalid_argument("harmonic_reconstruct: empty");
    SymTensor<T> acc = h.parts.back();
    for (int k = static_cast<int>(h.parts.size()) - 2; k >= 0; --k)
        acc = h.parts[k] + mul_metric(acc, g);
    return acc;
}

template <class T>
SymTensor<T> ji_inverse(const SymTensor<T>& v, const MetricPoint<T>& g) {
    const int r = v.rank();
    HarmonicParts<T> h = harmonic_decompose(v, g);
    for (int k = 0; k < static_cast<int>(h.parts.size()); ++k) {
        T lam = ji_eigenvalue<T>(v.dim(), r, k);
        h.parts[k] *= (T(1) / lam);
    }
    return harmonic_reconstruct(h, g);
}

// q = i (ji)^{-1} j : projection onto metric multiples. Ranks 0 and 1 carry
// no trace, so q = 0 and p is the identity there.
template <class T>
SymTensor<T> project_q(const SymTensor<T>& u, const MetricPoint<T>& g) {
    if (u.rank() <= 1) return SymTensor<T>(u.dim(), u.rank());
    return mul_metric(ji_inverse(trace(u, g), g), g);
}

template <class T>
SymTensor<T> project_p(const SymTensor<T>& u, const MetricPoint<T>& g) {
    if (u.rank() <= 1) return u;
    return u - project_q(u, g);
}

// j i^k u, applied literally.
template <class T>
SymTensor<T> ji_apply(const SymTensor<T>& u, const MetricPoint<T>& g, int k) {
    if (k < 1) throw std::invalid_argument("ji_apply: k must be >= 1");
    SymTensor<T> w = u;
    for (int t = 0; t < k; ++t) w = mul_metric(w, g);
    return trace(w, g);
}

// The commutation ladder: j i^k = c1(k) i^{k-1} + c2(k) i^k j on rank-m input,
// with c1 = 2k(n+2m+2k-2)/((m+2k-1)(m+2k)) and c2 = m(m-1)/((m+2k-1)(m+2k)).
template <class T>
SymTensor<T> ji_commutation_rhs(const SymTensor<T>& u, const MetricPoint<T>& g, int k) {
    if (k < 1) throw std::invalid_argument("ji_commutation_rhs: k must be >= 1");
    const int n = u.dim(), m = u.rank();
    const long long den = static_cast<long long>(m + 2 * k - 1) * (m + 2 * k);
    SymTensor<T> first = u;
    for (int t = 0; t < k - 1; ++t) first = mul_metric(first, g);
    first *= scalar_ratio<T>(2LL * k * (n + 2 * m + 2 * k - 2), den);
    if (m < 2) return first; // the i^k j term carries the factor m(m-1)
    SymTensor<T> second = trace(u, g);
    for (int t = 0; t < k; ++t) second = mul_metric(second, g);
    second *= scalar_ratio<T>(static_cast<long long>(m) * (m - 1), den);
    return first + second;
}

// Orthonormal basis (w.r.t. inner(.,.,g)) of the trace-free subspace of rank-m
// tensors, built by projecting the coordinate basis and Gram-Schmidt.
inline std::vector<SymTensor<double>> trace_free_basis(int n, int m,
                                                       const MetricPoint<double>& g) {
    const int dim_full = dim_sym(n, m);
    const int dim_tf = dim_full - (m >= 2 ? dim_sym(n, m - 2) : 0);
    std::vector<SymTensor<double>> basis;
    basis.reserve(dim_tf);
    for (int t = 0; t < dim_full && static_cast<int>(basis.size()) < dim_tf; ++t) {
        SymTensor<double> cand(n, m);
        cand[t] = 1.0;
        cand = project_p(cand, g);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& e : basis) cand -= inner(cand, e, g) * e;
        const double nrm2 = inner(cand, cand, g);
        if (nrm2 > 1e-10) {
            cand *= 1.0 / std::sqrt(nrm2);
            basis.push_back(std::move(cand));
        }
    }
    if (static_cast<int>(basis.size()) != dim_tf)
        throw std::runtime_error("trace_free_basis: dimension mismatch");
    return basis;
}

// Matrix of f -> j_xi p i_xi f on the trace-free subspace of rank m, in an
// orthonormal basis. This is the (sign-reversed) second-order symbol of the
// trace-free divergence-of-derivative operator; it is symmetric positive
// definite for xi != 0.
inline DMatrix symbol_matrix(const SymTensor<double>& xi, const MetricPoint<double>& g,
                             int m, std::vector<SymTensor<double>>* basis_out = nullptr) {
    if (xi.rank() != 1) throw std::invalid_argument("symbol_matrix: xi must have rank 1");
    if (xi.max_abs() == 0) throw std::invalid_argument("symbol_matrix: xi must be nonzero");
    const int n = xi.dim();
    std::vector<SymTensor<double>> basis = trace_free_basis(n, m, g);
    const int d = static_cast<int>(basis.size());
    DMatrix M(d, d);
    for (int c = 0; c < d; ++c) {
        SymTensor<double> img = j_xi(project_p(i_xi(basis[c], xi), g), xi, g);
        for (int r = 0; r < d; ++r) M(r, c) = inner(basis[r], img, g);
    }
    if (basis_out) *basis_out = std::move(basis);
    return M;
}

} // namespace symten
