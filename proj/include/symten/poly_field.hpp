// Symmetric tensor fields with polynomial components over flat Euclidean
// space. Every operator here is exact: with rational coefficients the flat
// commutator identities hold to the last bit, which is what makes kernel
// dimension counts unambiguous.
#pragma once

#include <stdexcept>
#include <vector>

#include "symten/harmonic.hpp"
#include "symten/poly.hpp"

namespace symten {

template <class T>
struct PolyTensor {
    int dim = 0;
    int rank = 0;
    std::vector<Polynomial<T>> comps; // sorted multi-index order

    PolyTensor() = default;
    PolyTensor(int n, int m)
        : dim(n), rank(m), comps(dim_sym(n, m), Polynomial<T>(n)) {}

    Polynomial<T>& at(const MultiIndex& idx) { return comps[multi_index_rank(dim, idx)]; }
    const Polynomial<T>& at(const MultiIndex& idx) const {
        return comps[multi_index_rank(dim, idx)];
    }

    bool is_zero() const {
        for (const auto& c : comps)
            if (!c.is_zero()) return false;
        return true;
    }

    double max_abs_coeff() const {
        double mx = 0;
        for (const auto& c : comps) mx = std::max(mx, c.max_abs_coeff());
        return mx;
    }

    int total_degree() const {
        int d = 0;
        for (const auto& c : comps) d = std::max(d, c.total_degree());
        return d;
    }

    SymTensor<T> eval_exact(const std::vector<T>& x) const {
        SymTensor<T> out(dim, rank);
        for (int t = 0; t < static_cast<int>(comps.size()); ++t) out[t] = comps[t].eval_exact(x);
        return out;
    }

    PolyTensor& operator+=(const PolyTensor& o) {
        check(o);
        for (std::size_t t = 0; t < comps.size(); ++t) comps[t] += o.comps[t];
        return *this;
    }
    PolyTensor& operator-=(const PolyTensor& o) {
        check(o);
        for (std::size_t t = 0; t < comps.size(); ++t) comps[t] -= o.comps[t];
        return *this;
    }
    PolyTensor& operator*=(const T& s) {
        for (auto& c : comps) c *= s;
        return *this;
    }
    friend PolyTensor operator+(PolyTensor a, const PolyTensor& b) { return a += b; }
    friend PolyTensor operator-(PolyTensor a, const PolyTensor& b) { return a -= b; }
    friend PolyTensor operator*(const T& s, PolyTensor a) { return a *= s; }
    friend PolyTensor operator*(PolyTensor a, const T& s) { return a *= s; }

private:
    void check(const PolyTensor& o) const {
        if (dim != o.dim || rank != o.rank)
            throw std::invalid_argument("PolyTensor: shape mismatch");
    }
};

// d u = symmetrized gradient: (du)_K = (1/(m+1)) sum_a d_{K_a} u_{K minus a}.
template <class T>
PolyTensor<T> pt_d(const PolyTensor<T>& u) {
    const int n = u.dim, m = u.rank;
    PolyTensor<T> out(n, m + 1);
    const T w = scalar_ratio<T>(1, m + 1);
    MultiIndex K(m + 1, 0);
    bool more = true;
    do {
        Polynomial<T> acc(n);
        for (int a = 0; a <= m; ++a) {
            MultiIndex rest = K;
            rest.erase(rest.begin() + a);
            acc += u.at(rest).derivative(K[a]);
        }
        out.at(K) = acc * w;
        more = multi_index_next(n, K);
    } while (more);
    return out;
}

// Divergence: (delta u)_I = sum_j d_j u_{jI}.
template <class T>
PolyTensor<T> pt_delta(const PolyTensor<T>& u) {
    const int n = u.dim, m = u.rank;
    if (m < 1) throw std::invalid_argument("pt_delta: rank 0");
    PolyTensor<T> out(n, m - 1);
    MultiIndex I(m - 1, 0);
    bool more = true;
    do {
        Polynomial<T> acc(n);
        for (int j = 0; j < n; ++j) {
            MultiIndex full = sorted_insert(I, j);
            acc += u.at(full).derivative(j);
        }
        out.at(I) = acc;
        more = multi_index_next(n, I);
    } while (more);
    return out;
}

// Trace: (ju)_I = sum_a u_{aaI}.
template <class T>
PolyTensor<T> pt_j(const PolyTensor<T>& u) {
    const int n = u.dim, m = u.rank;
    if (m < 2) {
        PolyTensor<T> out(n, 0);
        return out;
    }
    PolyTensor<T> out(n, m - 2);
    MultiIndex I(m - 2, 0);
    bool more = true;
    do {
        Polynomial<T> acc(n);
        for (int a = 0; a < n; ++a) acc += u.at(sorted_insert(sorted_insert(I, a), a));
        out.at(I) = acc;
        more = multi_index_next(n, I);
    } while (more);
    return out;
}

// Metric multiplication: (iu)_K = (1 / C(m+2,2)) sum_{a<b} [K_a == K_b] u_{K minus a,b}.
template <class T>
PolyTensor<T> pt_i(const PolyTensor<T>& u) {
    const int n = u.dim, m = u.rank;
    PolyTensor<T> out(n, m + 2);
    const T w = scalar_ratio<T>(1, binom(m + 2, 2));
    MultiIndex K(m + 2, 0);
    bool more = true;
    do {
        Polynomial<T> acc(n);
        for (int a = 0; a < m + 2; ++a)
            for (int b = a + 1; b < m + 2; ++b) {
                if (K[a] != K[b]) continue;
                MultiIndex rest = K;
                rest.erase(rest.begin() + b);
                rest.erase(rest.begin() + a);
                acc += u.at(rest);
            }
        out.at(K) = acc * w;
        more = multi_index_next(n, K);
    } while (more);
    return out;
}

template <class T>
PolyTensor<T> pt_laplace(const PolyTensor<T>& u) {
    PolyTensor<T> out(u.dim, u.rank);
    for (std::size_t t = 0; t < u.comps.size(); ++t) {
        Polynomial<T> acc(u.dim);
        for (int j = 0; j < u.dim; ++j) acc += u.comps[t].derivative(j).derivative(j);
        out.comps[t] = acc;
    }
    return out;
}

// Trace-free projection applied coefficient-wise over monomials: for each
// monomial the coefficient vector is a constant symmetric tensor, projected
// algebraically over the Euclidean metric.
template <class T>
PolyTensor<T> pt_p(const PolyTensor<T>& u) {
    const int n = u.dim, m = u.rank;
    if (m <= 1) return u;
    MetricPoint<T> g = MetricPoint<T>::euclidean(n);
    // Gather the union of monomial keys.
    std::map<std::uint64_t, SymTensor<T>> buckets;
    for (int t = 0; t < static_cast<int>(u.comps.size()); ++t)
        for (const auto& [key, c] : u.comps[t].terms()) {
            auto it = buckets.find(key);
            if (it == buckets.end())
                it = buckets.emplace(key, SymTensor<T>(n, m)).first;
            it->second[t] = c;
        }
    PolyTensor<T> out(n, m);
    for (auto& [key, coeff] : buckets) {
        SymTensor<T> proj = project_p(coeff, g);
        std::vector<int> e = unpack_exponents(key, n);
        for (int t = 0; t < static_cast<int>(out.comps.size()); ++t)
            if (!scalar_traits<T>::is_zero(proj[t])) out.comps[t].add_term(e, proj[t]);
    }
    return out;
}

template <class T>
PolyTensor<T> pt_q(const PolyTensor<T>& u) {
    return u - pt_p(u);
}

// Iterated application helpers.
template <class T, class Op>
PolyTensor<T> pt_pow(PolyTensor<T> u, int k, Op&& op) {
    for (int t = 0; t < k; ++t) u = op(u);
    return u;
}

} // namespace symten
