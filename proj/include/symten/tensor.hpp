// Dense symmetric tensors (one slot per sorted multi-index) and raw tensors
// (full n^m component arrays), with symmetrization and symmetric products.
#pragma once

#include <vector>
#include <algorithm>
#include <stdexcept>
#include <functional>

#include "symten/multi_index.hpp"

namespace symten {

template <class T = double>
class SymTensor {
public:
    SymTensor() : n_(1), m_(0), c_(1, T(0)) {}
    SymTensor(int n, int m) : n_(n), m_(m), c_(dim_sym(n, m), T(0)) {}

    int dim() const { return n_; }
    int rank() const { return m_; }
    int size() const { return static_cast<int>(c_.size()); }

    const std::vector<T>& comps() const { return c_; }
    std::vector<T>& comps() { return c_; }

    T& operator[](int pos) { return c_[pos]; }
    const T& operator[](int pos) const { return c_[pos]; }

    // Component at a sorted multi-index.
    T& at(const MultiIndex& idx) { return c_[multi_index_rank(n_, idx)]; }
    const T& at(const MultiIndex& idx) const { return c_[multi_index_rank(n_, idx)]; }

    // Component at an arbitrary index tuple (sorted internally).
    const T& at_any(MultiIndex idx) const {
        std::sort(idx.begin(), idx.end());
        return c_[multi_index_rank(n_, idx)];
    }

    SymTensor& operator+=(const SymTensor& o) {
        check_shape(o);
        for (size_t t = 0; t < c_.size(); ++t) c_[t] += o.c_[t];
        return *this;
    }
    SymTensor& operator-=(const SymTensor& o) {
        check_shape(o);
        for (size_t t = 0; t < c_.size(); ++t) c_[t] -= o.c_[t];
        return *this;
    }
    SymTensor& operator*=(const T& s) {
        for (auto& v : c_) v *= s;
        return *this;
    }

    friend SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
    friend SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
    friend SymTensor operator*(SymTensor a, const T& s) { return a *= s; }
    friend SymTensor operator*(const T& s, SymTensor a) { return a *= s; }
    friend SymTensor operator-(SymTensor a) {
        for (auto& v : a.c_) v = -v;
        return a;
    }

    double max_abs() const {
        double r = 0;
        for (const auto& v : c_) r = std::max(r, std::abs(scalar_traits<T>::to_double(v)));
        return r;
    }

    bool is_zero() const {
        for (const auto& v : c_)
            if (!scalar_traits<T>::is_zero(v)) return false;
        return true;
    }

private:
    void check_shape(const SymTensor& o) const {
        if (n_ != o.n_ || m_ != o.m_)
            throw std::invalid_argument("SymTensor: shape mismatch");
    }

    int n_, m_;
    std::vector<T> c_;
};

template <class T = double>
class RawTensor {
public:
    RawTensor() : n_(1), m_(0), c_(1, T(0)) {}
    RawTensor(int n, int m) : n_(n), m_(m) {
        if (n < 1 || m < 0) throw std::invalid_argument("RawTensor: bad shape");
        size_t sz = 1;
        for (int t = 0; t < m; ++t) sz *= static_cast<size_t>(n);
        c_.assign(sz, T(0));
    }

    int dim() const { return n_; }
    int rank() const { return m_; }
    size_t size() const { return c_.size(); }

    size_t offset(const std::vector<int>& tuple) const {
        size_t off = 0;
        for (int v : tuple) off = off * static_cast<size_t>(n_) + static_cast<size_t>(v);
        return off;
    }

    T& at(const std::vector<int>& tuple) { return c_[offset(tuple)]; }
    const T& at(const std::vector<int>& tuple) const { return c_[offset(tuple)]; }

    T& flat(size_t off) { return c_[off]; }
    const T& flat(size_t off) const { return c_[off]; }

    // Decode a flat offset into an index tuple.
    std::vector<int> tuple_of(size_t off) const {
        std::vector<int> tuple(m_);
        for (int t = m_ - 1; t >= 0; --t) {
            tuple[t] = static_cast<int>(off % n_);
            off /= n_;
        }
        return tuple;
    }

    double max_abs() const {
        double r = 0;
        for (const auto& v : c_) r = std::max(r, std::abs(scalar_traits<T>::to_double(v)));
        return r;
    }

private:
    int n_, m_;
    std::vector<T> c_;
};

// Expand symmetric storage into the full n^m array.
template <class T>
RawTensor<T> to_raw(const SymTensor<T>& u) {
    RawTensor<T> r(u.dim(), u.rank());
    for (size_t off = 0; off < r.size(); ++off) r.flat(off) = u.at_any(r.tuple_of(off));
    return r;
}

// Full symmetrization: average over all index permutations. For each sorted
// tuple this is the mean over its distinct arrangements.
template <class T>
SymTensor<T> symmetrize(const RawTensor<T>& t) {
    SymTensor<T> u(t.dim(), t.rank());
    if (t.rank() == 0) {
        u[0] = t.flat(0);
        return u;
    }
    MultiIndex idx(t.rank(), 0);
    do {
        std::vector<int> arr = idx;
        T sum(0);
        long long count = 0;
        do {
            sum += t.at(arr);
            ++count;
        } while (std::next_permutation(arr.begin(), arr.end()));
        u.at(idx) = sum / scalar_traits<T>::from_int(count);
    } while (multi_index_next(t.dim(), idx));
    return u;
}

// Average over permutations of the given slot positions only.
template <class T>
RawTensor<T> partial_symmetrize(const RawTensor<T>& t, std::vector<int> group) {
    for (int s : group)
        if (s < 0 || s >= t.rank())
            throw std::invalid_argument("partial_symmetrize: slot out of range");
    std::sort(group.begin(), group.end());
    RawTensor<T> r(t.dim(), t.rank());
    const long long nperm = factorial(static_cast<int>(group.size()));
    const T w = scalar_traits<T>::from_ratio(1, nperm);
    for (size_t off = 0; off < r.size(); ++off) {
        std::vector<int> tuple = r.tuple_of(off);
        std::vector<int> perm = group;
        T sum(0);
        do {
            std::vector<int> moved = tuple;
            for (size_t a = 0; a < group.size(); ++a) moved[group[a]] = tuple[perm[a]];
            sum += t.at(moved);
        } while (std::next_permutation(perm.begin(), perm.end()));
        r.flat(off) = sum * w;
    }
    return r;
}

// Symmetric product uv = symmetrized tensor product.
template <class T>
SymTensor<T> sym_product(const SymTensor<T>& u, const SymTensor<T>& v) {
    if (u.dim() != v.dim()) throw std::invalid_argument("sym_product: dim mismatch");
    const int n = u.dim();
    const int mu = u.rank(), mv = v.rank();
    SymTensor<T> r(n, mu + mv);
    if (mu + mv == 0) {
        r[0] = u[0] * v[0];
        return r;
    }
    MultiIndex idx(mu + mv, 0);
    do {
        std::vector<int> arr = idx;
        T sum(0);
        long long count = 0;
        do {
            MultiIndex a(arr.begin(), arr.begin() + mu);
            MultiIndex b(arr.begin() + mu, arr.end());
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            sum += u.at(a) * v.at(b);
            ++count;
        } while (std::next_permutation(arr.begin(), arr.end()));
        r.at(idx) = sum / scalar_traits<T>::from_int(count);
    } while (multi_index_next(n, idx));
    return r;
}

// Unit covector e_k as a rank-1 tensor.
template <class T = double>
SymTensor<T> basis_covector(int n, int k) {
    SymTensor<T> e(n, 1);
    e[k] = T(1);
    return e;
}

template <class T = double>
SymTensor<T> scalar_tensor(int n, const T& v) {
    SymTensor<T> s(n, 0);
    s[0] = v;
    return s;
}

// Solves sigma(first m+p slots) u = f for the unique u that is symmetric in
// its first m slots and in its last m+p slots, given f symmetric in the first
// m+p and in the last m slots. Input slot layout: (i_1..i_m j_1..j_p k_1..k_m);
// output layout the same, with the stated output symmetries.
//
// u is the alternating binomial combination
//   u = sigma_i sigma_jk sum_{l=0..m} (-1)^l C(p+l-1,l) C(m+p,m-l)
//         f(i_1..i_{m-l} j_1..j_p k_1..k_m i_{m-l+1}..i_m).
template <class T>
RawTensor<T> invert_partial_symmetrization(const RawTensor<T>& f, int m, int p,
                                           double rel_tol = 1e-9) {
    if (m < 1 || p < 1) throw std::invalid_argument("invert_partial_symmetrization: need m,p >= 1");
    if (f.rank() != 2 * m + p)
        throw std::invalid_argument("invert_partial_symmetrization: rank must be 2m+p");

    std::vector<int> front(m + p), back(m);
    for (int t = 0; t < m + p; ++t) front[t] = t;
    for (int t = 0; t < m; ++t) back[t] = m + p + t;
    {
        const double scale = std::max(1.0, f.max_abs());
        RawTensor<T> sf = partial_symmetrize(partial_symmetrize(f, front), back);
        double dev = 0;
        for (size_t off = 0; off < f.size(); ++off)
            dev = std::max(dev, std::abs(scalar_traits<T>::to_double(f.flat(off) - sf.flat(off))));
        if (dev > rel_tol * scale)
            throw std::invalid_argument("invert_partial_symmetrization: input lacks required symmetry");
    }

    RawTensor<T> w(f.dim(), f.rank());
    std::vector<int> permuted(2 * m + p);
    for (size_t off = 0; off < w.size(); ++off) {
        std::vector<int> tuple = w.tuple_of(off);
        T sum(0);
        for (int l = 0; l <= m; ++l) {
            // f indices: first m-l i's, all j's and k's, then the last l i's.
            int tpos = 0;
            for (int t = 0; t < m - l; ++t) permuted[tpos++] = tuple[t];
            for (int t = m; t < 2 * m + p; ++t) permuted[tpos++] = tuple[t];
            for (int t = m - l; t < m; ++t) permuted[tpos++] = tuple[t];
            const long long coef = binom(p + l - 1, l) * binom(m + p, m - l);
            T term = f.at(permuted) * scalar_traits<T>::from_int(coef);
            if (l % 2 == 0) sum += term; else sum -= term;
        }
        w.flat(off) = sum;
    }

    std::vector<int> igroup(m), jkgroup(m + p);
    for (int t = 0; t < m; ++t) igroup[t] = t;
    for (int t = 0; t < m + p; ++t) jkgroup[t] = m + t;
    return partial_symmetrize(partial_symmetrize(w, igroup), jkgroup);
}

} // namespace symten
