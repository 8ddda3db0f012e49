// Pointwise metric data and the metric-dependent tensor operations:
// inner product, symmetric multiplication by g (i), trace against g (j),
// and their covector versions i_xi / j_xi.
#pragma once

#include <vector>
#include <stdexcept>

#include "symten/tensor.hpp"

namespace symten {

template <class T = double>
using Mat = std::vector<std::vector<T>>;

template <class T>
Mat<T> mat_identity(int n) {
    Mat<T> a(n, std::vector<T>(n, T(0)));
    for (int t = 0; t < n; ++t) a[t][t] = T(1);
    return a;
}

// Gauss-Jordan inverse; pivots chosen by double-precision magnitude so the
// routine works for both floating and exact scalars.
template <class T>
Mat<T> mat_inverse(const Mat<T>& a0) {
    const int n = static_cast<int>(a0.size());
    Mat<T> a = a0;
    Mat<T> inv = mat_identity<T>(n);
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        double best = 0;
        for (int r = col; r < n; ++r) {
            double v = std::abs(scalar_traits<T>::to_double(a[r][col]));
            if (v > best) { best = v; piv = r; }
        }
        if (piv < 0) throw std::invalid_argument("mat_inverse: singular matrix");
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        const T d = a[col][col];
        for (int c = 0; c < n; ++c) { a[col][c] /= d; inv[col][c] /= d; }
        for (int r = 0; r < n; ++r) {
            if (r == col || scalar_traits<T>::is_zero(a[r][col])) continue;
            const T f = a[r][col];
            for (int c = 0; c < n; ++c) {
                a[r][c] -= f * a[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    return inv;
}

template <class T = double>
class MetricPoint {
public:
    MetricPoint() : MetricPoint(mat_identity<T>(1)) {}

    explicit MetricPoint(Mat<T> g) : g_(std::move(g)) {
        n_ = static_cast<int>(g_.size());
        if (n_ < 1) throw std::invalid_argument("MetricPoint: empty matrix");
        for (const auto& row : g_)
            if (static_cast<int>(row.size()) != n_)
                throw std::invalid_argument("MetricPoint: non-square matrix");
        for (int r = 0; r < n_; ++r)
            for (int c = r + 1; c < n_; ++c)
                if (symmetric_dev(r, c) > 1e-12 * (1 + std::abs(scalar_traits<T>::to_double(g_[r][c]))))
                    throw std::invalid_argument("MetricPoint: matrix not symmetric");
        check_positive_definite();
        ginv_ = mat_inverse(g_);
    }

    static MetricPoint euclidean(int n) { return MetricPoint(mat_identity<T>(n)); }

    int dim() const { return n_; }
    const Mat<T>& g() const { return g_; }
    const Mat<T>& g_inv() const { return ginv_; }

    SymTensor<T> metric_tensor() const {
        SymTensor<T> t(n_, 2);
        for (int r = 0; r < n_; ++r)
            for (int c = r; c < n_; ++c) t.at({r, c}) = g_[r][c];
        return t;
    }

private:
    double symmetric_dev(int r, int c) const {
        return std::abs(scalar_traits<T>::to_double(g_[r][c] - g_[c][r]));
    }

    // LDL^T without pivoting: all pivots positive iff the matrix is SPD.
    void check_positive_definite() const {
        Mat<T> a = g_;
        for (int k = 0; k < n_; ++k) {
            if (!(scalar_traits<T>::to_double(a[k][k]) > 0))
                throw std::invalid_argument("MetricPoint: matrix not positive definite");
            for (int r = k + 1; r < n_; ++r) {
                const T f = a[r][k] / a[k][k];
                for (int c = k; c < n_; ++c) a[r][c] -= f * a[k][c];
            }
        }
    }

    int n_ = 0;
    Mat<T> g_, ginv_;
};

namespace detail {
// Raise one slot of a raw tensor with g_inv.
template <class T>
RawTensor<T> raise_slot(const RawTensor<T>& t, int slot, const Mat<T>& ginv) {
    RawTensor<T> r(t.dim(), t.rank());
    const int n = t.dim();
    for (size_t off = 0; off < r.size(); ++off) {
        std::vector<int> tuple = r.tuple_of(off);
        T sum(0);
        const int orig = tuple[slot];
        for (int v = 0; v < n; ++v) {
            tuple[slot] = v;
            sum += ginv[orig][v] * t.at(tuple);
        }
        r.flat(off) = sum;
    }
    return r;
}
} // namespace detail

// Natural inner product: full contraction with all indices of v raised by g.
template <class T>
T inner(const SymTensor<T>& u, const SymTensor<T>& v, const MetricPoint<T>& g) {
    if (u.dim() != v.dim() || u.rank() != v.rank())
        throw std::invalid_argument("inner: shape mismatch");
    const int n = u.dim(), m = u.rank();
    if (m == 0) return u[0] * v[0];
    RawTensor<T> vr = to_raw(v);
    for (int s = 0; s < m; ++s) vr = detail::raise_slot(vr, s, g.g_inv());
    // Raising preserves symmetry, so fold with multiplicity weights.
    T sum(0);
    MultiIndex idx(m, 0);
    do {
        sum += scalar_traits<T>::from_int(multiplicity(idx)) * u.at(idx) * vr.at(idx);
    } while (multi_index_next(n, idx));
    return sum;
}

// The operator i: symmetric multiplication by the metric tensor.
template <class T>
SymTensor<T> mul_metric(const SymTensor<T>& u, const MetricPoint<T>& g) {
    if (u.dim() != g.dim()) throw std::invalid_argument("mul_metric: dim mismatch");
    return sym_product(g.metric_tensor(), u);
}

// The operator j: trace against g over two slots. Ranks < 2 map to zero.
template <class T>
SymTensor<T> trace(const SymTensor<T>& u, const MetricPoint<T>& g) {
    const int n = u.dim(), m = u.rank();
    if (m < 2) return SymTensor<T>(n, 0);
    SymTensor<T> r(n, m - 2);
    const auto& ginv = g.g_inv();
    MultiIndex idx(m - 2, 0);
    if (m - 2 == 0) {
        T sum(0);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) sum += ginv[a][b] * u.at_any({a, b});
        r[0] = sum;
        return r;
    }
    do {
        T sum(0);
        for (int a = 0; a < n; ++a) {
            MultiIndex withA = sorted_insert(idx, a);
            for (int b = 0; b < n; ++b) sum += ginv[a][b] * u.at(sorted_insert(withA, b));
        }
        r.at(idx) = sum;
    } while (multi_index_next(n, idx));
    return r;
}

// Symmetric multiplication by a covector.
template <class T>
SymTensor<T> i_xi(const SymTensor<T>& u, const SymTensor<T>& xi) {
    if (xi.rank() != 1) throw std::invalid_argument("i_xi: xi must have rank 1");
    return sym_product(xi, u);
}

// Contraction with the raised covector (the adjoint of i_xi).
template <class T>
SymTensor<T> j_xi(const SymTensor<T>& u, const SymTensor<T>& xi, const MetricPoint<T>& g) {
    if (xi.rank() != 1) throw std::invalid_argument("j_xi: xi must have rank 1");
    if (u.dim() != xi.dim()) throw std::invalid_argument("j_xi: dim mismatch");
    const int n = u.dim(), m = u.rank();
    if (m == 0) return SymTensor<T>(n, 0);
    std::vector<T> xi_up(n, T(0));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) xi_up[a] += g.g_inv()[a][b] * xi[b];
    SymTensor<T> r(n, m - 1);
    MultiIndex idx(m - 1, 0);
    if (m - 1 == 0) {
        T sum(0);
        for (int a = 0; a < n; ++a) sum += xi_up[a] * u.at_any({a});
        r[0] = sum;
        return r;
    }
    do {
        T sum(0);
        for (int a = 0; a < n; ++a) sum += xi_up[a] * u.at(sorted_insert(idx, a));
        r.at(idx) = sum;
    } while (multi_index_next(n, idx));
    return r;
}

} // namespace symten
