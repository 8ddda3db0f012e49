// Self-contained dense and sparse linear algebra at desk scale:
// symmetric Jacobi eigendecomposition, one-sided Jacobi SVD, a CSR matrix
// with preconditioned conjugate gradients, and exact sparse nullspace
// computation for pluggable scalars.
#pragma once

#include <vector>
#include <map>
#include <cmath>
#include <stdexcept>
#include <algorithm>

#include "symten/common.hpp"

namespace symten {

struct DMatrix {
    int rows = 0, cols = 0;
    std::vector<double> a;

    DMatrix() = default;
    DMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
};

// Cyclic Jacobi for symmetric matrices. Returns eigenvalues ascending;
// optionally accumulates eigenvectors (columns of V).
inline std::vector<double> jacobi_eigen(DMatrix A, DMatrix* V_out = nullptr) {
    if (A.rows != A.cols) throw std::invalid_argument("jacobi_eigen: matrix not square");
    const int n = A.rows;
    DMatrix V(n, n);
    for (int t = 0; t < n; ++t) V(t, t) = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (int r = 0; r < n; ++r)
            for (int c = r + 1; c < n; ++c) off += A(r, c) * A(r, c);
        if (off < 1e-30) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (std::fabs(apq) < 1e-300) continue;
                const double theta = (A(q, q) - A(p, p)) / (2 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<int> order(n);
    for (int t = 0; t < n; ++t) order[t] = t;
    std::sort(order.begin(), order.end(), [&](int x, int y) { return A(x, x) < A(y, y); });
    std::vector<double> evals(n);
    DMatrix Vs(n, n);
    for (int t = 0; t < n; ++t) {
        evals[t] = A(order[t], order[t]);
        for (int k = 0; k < n; ++k) Vs(k, t) = V(k, order[t]);
    }
    if (V_out) *V_out = Vs;
    return evals;
}

// Singular values by one-sided Jacobi orthogonalization of the columns.
inline std::vector<double> singular_values(DMatrix A) {
    const int n = A.cols, m = A.rows;
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double app = 0, aqq = 0, apq = 0;
                for (int r = 0; r < m; ++r) {
                    app += A(r, p) * A(r, p);
                    aqq += A(r, q) * A(r, q);
                    apq += A(r, p) * A(r, q);
                }
                if (std::fabs(apq) <= 1e-15 * std::sqrt(app * aqq) + 1e-300) continue;
                rotated = true;
                const double theta = (aqq - app) / (2 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (int r = 0; r < m; ++r) {
                    const double arp = A(r, p), arq = A(r, q);
                    A(r, p) = c * arp - s * arq;
                    A(r, q) = s * arp + c * arq;
                }
            }
        }
        if (!rotated) break;
    }
    std::vector<double> sv(n);
    for (int c = 0; c < n; ++c) {
        double s = 0;
        for (int r = 0; r < m; ++r) s += A(r, c) * A(r, c);
        sv[c] = std::sqrt(s);
    }
    std::sort(sv.rbegin(), sv.rend());
    return sv;
}

struct CsrMatrix {
    int rows = 0, cols = 0;
    std::vector<int> ptr, col;
    std::vector<double> val;

    static CsrMatrix from_triplets(int rows, int cols,
                                   std::vector<std::pair<std::pair<int, int>, double>> trip) {
        std::sort(trip.begin(), trip.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        CsrMatrix a;
        a.rows = rows;
        a.cols = cols;
        a.ptr.assign(rows + 1, 0);
        for (size_t t = 0; t < trip.size();) {
            size_t s = t;
            double sum = 0;
            while (t < trip.size() && trip[t].first == trip[s].first) sum += trip[t++].second;
            if (sum != 0.0) {
                a.col.push_back(trip[s].first.second);
                a.val.push_back(sum);
                ++a.ptr[trip[s].first.first + 1];
            }
        }
        for (int r = 0; r < rows; ++r) a.ptr[r + 1] += a.ptr[r];
        return a;
    }

    void mul(const std::vector<double>& x, std::vector<double>& y) const {
        y.assign(rows, 0.0);
        for (int r = 0; r < rows; ++r) {
            double s = 0;
            for (int t = ptr[r]; t < ptr[r + 1]; ++t) s += val[t] * x[col[t]];
            y[r] = s;
        }
    }

    std::vector<double> diagonal() const {
        std::vector<double> d(rows, 0.0);
        for (int r = 0; r < rows; ++r)
            for (int t = ptr[r]; t < ptr[r + 1]; ++t)
                if (col[t] == r) d[r] = val[t];
        return d;
    }
};

struct CgResult {
    int iterations = 0;
    double relative_residual = 0;
    bool converged = false;
};

// Conjugate gradients with diagonal (Jacobi) preconditioning.
inline CgResult cg_solve(const CsrMatrix& A, const std::vector<double>& b,
                         std::vector<double>& x, double rel_tol = 1e-10,
                         int max_iter = 10000) {
    const int n = A.rows;
    x.assign(n, 0.0);
    std::vector<double> d = A.diagonal();
    for (auto& v : d) v = (v != 0) ? 1.0 / v : 1.0;
    std::vector<double> r = b, z(n), p(n), Ap(n);
    double bnorm = 0;
    for (double v : b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    CgResult res;
    if (bnorm == 0) {
        res.converged = true;
        return res;
    }
    for (int t = 0; t < n; ++t) z[t] = d[t] * r[t];
    p = z;
    double rz = 0;
    for (int t = 0; t < n; ++t) rz += r[t] * z[t];
    for (int it = 0; it < max_iter; ++it) {
        A.mul(p, Ap);
        double pAp = 0;
        for (int t = 0; t < n; ++t) pAp += p[t] * Ap[t];
        const double alpha = rz / pAp;
        for (int t = 0; t < n; ++t) {
            x[t] += alpha * p[t];
            r[t] -= alpha * Ap[t];
        }
        double rnorm = 0;
        for (double v : r) rnorm += v * v;
        rnorm = std::sqrt(rnorm);
        res.iterations = it + 1;
        res.relative_residual = rnorm / bnorm;
        if (res.relative_residual < rel_tol) {
            res.converged = true;
            return res;
        }
        for (int t = 0; t < n; ++t) z[t] = d[t] * r[t];
        double rz_new = 0;
        for (int t = 0; t < n; ++t) rz_new += r[t] * z[t];
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int t = 0; t < n; ++t) p[t] = z[t] + beta * p[t];
    }
    return res;
}

// Sparse nullspace basis over an exact scalar field. Rows are maps from
// column index to value; returns one vector per free column.
template <class T>
std::vector<std::vector<T>> sparse_nullspace(std::vector<std::map<int, T>> rows, int cols) {
    std::vector<int> pivot_col_of_row;
    std::vector<int> pivot_row_of_col(cols, -1);
    std::vector<bool> used(rows.size(), false);

    for (int c = 0; c < cols; ++c) {
        // Pick the unused row with an entry in column c having fewest nonzeros.
        int best = -1;
        size_t best_nnz = 0;
        for (size_t r = 0; r < rows.size(); ++r) {
            if (used[r]) continue;
            auto it = rows[r].find(c);
            if (it == rows[r].end() || scalar_traits<T>::is_zero(it->second)) continue;
            if (best < 0 || rows[r].size() < best_nnz) {
                best = static_cast<int>(r);
                best_nnz = rows[r].size();
            }
        }
        if (best < 0) continue;
        used[best] = true;
        pivot_row_of_col[c] = best;
        const T piv = rows[best][c];
        for (auto& kv : rows[best]) kv.second /= piv;
        for (size_t r = 0; r < rows.size(); ++r) {
            if (static_cast<int>(r) == best) continue;
            auto it = rows[r].find(c);
            if (it == rows[r].end() || scalar_traits<T>::is_zero(it->second)) continue;
            const T f = it->second;
            for (const auto& kv : rows[best]) {
                auto jt = rows[r].find(kv.first);
                if (jt == rows[r].end()) {
                    rows[r][kv.first] = -f * kv.second;
                } else {
                    jt->second -= f * kv.second;
                    if (scalar_traits<T>::is_zero(jt->second)) rows[r].erase(jt);
                }
            }
        }
    }

    std::vector<std::vector<T>> basis;
    for (int cf = 0; cf < cols; ++cf) {
        if (pivot_row_of_col[cf] >= 0) continue;
        std::vector<T> x(cols, T(0));
        x[cf] = T(1);
        for (int c = 0; c < cols; ++c) {
            const int pr = pivot_row_of_col[c];
            if (pr < 0) continue;
            auto it = rows[pr].find(cf);
            if (it != rows[pr].end()) x[c] = -it->second;
        }
        basis.push_back(std::move(x));
    }
    return basis;
}

// Gauss-Legendre nodes and weights on [-1, 1].
inline void gauss_legendre(int k, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(k, 0.0);
    weights.assign(k, 0.0);
    for (int i = 0; i < k; ++i) {
        // Chebyshev-based initial guess, then Newton on P_k.
        double x = std::cos(M_PI * (i + 0.75) / (k + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= k; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            double dp = k * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= k; ++j) {
            double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        double dp = k * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

} // namespace symten
