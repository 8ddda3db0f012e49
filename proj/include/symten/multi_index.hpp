// Sorted multi-indices: the index set of dense symmetric tensor storage.
//
// A rank-m symmetric tensor over R^n keeps one slot per nondecreasing index
// tuple (i_1 <= ... <= i_m), entries in [0, n). Tuples are ordered
// lexicographically; ranking/unranking is done combinatorially so no global
// tables are needed.
#pragma once

#include <vector>
#include <algorithm>
#include <stdexcept>

#include "symten/common.hpp"

namespace symten {

using MultiIndex = std::vector<int>;  // nondecreasing, entries in [0, n)

// Number of independent components of a rank-m symmetric tensor: C(n+m-1, m).
inline int dim_sym(int n, int m) {
    if (n < 1) throw std::invalid_argument("dim_sym: dimension must be >= 1");
    if (m < 0) throw std::invalid_argument("dim_sym: rank must be >= 0");
    return static_cast<int>(binom(n + m - 1, m));
}

inline bool multi_index_valid(int n, const MultiIndex& idx) {
    int prev = 0;
    for (int v : idx) {
        if (v < prev || v >= n) return false;
        prev = v;
    }
    return true;
}

// Position of a sorted tuple in the lexicographic enumeration.
inline int multi_index_rank(int n, const MultiIndex& idx) {
    const int m = static_cast<int>(idx.size());
    long long r = 0;
    int prev = 0;
    for (int t = 0; t < m; ++t) {
        for (int v = prev; v < idx[t]; ++v)
            r += binom((n - v) + (m - t - 1) - 1, m - t - 1);
        prev = idx[t];
    }
    return static_cast<int>(r);
}

inline MultiIndex multi_index_unrank(int n, int m, int pos) {
    MultiIndex idx(m);
    long long rem = pos;
    int lo = 0;
    for (int t = 0; t < m; ++t) {
        int v = lo;
        for (;; ++v) {
            long long block = binom((n - v) + (m - t - 1) - 1, m - t - 1);
            if (rem < block) break;
            rem -= block;
        }
        idx[t] = v;
        lo = v;
    }
    return idx;
}

// Advance to the next sorted tuple; returns false after the last one.
inline bool multi_index_next(int n, MultiIndex& idx) {
    const int m = static_cast<int>(idx.size());
    for (int t = m - 1; t >= 0; --t) {
        if (idx[t] < n - 1) {
            const int v = idx[t] + 1;
            for (int s = t; s < m; ++s) idx[s] = v;
            return true;
        }
    }
    return false;
}

// Number of distinct arrangements of the tuple: m! / prod(count_v!).
inline long long multiplicity(const MultiIndex& idx) {
    long long r = factorial(static_cast<int>(idx.size()));
    int run = 1;
    for (size_t t = 1; t <= idx.size(); ++t) {
        if (t < idx.size() && idx[t] == idx[t - 1]) {
            ++run;
        } else {
            r /= factorial(run);
            run = 1;
        }
    }
    return r;
}

inline MultiIndex sorted_insert(MultiIndex idx, int v) {
    idx.insert(std::upper_bound(idx.begin(), idx.end(), v), v);
    return idx;
}

inline MultiIndex sorted_erase_at(MultiIndex idx, int pos) {
    idx.erase(idx.begin() + pos);
    return idx;
}

} // namespace symten
