// Sparse multivariate polynomials with exact coefficient arithmetic when T is
// rational. Monomials are keyed by packed exponent tuples so the iteration
// order (and therefore every textual dump) is deterministic.
#pragma once

#include <cstdint>
#include <map>
#include <vector>
#include <stdexcept>

#include "symten/common.hpp"

namespace symten {

// Exponent packing: 8 bits per variable, variable 0 in the low byte.
// Enough for 8 variables of degree < 256, far beyond anything used here.
inline std::uint64_t pack_exponents(const std::vector<int>& e) {
    if (e.size() > 8) throw std::invalid_argument("pack_exponents: too many variables");
    std::uint64_t key = 0;
    for (std::size_t v = 0; v < e.size(); ++v) {
        if (e[v] < 0 || e[v] > 255) throw std::invalid_argument("pack_exponents: exponent out of range");
        key |= static_cast<std::uint64_t>(e[v]) << (8 * v);
    }
    return key;
}

inline std::vector<int> unpack_exponents(std::uint64_t key, int nvars) {
    std::vector<int> e(nvars);
    for (int v = 0; v < nvars; ++v) e[v] = static_cast<int>((key >> (8 * v)) & 0xff);
    return e;
}

template <class T>
class Polynomial {
public:
    Polynomial() : nvars_(0) {}
    explicit Polynomial(int nvars) : nvars_(nvars) {
        if (nvars < 0 || nvars > 8) throw std::invalid_argument("Polynomial: bad variable count");
    }

    static Polynomial constant(int nvars, const T& c) {
        Polynomial p(nvars);
        if (!scalar_traits<T>::is_zero(c)) p.terms_[0] = c;
        return p;
    }
    static Polynomial variable(int nvars, int v) {
        Polynomial p(nvars);
        std::vector<int> e(nvars, 0);
        e.at(v) = 1;
        p.terms_[pack_exponents(e)] = scalar_traits<T>::from_int(1);
        return p;
    }
    static Polynomial monomial(int nvars, const std::vector<int>& e, const T& c) {
        Polynomial p(nvars);
        if (static_cast<int>(e.size()) != nvars) throw std::invalid_argument("monomial: size");
        if (!scalar_traits<T>::is_zero(c)) p.terms_[pack_exponents(e)] = c;
        return p;
    }

    int nvars() const { return nvars_; }
    const std::map<std::uint64_t, T>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int total_degree() const {
        int d = 0;
        for (const auto& [key, c] : terms_) {
            int s = 0;
            for (int v = 0; v < nvars_; ++v) s += static_cast<int>((key >> (8 * v)) & 0xff);
            if (s > d) d = s;
        }
        return d;
    }

    void add_term(const std::vector<int>& e, const T& c) {
        auto key = pack_exponents(e);
        auto it = terms_.find(key);
        if (it == terms_.end()) {
            if (!scalar_traits<T>::is_zero(c)) terms_[key] = c;
        } else {
            it->second += c;
            if (scalar_traits<T>::is_zero(it->second)) terms_.erase(it);
        }
    }

    Polynomial& operator+=(const Polynomial& o) {
        check_same(o);
        for (const auto& [key, c] : o.terms_) {
            auto it = terms_.find(key);
            if (it == terms_.end()) terms_[key] = c;
            else {
                it->second += c;
                if (scalar_traits<T>::is_zero(it->second)) terms_.erase(it);
            }
        }
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        check_same(o);
        for (const auto& [key, c] : o.terms_) {
            auto it = terms_.find(key);
            if (it == terms_.end()) terms_[key] = -c;
            else {
                it->second -= c;
                if (scalar_traits<T>::is_zero(it->second)) terms_.erase(it);
            }
        }
        return *this;
    }
    Polynomial& operator*=(const T& s) {
        if (scalar_traits<T>::is_zero(s)) { terms_.clear(); return *this; }
        for (auto& [key, c] : terms_) c *= s;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const T& s) { return a *= s; }
    friend Polynomial operator*(const T& s, Polynomial a) { return a *= s; }
    friend Polynomial operator-(Polynomial a) {
        for (auto& [key, c] : a.terms_) c = -c;
        return a;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        a.check_same(b);
        Polynomial out(a.nvars_);
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_) {
                // Packed exponents add without carries as long as each stays < 256.
                std::uint64_t key = ka + kb;
                auto it = out.terms_.find(key);
                if (it == out.terms_.end()) out.terms_[key] = ca * cb;
                else {
                    it->second += ca * cb;
                    if (scalar_traits<T>::is_zero(it->second)) out.terms_.erase(it);
                }
            }
        return out;
    }

    Polynomial derivative(int v) const {
        if (v < 0 || v >= nvars_) throw std::invalid_argument("derivative: bad variable");
        Polynomial out(nvars_);
        for (const auto& [key, c] : terms_) {
            int ev = static_cast<int>((key >> (8 * v)) & 0xff);
            if (ev == 0) continue;
            std::uint64_t k2 = key - (std::uint64_t(1) << (8 * v));
            out.terms_[k2] = c * scalar_traits<T>::from_int(ev);
        }
        return out;
    }

    template <class S>
    S eval(const std::vector<S>& x) const {
        if (static_cast<int>(x.size()) != nvars_) throw std::invalid_argument("eval: size");
        S acc = S(0);
        for (const auto& [key, c] : terms_) {
            S term = S(scalar_traits<T>::to_double(c));
            for (int v = 0; v < nvars_; ++v) {
                int ev = static_cast<int>((key >> (8 * v)) & 0xff);
                for (int t = 0; t < ev; ++t) term *= x[v];
            }
            acc += term;
        }
        return acc;
    }

    // Exact evaluation when the coefficient type matches the point type.
    T eval_exact(const std::vector<T>& x) const {
        if (static_cast<int>(x.size()) != nvars_) throw std::invalid_argument("eval_exact: size");
        T acc = scalar_traits<T>::from_int(0);
        for (const auto& [key, c] : terms_) {
            T term = c;
            for (int v = 0; v < nvars_; ++v) {
                int ev = static_cast<int>((key >> (8 * v)) & 0xff);
                for (int t = 0; t < ev; ++t) term *= x[v];
            }
            acc += term;
        }
        return acc;
    }

    double max_abs_coeff() const {
        double mx = 0;
        for (const auto& [key, c] : terms_) {
            double a = scalar_traits<T>::to_double(c);
            if (a < 0) a = -a;
            if (a > mx) mx = a;
        }
        return mx;
    }

private:
    void check_same(const Polynomial& o) const {
        if (nvars_ != o.nvars_) throw std::invalid_argument("Polynomial: variable count mismatch");
    }

    int nvars_;
    std::map<std::uint64_t, T> terms_;
};

} // namespace symten
