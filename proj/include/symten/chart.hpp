// A chart is an axis-aligned box with a smooth metric given by analytic
// callbacks for g and its first two coordinate derivative arrays. Christoffel
// symbols and their derivatives are assembled on demand; nothing is cached
// because metric evaluation is cheap compared to the tensor algebra on top.
#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "symten/metric.hpp"

namespace symten {

using Vec = std::vector<double>;

// Derivative arrays of the metric: DG[k][i][j] = d_k g_ij,
// D2G[k][l][i][j] = d_k d_l g_ij.
using DG = std::vector<Mat<double>>;
using D2G = std::vector<std::vector<Mat<double>>>;

// Christoffel symbols Gamma[i][j][k] = Gamma^i_jk and their coordinate
// derivatives DGamma[l][i][j][k] = d_l Gamma^i_jk.
using Christoffel = std::vector<Mat<double>>;
using DChristoffel = std::vector<std::vector<Mat<double>>>;

class Chart {
public:
    using MetricFn = std::function<Mat<double>(const Vec&)>;
    using DMetricFn = std::function<DG(const Vec&)>;
    using D2MetricFn = std::function<D2G(const Vec&)>;

    Chart(int n, Vec lo, Vec hi, MetricFn g, DMetricFn dg, D2MetricFn d2g)
        : n_(n), lo_(std::move(lo)), hi_(std::move(hi)),
          g_(std::move(g)), dg_(std::move(dg)), d2g_(std::move(d2g)) {
        if (n_ < 1 || static_cast<int>(lo_.size()) != n_ || static_cast<int>(hi_.size()) != n_)
            throw std::invalid_argument("Chart: bad box");
        for (int k = 0; k < n_; ++k)
            if (!(lo_[k] < hi_[k])) throw std::invalid_argument("Chart: empty box");
    }

    int dim() const { return n_; }
    const Vec& lo() const { return lo_; }
    const Vec& hi() const { return hi_; }

    bool contains(const Vec& x) const {
        if (static_cast<int>(x.size()) != n_) return false;
        for (int k = 0; k < n_; ++k)
            if (x[k] < lo_[k] - 1e-12 || x[k] > hi_[k] + 1e-12) return false;
        return true;
    }

    void require_inside(const Vec& x) const {
        if (!contains(x)) throw std::domain_error("Chart: point outside domain");
    }

    MetricPoint<double> metric(const Vec& x) const {
        require_inside(x);
        return MetricPoint<double>(g_(x));
    }
    Mat<double> g(const Vec& x) const { require_inside(x); return g_(x); }
    DG dg(const Vec& x) const { require_inside(x); return dg_(x); }
    D2G d2g(const Vec& x) const { require_inside(x); return d2g_(x); }

    Christoffel christoffel(const Vec& x) const {
        MetricPoint<double> mp = metric(x);
        DG dgv = dg_(x);
        return christoffel_from(mp.g_inv(), dgv, n_);
    }

    DChristoffel dchristoffel(const Vec& x) const {
        MetricPoint<double> mp = metric(x);
        const Mat<double>& ginv = mp.g_inv();
        DG dgv = dg_(x);
        D2G d2gv = d2g_(x);
        const int n = n_;
        DChristoffel out(n, Christoffel(n, Mat<double>(n, std::vector<double>(n, 0.0))));
        // d_m g^{il} = -g^{ia} (d_m g_ab) g^{bl}
        std::vector<Mat<double>> dginv(n, Mat<double>(n, std::vector<double>(n, 0.0)));
        for (int mm = 0; mm < n; ++mm)
            for (int i = 0; i < n; ++i)
                for (int l = 0; l < n; ++l) {
                    double acc = 0.0;
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b)
                            acc -= ginv[i][a] * dgv[mm][a][b] * ginv[b][l];
                    dginv[mm][i][l] = acc;
                }
        for (int mm = 0; mm < n; ++mm)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        double acc = 0.0;
                        for (int l = 0; l < n; ++l) {
                            acc += 0.5 * dginv[mm][i][l] *
                                   (dgv[j][l][k] + dgv[k][l][j] - dgv[l][j][k]);
                            acc += 0.5 * ginv[i][l] *
                                   (d2gv[mm][j][l][k] + d2gv[mm][k][l][j] - d2gv[mm][l][j][k]);
                        }
                        out[mm][i][j][k] = acc;
                    }
        return out;
    }

    static Christoffel christoffel_from(const Mat<double>& ginv, const DG& dgv, int n) {
        Christoffel out(n, Mat<double>(n, std::vector<double>(n, 0.0)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double acc = 0.0;
                    for (int l = 0; l < n; ++l)
                        acc += 0.5 * ginv[i][l] * (dgv[j][l][k] + dgv[k][l][j] - dgv[l][j][k]);
                    out[i][j][k] = acc;
                }
        return out;
    }

private:
    int n_;
    Vec lo_, hi_;
    MetricFn g_;
    DMetricFn dg_;
    D2MetricFn d2g_;
};

inline std::shared_ptr<const Chart> chart_euclidean(int n, double lo = 0.0, double hi = 1.0) {
    auto zero_dg = [n](const Vec&) {
        return DG(n, Mat<double>(n, std::vector<double>(n, 0.0)));
    };
    auto zero_d2g = [n](const Vec&) {
        return D2G(n, std::vector<Mat<double>>(n, Mat<double>(n, std::vector<double>(n, 0.0))));
    };
    return std::make_shared<Chart>(n, Vec(n, lo), Vec(n, hi),
                                   [n](const Vec&) { return mat_identity<double>(n); },
                                   zero_dg, zero_d2g);
}

// Scalar function with two derivative levels, used for conformal factors.
struct ScalarJet {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> grad;
    std::function<Mat<double>(const Vec&)> hess;
};

inline ScalarJet scalar_jet_zero(int n) {
    return {[](const Vec&) { return 0.0; },
            [n](const Vec&) { return Vec(n, 0.0); },
            [n](const Vec&) { return Mat<double>(n, std::vector<double>(n, 0.0)); }};
}

// mu(x) = x_1
inline ScalarJet scalar_jet_x(int n) {
    return {[](const Vec& x) { return x[0]; },
            [n](const Vec&) { Vec v(n, 0.0); v[0] = 1.0; return v; },
            [n](const Vec&) { return Mat<double>(n, std::vector<double>(n, 0.0)); }};
}

// mu(x) = |x|^2 / 2
inline ScalarJet scalar_jet_half_r2(int n) {
    return {[](const Vec& x) {
                double s = 0.0;
                for (double c : x) s += c * c;
                return 0.5 * s;
            },
            [](const Vec& x) { return x; },
            [n](const Vec&) { return mat_identity<double>(n); }};
}

// Conformally flat metric g = e^{2 mu} delta.
inline std::shared_ptr<const Chart> chart_conformal(int n, const ScalarJet& mu,
                                                    double lo = 0.0, double hi = 1.0) {
    auto gfn = [n, mu](const Vec& x) {
        double f = std::exp(2.0 * mu.value(x));
        Mat<double> g = mat_identity<double>(n);
        for (int i = 0; i < n; ++i) g[i][i] = f;
        return g;
    };
    auto dgfn = [n, mu](const Vec& x) {
        double f = std::exp(2.0 * mu.value(x));
        Vec gr = mu.grad(x);
        DG out(n, Mat<double>(n, std::vector<double>(n, 0.0)));
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i) out[k][i][i] = 2.0 * gr[k] * f;
        return out;
    };
    auto d2gfn = [n, mu](const Vec& x) {
        double f = std::exp(2.0 * mu.value(x));
        Vec gr = mu.grad(x);
        Mat<double> h = mu.hess(x);
        D2G out(n, std::vector<Mat<double>>(n, Mat<double>(n, std::vector<double>(n, 0.0))));
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                double c = (2.0 * h[k][l] + 4.0 * gr[k] * gr[l]) * f;
                for (int i = 0; i < n; ++i) out[k][l][i][i] = c;
            }
        return out;
    };
    return std::make_shared<Chart>(n, Vec(n, lo), Vec(n, hi), gfn, dgfn, d2gfn);
}

// Diagonal 2D metric diag(1, f(x_1)^2) with analytic f; covers the round
// sphere patch (f = sin) and the polar-like model (f = identity).
inline std::shared_ptr<const Chart> chart_surface_of_revolution(
    std::function<double(double)> f, std::function<double(double)> df,
    std::function<double(double)> d2f, Vec lo, Vec hi) {
    auto gfn = [f](const Vec& x) {
        Mat<double> g = mat_identity<double>(2);
        double v = f(x[0]);
        g[1][1] = v * v;
        return g;
    };
    auto dgfn = [f, df](const Vec& x) {
        DG out(2, Mat<double>(2, std::vector<double>(2, 0.0)));
        out[0][1][1] = 2.0 * f(x[0]) * df(x[0]);
        return out;
    };
    auto d2gfn = [f, df, d2f](const Vec& x) {
        D2G out(2, std::vector<Mat<double>>(2, Mat<double>(2, std::vector<double>(2, 0.0))));
        out[0][0][1][1] = 2.0 * (df(x[0]) * df(x[0]) + f(x[0]) * d2f(x[0]));
        return out;
    };
    return std::make_shared<Chart>(2, std::move(lo), std::move(hi), gfn, dgfn, d2gfn);
}

inline std::shared_ptr<const Chart> chart_sphere_patch() {
    return chart_surface_of_revolution(
        [](double t) { return std::sin(t); }, [](double t) { return std::cos(t); },
        [](double t) { return -std::sin(t); }, {0.4, 0.0}, {2.6, 6.0});
}

inline std::shared_ptr<const Chart> chart_polar_like() {
    return chart_surface_of_revolution(
        [](double t) { return t; }, [](double) { return 1.0; }, [](double) { return 0.0; },
        {0.3, 0.0}, {2.0, 6.0});
}

} // namespace symten
