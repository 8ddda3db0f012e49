// Symmetric tensor fields over a chart and the first-order calculus on them:
// covariant derivative, symmetrized derivative d, divergence delta, rough
// Laplacian, curvature, and the curvature action entering the delta-d
// commutation formula.
//
// A field carries closures for its value and optionally for first and second
// coordinate partials of the components. Operator outputs keep analytic
// derivative closures whenever the inputs provide them, so compositions like
// delta(d u) evaluate without any finite differencing. When a closure is
// missing, central differences step in: first derivatives use
// h = 1e-5 * domain-scale (error ~ 1e-10 for O(1) fields), second
// derivatives use a larger h = 1e-3 * domain-scale with Richardson
// extrapolation, since at 1e-5 the h^-2 roundoff would dominate.
#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "symten/chart.hpp"
#include "symten/harmonic.hpp"
#include "symten/linalg.hpp"
#include "symten/poly.hpp"

namespace symten {

struct TensorField {
    std::shared_ptr<const Chart> chart;
    int rank = 0;
    std::function<SymTensor<double>(const Vec&)> eval;
    // d1(x)[k] = d_k of the components; d2(x)[k][l] = d_k d_l. Either may be
    // empty, in which case finite differences are used.
    std::function<std::vector<SymTensor<double>>(const Vec&)> d1;
    std::function<std::vector<std::vector<SymTensor<double>>>(const Vec&)> d2;
};

inline double domain_scale(const Chart& c) {
    double s = c.hi()[0] - c.lo()[0];
    for (int k = 1; k < c.dim(); ++k) s = std::min(s, c.hi()[k] - c.lo()[k]);
    return s;
}

inline std::vector<SymTensor<double>> field_d1(const TensorField& f, const Vec& x) {
    if (f.d1) return f.d1(x);
    const int n = f.chart->dim();
    const double h = 1e-5 * domain_scale(*f.chart);
    std::vector<SymTensor<double>> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
        Vec xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        out.push_back((1.0 / (2.0 * h)) * (f.eval(xp) - f.eval(xm)));
    }
    return out;
}

inline std::vector<std::vector<SymTensor<double>>> field_d2(const TensorField& f, const Vec& x) {
    if (f.d2) return f.d2(x);
    const int n = f.chart->dim();
    const double h = 1e-3 * domain_scale(*f.chart);
    auto second = [&](int k, int l, double step) {
        if (k == l) {
            Vec xp = x, xm = x;
            xp[k] += step;
            xm[k] -= step;
            return (1.0 / (step * step)) *
                   (f.eval(xp) + f.eval(xm) - 2.0 * f.eval(x));
        }
        Vec xpp = x, xpm = x, xmp = x, xmm = x;
        xpp[k] += step; xpp[l] += step;
        xpm[k] += step; xpm[l] -= step;
        xmp[k] -= step; xmp[l] += step;
        xmm[k] -= step; xmm[l] -= step;
        return (1.0 / (4.0 * step * step)) *
               (f.eval(xpp) - f.eval(xpm) - f.eval(xmp) + f.eval(xmm));
    };
    std::vector<std::vector<SymTensor<double>>> out(n);
    for (int k = 0; k < n; ++k) {
        out[k].resize(n, SymTensor<double>(f.chart->dim(), f.rank));
        for (int l = 0; l <= k; ++l) {
            SymTensor<double> coarse = second(k, l, 2.0 * h);
            SymTensor<double> fine = second(k, l, h);
            out[k][l] = (1.0 / 3.0) * (4.0 * fine - coarse);
        }
    }
    for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) out[k][l] = out[l][k];
    return out;
}

inline TensorField field_constant(std::shared_ptr<const Chart> chart, SymTensor<double> value) {
    const int n = chart->dim(), m = value.rank();
    TensorField f;
    f.chart = std::move(chart);
    f.rank = m;
    f.eval = [value](const Vec&) { return value; };
    f.d1 = [n, m, dim = value.dim()](const Vec&) {
        return std::vector<SymTensor<double>>(n, SymTensor<double>(dim, m));
    };
    f.d2 = [n, m, dim = value.dim()](const Vec&) {
        return std::vector<std::vector<SymTensor<double>>>(
            n, std::vector<SymTensor<double>>(n, SymTensor<double>(dim, m)));
    };
    return f;
}

// Field whose components are polynomials in the chart coordinates; all
// derivative closures are exact.
inline TensorField field_from_poly(std::shared_ptr<const Chart> chart,
                                   std::vector<Polynomial<double>> comps, int rank) {
    const int n = chart->dim();
    if (static_cast<int>(comps.size()) != dim_sym(n, rank))
        throw std::invalid_argument("field_from_poly: component count");
    auto eval_at = [n, rank](const std::vector<Polynomial<double>>& cs, const Vec& x) {
        SymTensor<double> u(n, rank);
        for (int t = 0; t < static_cast<int>(cs.size()); ++t) u[t] = cs[t].eval(x);
        return u;
    };
    auto d1c = std::make_shared<std::vector<std::vector<Polynomial<double>>>>();
    d1c->resize(n);
    for (int k = 0; k < n; ++k) {
        (*d1c)[k].reserve(comps.size());
        for (const auto& c : comps) (*d1c)[k].push_back(c.derivative(k));
    }
    auto d2c = std::make_shared<std::vector<std::vector<std::vector<Polynomial<double>>>>>();
    d2c->resize(n);
    for (int k = 0; k < n; ++k) {
        (*d2c)[k].resize(n);
        for (int l = 0; l < n; ++l) {
            (*d2c)[k][l].reserve(comps.size());
            for (const auto& c : (*d1c)[k]) (*d2c)[k][l].push_back(c.derivative(l));
        }
    }
    TensorField f;
    f.chart = std::move(chart);
    f.rank = rank;
    f.eval = [comps, eval_at](const Vec& x) { return eval_at(comps, x); };
    f.d1 = [d1c, eval_at, n](const Vec& x) {
        std::vector<SymTensor<double>> out;
        out.reserve(n);
        for (int k = 0; k < n; ++k) out.push_back(eval_at((*d1c)[k], x));
        return out;
    };
    f.d2 = [d2c, eval_at, n](const Vec& x) {
        std::vector<std::vector<SymTensor<double>>> out(n);
        for (int k = 0; k < n; ++k) {
            out[k].reserve(n);
            for (int l = 0; l < n; ++l) out[k].push_back(eval_at((*d2c)[k][l], x));
        }
        return out;
    };
    return f;
}

// Scalar jet backed by a polynomial, with exact gradient and Hessian.
inline ScalarJet scalar_jet_from_poly(const Polynomial<double>& p) {
    const int n = p.nvars();
    auto grads = std::make_shared<std::vector<Polynomial<double>>>();
    for (int k = 0; k < n; ++k) grads->push_back(p.derivative(k));
    auto hess = std::make_shared<std::vector<std::vector<Polynomial<double>>>>(n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) (*hess)[k].push_back((*grads)[k].derivative(l));
    ScalarJet j;
    j.value = [p](const Vec& x) { return p.eval(x); };
    j.grad = [grads, n](const Vec& x) {
        Vec v(n);
        for (int k = 0; k < n; ++k) v[k] = (*grads)[k].eval(x);
        return v;
    };
    j.hess = [hess, n](const Vec& x) {
        Mat<double> h(n, std::vector<double>(n));
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) h[k][l] = (*hess)[k][l].eval(x);
        return h;
    };
    return j;
}

inline TensorField field_combine(const TensorField& a, const TensorField& b, double ca, double cb) {
    if (a.rank != b.rank) throw std::invalid_argument("field_combine: rank mismatch");
    TensorField f;
    f.chart = a.chart;
    f.rank = a.rank;
    auto ae = a.eval, be = b.eval;
    f.eval = [ae, be, ca, cb](const Vec& x) { return ca * ae(x) + cb * be(x); };
    if (a.d1 && b.d1) {
        auto ad = a.d1, bd = b.d1;
        f.d1 = [ad, bd, ca, cb](const Vec& x) {
            auto u = ad(x), v = bd(x);
            for (std::size_t k = 0; k < u.size(); ++k) u[k] = ca * u[k] + cb * v[k];
            return u;
        };
    }
    if (a.d2 && b.d2) {
        auto ad = a.d2, bd = b.d2;
        f.d2 = [ad, bd, ca, cb](const Vec& x) {
            auto u = ad(x), v = bd(x);
            for (std::size_t k = 0; k < u.size(); ++k)
                for (std::size_t l = 0; l < u[k].size(); ++l)
                    u[k][l] = ca * u[k][l] + cb * v[k][l];
            return u;
        };
    }
    return f;
}

inline TensorField field_add(const TensorField& a, const TensorField& b) {
    return field_combine(a, b, 1.0, 1.0);
}
inline TensorField field_sub(const TensorField& a, const TensorField& b) {
    return field_combine(a, b, 1.0, -1.0);
}
inline TensorField field_scale(const TensorField& a, double c) {
    return field_combine(a, a, c, 0.0);
}

namespace detail {

// nabla u at x as a raw tensor; slot 0 is the derivative index.
inline RawTensor<double> nabla_raw(const SymTensor<double>& u,
                                   const std::vector<SymTensor<double>>& du,
                                   const Christoffel& gamma) {
    const int n = u.dim(), m = u.rank();
    RawTensor<double> out(n, m + 1);
    std::vector<int> tup(m + 1, 0);
    for (std::size_t off = 0; off < out.size(); ++off) {
        tup = out.tuple_of(off);
        const int j = tup[0];
        std::vector<int> idx(tup.begin() + 1, tup.end());
        double val = du[j].at_any(idx);
        for (int a = 0; a < m; ++a) {
            std::vector<int> sub = idx;
            for (int p = 0; p < n; ++p) {
                sub[a] = p;
                val -= gamma[p][j][idx[a]] * u.at_any(sub);
            }
            sub[a] = idx[a];
        }
        out.flat(off) = val;
    }
    return out;
}

// d_k (nabla_j u) at x; slot 0 is the coordinate partial k, slot 1 is j.
inline RawTensor<double> nabla_d1_raw(const SymTensor<double>& u,
                                      const std::vector<SymTensor<double>>& du,
                                      const std::vector<std::vector<SymTensor<double>>>& d2u,
                                      const Christoffel& gamma, const DChristoffel& dgamma) {
    const int n = u.dim(), m = u.rank();
    RawTensor<double> out(n, m + 2);
    for (std::size_t off = 0; off < out.size(); ++off) {
        std::vector<int> tup = out.tuple_of(off);
        const int k = tup[0], j = tup[1];
        std::vector<int> idx(tup.begin() + 2, tup.end());
        double val = d2u[k][j].at_any(idx);
        for (int a = 0; a < m; ++a) {
            std::vector<int> sub = idx;
            for (int p = 0; p < n; ++p) {
                sub[a] = p;
                val -= dgamma[k][p][j][idx[a]] * u.at_any(sub) +
                       gamma[p][j][idx[a]] * du[k].at_any(sub);
            }
        }
        out.flat(off) = val;
    }
    return out;
}

// Contract two slots of a raw tensor against a (symmetric) matrix.
inline RawTensor<double> contract_raw(const RawTensor<double>& t, int s1, int s2,
                                      const Mat<double>& a) {
    const int n = t.dim(), m = t.rank();
    RawTensor<double> out(n, m - 2);
    for (std::size_t off = 0; off < out.size(); ++off) {
        std::vector<int> rest = out.tuple_of(off);
        std::vector<int> full(m, 0);
        int r = 0;
        for (int s = 0; s < m; ++s)
            if (s != s1 && s != s2) full[s] = rest[r++];
        double acc = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) {
                full[s1] = p;
                full[s2] = q;
                acc += a[p][q] * t.at(full);
            }
        out.flat(off) = acc;
    }
    return out;
}

// Fix slot 0 of a raw tensor to the given index.
inline RawTensor<double> slice0(const RawTensor<double>& t, int v) {
    const int n = t.dim(), m = t.rank();
    RawTensor<double> out(n, m - 1);
    std::size_t block = out.size();
    for (std::size_t off = 0; off < block; ++off)
        out.flat(off) = t.flat(static_cast<std::size_t>(v) * block + off);
    return out;
}

inline Mat<double> dginv_of(const Mat<double>& ginv, const Mat<double>& dgk) {
    const int n = static_cast<int>(ginv.size());
    Mat<double> out(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
            double acc = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) acc -= ginv[i][a] * dgk[a][b] * ginv[b][l];
            out[i][l] = acc;
        }
    return out;
}

} // namespace detail

// Covariant derivative of the field at a point, derivative slot first.
inline RawTensor<double> nabla(const TensorField& f, const Vec& x) {
    Christoffel gamma = f.chart->christoffel(x);
    return detail::nabla_raw(f.eval(x), field_d1(f, x), gamma);
}

inline TensorField d_op(const TensorField& f) {
    TensorField out;
    out.chart = f.chart;
    out.rank = f.rank + 1;
    TensorField base = f;
    out.eval = [base](const Vec& x) { return symmetrize(nabla(base, x)); };
    out.d1 = [base](const Vec& x) {
        const int n = base.chart->dim();
        Christoffel gamma = base.chart->christoffel(x);
        DChristoffel dgamma = base.chart->dchristoffel(x);
        RawTensor<double> dnab = detail::nabla_d1_raw(base.eval(x), field_d1(base, x),
                                                      field_d2(base, x), gamma, dgamma);
        std::vector<SymTensor<double>> res;
        res.reserve(n);
        for (int k = 0; k < n; ++k) res.push_back(symmetrize(detail::slice0(dnab, k)));
        return res;
    };
    return out;
}

inline TensorField delta_op(const TensorField& f) {
    if (f.rank < 1) throw std::invalid_argument("delta_op: rank 0 field");
    TensorField out;
    out.chart = f.chart;
    out.rank = f.rank - 1;
    TensorField base = f;
    out.eval = [base](const Vec& x) {
        MetricPoint<double> g = base.chart->metric(x);
        RawTensor<double> w = nabla(base, x);
        return symmetrize(detail::contract_raw(w, 0, 1, g.g_inv()));
    };
    out.d1 = [base](const Vec& x) {
        const int n = base.chart->dim();
        MetricPoint<double> g = base.chart->metric(x);
        DG dg = base.chart->dg(x);
        Christoffel gamma = base.chart->christoffel(x);
        DChristoffel dgamma = base.chart->dchristoffel(x);
        SymTensor<double> u = base.eval(x);
        auto du = field_d1(base, x);
        RawTensor<double> w = detail::nabla_raw(u, du, gamma);
        RawTensor<double> dnab = detail::nabla_d1_raw(u, du, field_d2(base, x), gamma, dgamma);
        std::vector<SymTensor<double>> res;
        res.reserve(n);
        for (int k = 0; k < n; ++k) {
            Mat<double> dginv = detail::dginv_of(g.g_inv(), dg[k]);
            RawTensor<double> term = detail::contract_raw(detail::slice0(dnab, k), 0, 1, g.g_inv());
            SymTensor<double> s = symmetrize(term) + symmetrize(detail::contract_raw(w, 0, 1, dginv));
            res.push_back(std::move(s));
        }
        return res;
    };
    return out;
}

inline TensorField laplace_op(const TensorField& f) {
    TensorField out;
    out.chart = f.chart;
    out.rank = f.rank;
    TensorField base = f;
    out.eval = [base](const Vec& x) {
        const int n = base.chart->dim(), m = base.rank;
        MetricPoint<double> g = base.chart->metric(x);
        Christoffel gamma = base.chart->christoffel(x);
        DChristoffel dgamma = base.chart->dchristoffel(x);
        SymTensor<double> u = base.eval(x);
        auto du = field_d1(base, x);
        RawTensor<double> w = detail::nabla_raw(u, du, gamma);
        RawTensor<double> dnab = detail::nabla_d1_raw(u, du, field_d2(base, x), gamma, dgamma);
        // nabla_j of the rank-(m+1) tensor w_k,I, then trace over (j, k).
        RawTensor<double> acc(n, m);
        std::vector<int> wt(m + 1, 0);
        for (std::size_t off = 0; off < acc.size(); ++off) {
            std::vector<int> idx = acc.tuple_of(off);
            double val = 0.0;
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double gjk = g.g_inv()[j][k];
                    if (gjk == 0.0) continue;
                    std::vector<int> t2(m + 2);
                    t2[0] = j;
                    t2[1] = k;
                    for (int s = 0; s < m; ++s) t2[s + 2] = idx[s];
                    double term = dnab.at(t2);
                    wt[0] = k;
                    for (int s = 0; s < m; ++s) wt[s + 1] = idx[s];
                    for (int q = 0; q < n; ++q) {
                        wt[0] = q;
                        term -= gamma[q][j][k] * w.at(wt);
                    }
                    wt[0] = k;
                    for (int a = 0; a < m; ++a) {
                        for (int p = 0; p < n; ++p) {
                            wt[a + 1] = p;
                            term -= gamma[p][j][idx[a]] * w.at(wt);
                        }
                        wt[a + 1] = idx[a];
                    }
                    val += gjk * term;
                }
            acc.flat(off) = val;
        }
        return symmetrize(acc);
    };
    return out;
}

// Multiplication by the metric, trace, and the trace decomposition
// projections, applied pointwise. i and j keep analytic first derivatives;
// p and q fall back to differencing because the projection depends on the
// metric through the spectral inverse.
inline TensorField i_op(const TensorField& f) {
    TensorField out;
    out.chart = f.chart;
    out.rank = f.rank + 2;
    TensorField base = f;
    out.eval = [base](const Vec& x) {
        return mul_metric(base.eval(x), base.chart->metric(x));
    };
    if (base.d1) {
        out.d1 = [base](const Vec& x) {
            const int n = base.chart->dim();
            MetricPoint<double> g = base.chart->metric(x);
            DG dg = base.chart->dg(x);
            SymTensor<double> u = base.eval(x);
            auto du = field_d1(base, x);
            std::vector<SymTensor<double>> res;
            res.reserve(n);
            for (int k = 0; k < n; ++k) {
                SymTensor<double> dgk(n, 2);
                for (int i = 0; i < n; ++i)
                    for (int j = i; j < n; ++j) dgk.at({i, j}) = dg[k][i][j];
                res.push_back(sym_product(dgk, u) + sym_product(g.metric_tensor(), du[k]));
            }
            return res;
        };
    }
    return out;
}

namespace detail {

inline SymTensor<double> contract2_sym(const SymTensor<double>& u, const Mat<double>& a) {
    const int n = u.dim(), m = u.rank();
    RawTensor<double> r(n, m - 2);
    for (std::size_t off = 0; off < r.size(); ++off) {
        std::vector<int> rest = r.tuple_of(off);
        std::vector<int> full(m);
        for (int s = 0; s < m - 2; ++s) full[s + 2] = rest[s];
        double acc = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) {
                full[0] = p;
                full[1] = q;
                acc += a[p][q] * u.at_any(full);
            }
        r.flat(off) = acc;
    }
    return symmetrize(r);
}

} // namespace detail

inline TensorField j_op(const TensorField& f) {
    if (f.rank < 2) throw std::invalid_argument("j_op: rank must be >= 2");
    TensorField out;
    out.chart = f.chart;
    out.rank = f.rank - 2;
    TensorField base = f;
    out.eval = [base](const Vec& x) {
        return trace(base.eval(x), base.chart->metric(x));
    };
    if (base.d1) {
        out.d1 = [base](const Vec& x) {
            const int n = base.chart->dim();
            MetricPoint<double> g = base.chart->metric(x);
            DG dg = base.chart->dg(x);
            SymTensor<double> u = base.eval(x);
            auto du = field_d1(base, x);
            std::vector<SymTensor<double>> res;
            res.reserve(n);
            for (int k = 0; k < n; ++k) {
                Mat<double> dginv = detail::dginv_of(g.g_inv(), dg[k]);
                res.push_back(detail::contract2_sym(u, dginv) +
                              detail::contract2_sym(du[k], g.g_inv()));
            }
            return res;
        };
    }
    return out;
}

inline TensorField p_op(const TensorField& f) {
    TensorField out;
    out.chart = f.chart;
    out.rank = f.rank;
    TensorField base = f;
    out.eval = [base](const Vec& x) {
        return project_p(base.eval(x), base.chart->metric(x));
    };
    return out;
}

inline TensorField q_op(const TensorField& f) {
    TensorField out;
    out.chart = f.chart;
    out.rank = f.rank;
    TensorField base = f;
    out.eval = [base](const Vec& x) {
        return project_q(base.eval(x), base.chart->metric(x));
    };
    return out;
}

struct CurvatureData {
    // riemann[(p,i,j,k)] = R^p_ijk with the slot order fixed by the
    // second-derivative commutator (nabla_jk - nabla_kj)u_i = R^p_ikj u_p.
    RawTensor<double> riemann;
    // Lowered tensor R_ijkl = g_ip R^p_jkl.
    RawTensor<double> riemann_low;
    // Ricci in this convention: R_ij = g^kl R_kijl = R^l_ijl.
    Mat<double> ricci;
    // Ricci with first index raised, as it enters the curvature action.
    Mat<double> ricci_mixed;
};

inline CurvatureData curvature(const Chart& chart, const Vec& x) {
    const int n = chart.dim();
    MetricPoint<double> g = chart.metric(x);
    Christoffel gm = chart.christoffel(x);
    DChristoffel dgm = chart.dchristoffel(x);
    CurvatureData out;
    out.riemann = RawTensor<double>(n, 4);
    out.riemann_low = RawTensor<double>(n, 4);
    for (int p = 0; p < n; ++p)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double v = dgm[j][p][k][i] - dgm[k][p][j][i];
                    for (int l = 0; l < n; ++l)
                        v += gm[p][j][l] * gm[l][k][i] - gm[p][k][l] * gm[l][j][i];
                    out.riemann.at({p, i, j, k}) = v;
                }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double v = 0.0;
                    for (int p = 0; p < n; ++p) v += g.g()[i][p] * out.riemann.at({p, j, k, l});
                    out.riemann_low.at({i, j, k, l}) = v;
                }
    out.ricci = Mat<double>(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double v = 0.0;
            for (int l = 0; l < n; ++l) v += out.riemann.at({l, i, j, l});
            out.ricci[i][j] = v;
        }
    out.ricci_mixed = Mat<double>(n, std::vector<double>(n, 0.0));
    for (int p = 0; p < n; ++p)
        for (int j = 0; j < n; ++j) {
            double v = 0.0;
            for (int i = 0; i < n; ++i) v += g.g_inv()[p][i] * out.ricci[i][j];
            out.ricci_mixed[p][j] = v;
        }
    return out;
}

// The zero-order operator appearing in the commutation formula
// (m+1) delta d = m d delta + Laplacian - R: a Ricci contraction on each
// slot plus a double curvature contraction on each slot pair.
inline SymTensor<double> curvature_action(const SymTensor<double>& u, const MetricPoint<double>& g,
                                          const CurvatureData& curv) {
    const int n = u.dim(), m = u.rank();
    if (m == 0) return SymTensor<double>(n, 0);
    RawTensor<double> acc(n, m);
    for (std::size_t off = 0; off < acc.size(); ++off) {
        std::vector<int> idx = acc.tuple_of(off);
        double val = 0.0;
        std::vector<int> sub = idx;
        for (int a = 0; a < m; ++a) {
            for (int p = 0; p < n; ++p) {
                sub[a] = p;
                val += curv.ricci_mixed[p][idx[a]] * u.at_any(sub);
            }
            sub[a] = idx[a];
        }
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b) {
                double pair = 0.0;
                std::vector<int> s2 = idx;
                for (int q = 0; q < n; ++q)
                    for (int p = 0; p < n; ++p) {
                        s2[a] = q;
                        s2[b] = p;
                        double upq = u.at_any(s2);
                        if (upq == 0.0) continue;
                        for (int l = 0; l < n; ++l)
                            pair += g.g_inv()[q][l] * curv.riemann.at({p, idx[b], l, idx[a]}) * upq;
                    }
                val += 2.0 * pair;
            }
        acc.flat(off) = val;
    }
    return symmetrize(acc);
}

inline TensorField curvature_action_field(const TensorField& f) {
    TensorField out;
    out.chart = f.chart;
    out.rank = f.rank;
    TensorField base = f;
    out.eval = [base](const Vec& x) {
        CurvatureData c = curvature(*base.chart, x);
        return curvature_action(base.eval(x), base.chart->metric(x), c);
    };
    return out;
}

inline double mat_det(Mat<double> a) {
    const int n = static_cast<int>(a.size());
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (a[piv][c] == 0.0) return 0.0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (int r = c + 1; r < n; ++r) {
            double f = a[r][c] / a[c][c];
            for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return det;
}

namespace detail {

inline void gauss_on_interval(double a, double b, int order, std::vector<double>& pts,
                              std::vector<double>& wts) {
    std::vector<double> z, w;
    gauss_legendre(order, z, w);
    pts.resize(order);
    wts.resize(order);
    for (int i = 0; i < order; ++i) {
        pts[i] = 0.5 * (a + b) + 0.5 * (b - a) * z[i];
        wts[i] = 0.5 * (b - a) * w[i];
    }
}

// Tensor-product Gauss rule over the chart box, restricted to the axes in
// `free_axes`; the other coordinates are pinned to `base`.
template <class F>
double box_quadrature(const Chart& chart, const std::vector<int>& free_axes, Vec base, int order,
                      F&& fn) {
    std::vector<std::vector<double>> pts(free_axes.size()), wts(free_axes.size());
    for (std::size_t t = 0; t < free_axes.size(); ++t)
        gauss_on_interval(chart.lo()[free_axes[t]], chart.hi()[free_axes[t]], order, pts[t], wts[t]);
    double acc = 0.0;
    std::vector<int> ctr(free_axes.size(), 0);
    while (true) {
        double w = 1.0;
        for (std::size_t t = 0; t < free_axes.size(); ++t) {
            base[free_axes[t]] = pts[t][ctr[t]];
            w *= wts[t][ctr[t]];
        }
        acc += w * fn(base);
        std::size_t t = 0;
        for (; t < ctr.size(); ++t) {
            if (++ctr[t] < static_cast<int>(pts[t].size())) break;
            ctr[t] = 0;
        }
        if (t == ctr.size()) break;
    }
    return acc;
}

} // namespace detail

// Residual of the integration-by-parts identity relating d and -delta:
// integral over the box of <du, v> + <u, delta v> minus the boundary
// integral of <i_nu u, v>, with nu the outward unit conormal. Zero for exact
// quadrature.
inline double greens_residual(const TensorField& u, const TensorField& v, int order = 8) {
    const Chart& chart = *u.chart;
    const int n = chart.dim();
    if (v.rank != u.rank + 1) throw std::invalid_argument("greens_residual: rank mismatch");
    TensorField du = d_op(u);
    TensorField dv = delta_op(v);
    std::vector<int> all_axes(n);
    for (int k = 0; k < n; ++k) all_axes[k] = k;
    double volume_term = detail::box_quadrature(
        chart, all_axes, Vec(n, 0.0), order, [&](const Vec& x) {
            MetricPoint<double> g = chart.metric(x);
            double dens = std::sqrt(mat_det(g.g()));
            return (inner(du.eval(x), v.eval(x), g) + inner(u.eval(x), dv.eval(x), g)) * dens;
        });
    double boundary_term = 0.0;
    for (int k = 0; k < n; ++k) {
        std::vector<int> face_axes;
        for (int t = 0; t < n; ++t)
            if (t != k) face_axes.push_back(t);
        for (int side = 0; side < 2; ++side) {
            Vec base(n, 0.0);
            base[k] = side == 0 ? chart.lo()[k] : chart.hi()[k];
            double sign = side == 0 ? -1.0 : 1.0;
            auto integrand = [&](const Vec& x) {
                MetricPoint<double> g = chart.metric(x);
                // Unit outward conormal on the face x_k = const.
                SymTensor<double> nu(n, 1);
                nu[k] = sign / std::sqrt(g.g_inv()[k][k]);
                // Induced area density: determinant of g restricted to the
                // tangential coordinates.
                Mat<double> gsub(n - 1, std::vector<double>(n - 1, 0.0));
                for (int r = 0; r < n - 1; ++r)
                    for (int c = 0; c < n - 1; ++c)
                        gsub[r][c] = g.g()[face_axes[r]][face_axes[c]];
                double dens = n == 1 ? 1.0 : std::sqrt(mat_det(gsub));
                return inner(i_xi(u.eval(x), nu), v.eval(x), g) * dens;
            };
            boundary_term += n == 1 ? integrand(base)
                                    : detail::box_quadrature(chart, face_axes, base, order, integrand);
        }
    }
    return std::abs(volume_term - boundary_term);
}

// Deterministic lattice of interior sample points.
inline std::vector<Vec> interior_lattice(const Chart& chart, int per_axis, double margin = 0.08) {
    const int n = chart.dim();
    std::vector<Vec> pts;
    std::vector<int> ctr(n, 0);
    while (true) {
        Vec x(n);
        for (int k = 0; k < n; ++k) {
            double a = chart.lo()[k], b = chart.hi()[k];
            double a2 = a + margin * (b - a), b2 = b - margin * (b - a);
            x[k] = per_axis == 1 ? 0.5 * (a2 + b2) : a2 + (b2 - a2) * ctr[k] / (per_axis - 1);
        }
        pts.push_back(std::move(x));
        int t = 0;
        for (; t < n; ++t) {
            if (++ctr[t] < per_axis) break;
            ctr[t] = 0;
        }
        if (t == n) break;
    }
    return pts;
}

inline double field_sup_diff(const TensorField& a, const TensorField& b,
                             const std::vector<Vec>& pts) {
    double worst = 0.0;
    for (const auto& x : pts) worst = std::max(worst, (a.eval(x) - b.eval(x)).max_abs());
    return worst;
}

} // namespace symten
