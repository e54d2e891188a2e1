/// @file collar.cpp
/// @brief Block-metric scalar curvature, collar parameter selection, traces,
///        and slice mean curvature.

#include "core/collar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/numerics.hpp"
#include "core/sht.hpp"

namespace horizon {

namespace {

struct Sym2 {
    double a11 = 0.0, a12 = 0.0, a22 = 0.0;
};

inline double det(const Sym2& a) { return a.a11 * a.a22 - a.a12 * a.a12; }

/// tr(H⁻¹B) for symmetric H (determinant dh) and B.
inline double trace_inv(const Sym2& h, const Sym2& b, double dh) {
    return (h.a22 * b.a11 - 2.0 * h.a12 * b.a12 + h.a11 * b.a22) / dh;
}

/// |B|²_h = tr((H⁻¹B)²).
inline double norm2_inv(const Sym2& h, const Sym2& b, double dh) {
    const double i11 = h.a22 / dh, i12 = -h.a12 / dh, i22 = h.a11 / dh;
    const double m11 = i11 * b.a11 + i12 * b.a12;
    const double m12 = i11 * b.a12 + i12 * b.a22;
    const double m21 = i12 * b.a11 + i22 * b.a12;
    const double m22 = i12 * b.a12 + i22 * b.a22;
    return m11 * m11 + 2.0 * m12 * m21 + m22 * m22;
}

void check_block_shape(const BlockData& b) {
    const size_t nt = b.times.size();
    if (nt < 3) throw input_error("block metric: need at least 3 time samples");
    auto check = [nt](const std::vector<std::vector<double>>& f, size_t nn, const char* name) {
        if (f.size() != nt) throw input_error(std::string("block metric: time count mismatch in ") + name);
        for (const auto& row : f)
            if (row.size() != nn) throw input_error(std::string("block metric: node count mismatch in ") + name);
    };
    if (b.h11.empty() || b.h11.front().empty()) throw input_error("block metric: empty samples");
    const size_t nn = b.h11.front().size();
    check(b.h11, nn, "h11");
    check(b.h12, nn, "h12");
    check(b.h22, nn, "h22");
    check(b.v, nn, "v");
    check(b.gauss, nn, "gauss");
    check(b.lap_v, nn, "lap_v");
    if (!b.dv.empty()) check(b.dv, nn, "dv");
}

struct BlockEval {
    std::vector<std::vector<double>> R, trd, trdd;
    double max_h_norm = 0.0;  // sup |ḣ|_h
};

BlockEval eval_block(const BlockData& b) {
    check_block_shape(b);
    const int nt = static_cast<int>(b.times.size());
    const size_t nn = b.h11.front().size();
    const bool have_dv = !b.dv.empty();
    StencilDerivatives D(b.times);

    BlockEval out;
    out.R.assign(nt, std::vector<double>(nn, 0.0));
    out.trd = out.R;
    out.trdd = out.R;

    std::vector<double> s11(nt), s12(nt), s22(nt), sv(nt);
    for (size_t i = 0; i < nn; ++i) {
        for (int k = 0; k < nt; ++k) {
            s11[k] = b.h11[k][i];
            s12[k] = b.h12[k][i];
            s22[k] = b.h22[k][i];
            sv[k] = b.v[k][i];
        }
        for (int k = 0; k < nt; ++k) {
            const Sym2 h{s11[k], s12[k], s22[k]};
            const double dh = det(h);
            if (dh <= 0.0) throw input_error("block metric: slice metric not positive definite");
            const double v = sv[k];
            if (v <= 0.0) throw input_error("block metric: warp factor not positive");
            const Sym2 hd{D.derivative(s11, k, 1), D.derivative(s12, k, 1), D.derivative(s22, k, 1)};
            const Sym2 hdd{D.derivative(s11, k, 2), D.derivative(s12, k, 2), D.derivative(s22, k, 2)};
            const double trd = trace_inv(h, hd, dh);
            const double trdd = trace_inv(h, hdd, dh);
            const double hn2 = norm2_inv(h, hd, dh);
            const double dv = have_dv ? b.dv[k][i] : D.derivative(sv, k, 1);
            out.trd[k][i] = trd;
            out.trdd[k][i] = trdd;
            out.max_h_norm = std::max(out.max_h_norm, std::sqrt(hn2));
            out.R[k][i] = 2.0 * b.gauss[k][i] - 2.0 * b.lap_v[k][i] / v +
                          (-trdd - 0.25 * trd * trd + (dv / v) * trd + 0.75 * hn2) / (v * v);
        }
    }
    return out;
}

void require_collar(const CollarMetric& c) {
    if (!c.path) throw input_error("collar: null path");
    if (c.path->u.empty() || c.path->lambda.empty() || c.path->g.empty())
        throw input_error("collar: path lacks eigen or metric samples");
    if (c.warp.size() != c.path->times.size()) throw input_error("collar: warp sample count mismatch");
}

} // namespace

std::vector<std::vector<double>> scalar_curvature_block(const BlockData& b) {
    return eval_block(b).R;
}

CollarSelection select_parameters(const MetricPath& path) {
    if (path.u.empty() || path.lambda.empty() || path.g.empty())
        throw input_error("select_parameters: path lacks eigen or metric samples");
    const int nt = static_cast<int>(path.times.size());
    const size_t nn = path.g.front().size();

    CollarSelection s;
    s.inf_lambda = *std::min_element(path.lambda.begin(), path.lambda.end());
    if (s.inf_lambda <= 0.0) throw verify_error("select_parameters: path leaves the stable class (inf lambda <= 0)");
    double min_u = path.u.front().front();
    for (const auto& row : path.u)
        for (double x : row) min_u = std::min(min_u, x);
    if (min_u <= 0.0) throw verify_error("select_parameters: eigenfunction samples not positive");
    s.inf_u_sq = min_u * min_u;

    StencilDerivatives D(path.times);
    std::vector<double> s11(nt), s12(nt), s22(nt), su(nt);
    for (size_t i = 0; i < nn; ++i) {
        for (int k = 0; k < nt; ++k) {
            s11[k] = path.g[k][i][0];
            s12[k] = path.g[k][i][1];
            s22[k] = path.g[k][i][2];
            su[k] = path.u[k][i];
        }
        for (int k = 0; k < nt; ++k) {
            const Sym2 g{s11[k], s12[k], s22[k]};
            const double dg = det(g);
            if (dg <= 0.0) throw input_error("select_parameters: sampled metric not positive definite");
            const Sym2 gdd{D.derivative(s11, k, 2), D.derivative(s12, k, 2), D.derivative(s22, k, 2)};
            s.sup_trace_gdd = std::max(s.sup_trace_gdd, std::abs(trace_inv(g, gdd, dg)));
            s.sup_dlog_u = std::max(s.sup_dlog_u, std::abs(D.derivative(su, k, 1) / su[k]));
        }
    }

    s.eps0 = 0.9 * kCollarEpsCap;
    const double negative_terms = 4.0 * s.eps0 + 2.0 * s.sup_trace_gdd + 4.0 * s.eps0 * s.sup_dlog_u;
    s.A0 = 1.1 * std::sqrt(1.1 * negative_terms / (2.0 * s.inf_lambda * s.inf_u_sq));
    return s;
}

CollarMetric make_collar(std::shared_ptr<const MetricPath> path, double eps, double A) {
    if (!path) throw input_error("make_collar: null path");
    if (path->u.empty() || path->lambda.empty() || path->g.empty())
        throw input_error("make_collar: path lacks eigen or metric samples");
    if (!(eps > 0.0) || eps > kCollarEpsCap) throw input_error("make_collar: eps must lie in (0, cap]");
    if (!(A > 0.0)) throw input_error("make_collar: A must be positive");
    for (const auto& row : path->u)
        for (double x : row)
            if (x <= 0.0) throw verify_error("make_collar: eigenfunction samples not positive");

    CollarMetric c;
    c.eps = eps;
    c.A = A;
    c.warp.resize(path->u.size());
    for (size_t k = 0; k < path->u.size(); ++k) {
        c.warp[k].resize(path->u[k].size());
        for (size_t i = 0; i < path->u[k].size(); ++i) c.warp[k][i] = A * path->u[k][i];
    }
    c.path = std::move(path);
    return c;
}

CollarMetric rescale_warp(const CollarMetric& c) {
    require_collar(c);
    CollarMetric out = c;
    out.A = 1.0;
    return out;
}

CollarTraces closed_form_traces(const CollarMetric& c) {
    require_collar(c);
    const MetricPath& P = *c.path;
    if (P.max_area_form_dev > 1e-3)
        throw input_error("closed_form_traces: path area form not constant within tolerance");
    const int nt = static_cast<int>(P.times.size());
    const size_t nn = P.g.front().size();
    StencilDerivatives D(P.times);

    CollarTraces tr;
    tr.tr_hdot.resize(nt);
    for (int k = 0; k < nt; ++k) {
        const double t = P.times[k];
        tr.tr_hdot[k] = 4.0 * c.eps * t / (1.0 + c.eps * t * t);
    }
    tr.tr_hddot.assign(nt, std::vector<double>(nn, 0.0));
    std::vector<double> s11(nt), s12(nt), s22(nt);
    for (size_t i = 0; i < nn; ++i) {
        for (int k = 0; k < nt; ++k) {
            s11[k] = P.g[k][i][0];
            s12[k] = P.g[k][i][1];
            s22[k] = P.g[k][i][2];
        }
        for (int k = 0; k < nt; ++k) {
            const Sym2 g{s11[k], s12[k], s22[k]};
            const double dg = det(g);
            if (dg <= 0.0) throw input_error("closed_form_traces: sampled metric not positive definite");
            const Sym2 gd{D.derivative(s11, k, 1), D.derivative(s12, k, 1), D.derivative(s22, k, 1)};
            // tr_g g̈ = |ġ|²_g when tr_g ġ ≡ 0 (differentiate the vanishing trace).
            const double t = P.times[k];
            tr.tr_hddot[k][i] = 4.0 * c.eps / (1.0 + c.eps * t * t) + norm2_inv(g, gd, dg);
        }
    }
    return tr;
}

CollarCurvature scalar_curvature_collar(const CollarMetric& c) {
    require_collar(c);
    const MetricPath& P = *c.path;
    const SphereGrid& G = *P.grid;
    const int nt = static_cast<int>(P.times.size());
    const size_t nn = P.g.front().size();

    const CollarTraces cf = closed_form_traces(c);  // also validates area-form constancy

    // Block data: slice metric (1+εt²)g, supplied warp, and the spectral
    // curvature/Laplacian composed through the flow (pullback identities).
    BlockData b;
    b.times = P.times;
    b.h11.assign(nt, std::vector<double>(nn, 0.0));
    b.h12 = b.h11;
    b.h22 = b.h11;
    b.gauss = b.h11;
    b.lap_v = b.h11;
    b.dv = b.h11;
    b.v = c.warp;

    StencilDerivatives D(P.times);
    std::vector<double> su(nt);
    for (size_t i = 0; i < nn; ++i) {
        for (int k = 0; k < nt; ++k) su[k] = c.warp[k][i];
        for (int k = 0; k < nt; ++k) b.dv[k][i] = D.derivative(su, k, 1);
    }

    const bool zonal = is_zonal(P.w);
    const Coeffs lapw = laplacian_coeffs(P.w);
    LegendreWorkspace ws;
    for (int k = 0; k < nt; ++k) {
        const double t = P.times[k];
        const double c2 = 1.0 + c.eps * t * t;
        const double zeta_k = P.profile.zeta(t);
        const double a_k = P.gauge_a[k];
        const Coeffs lap_uh = laplacian_coeffs(P.u_h[k]);
        const Coeffs* sets[3] = {&P.w, &lapw, &lap_uh};
        PointSample out[3];
        for (size_t i = 0; i < nn; ++i) {
            const size_t node = i;
            const auto& comps = P.g[k][node];
            b.h11[k][node] = c2 * comps[0];
            b.h12[k][node] = c2 * comps[1];
            b.h22[k][node] = c2 * comps[2];
        }
        for (int ilat = 0; ilat < G.nlat; ++ilat) {
            const int jmax = zonal ? 1 : G.nlon;
            double gauss0 = 0.0, lapg0 = 0.0;
            for (int j = 0; j < jmax; ++j) {
                const size_t node = static_cast<size_t>(G.node(ilat, j));
                const auto& p = P.flow.states[k][node].p;
                const double theta = std::atan2(std::hypot(p[0], p[1]), p[2]);
                const double phi = std::atan2(p[1], p[0]);
                synth_point_multi(sets, 3, theta, phi, ws, out);
                const double e2O = std::exp(2.0 * (zeta_k * out[0].value + a_k));
                gauss0 = (1.0 - zeta_k * out[1].value) / e2O;
                lapg0 = out[2].value / e2O;  // Δ_{g(t)}u at the image point
                b.gauss[k][node] = gauss0 / c2;
                b.lap_v[k][node] = (c.warp[k][node] / P.u[k][node]) * lapg0 / c2;
            }
            if (zonal) {
                for (int j = 1; j < G.nlon; ++j) {
                    const size_t node = static_cast<size_t>(G.node(ilat, j));
                    b.gauss[k][node] = gauss0 / c2;
                    b.lap_v[k][node] = (c.warp[k][node] / P.u[k][node]) * lapg0 / c2;
                }
            }
        }
    }

    const BlockEval ev = eval_block(b);

    CollarCurvature rep;
    rep.R = ev.R;
    rep.bound.assign(nt, std::vector<double>(nn, 0.0));
    rep.min_R = std::numeric_limits<double>::infinity();
    rep.min_bound = std::numeric_limits<double>::infinity();
    double sup_trd = 0.0, sup_dvv = 0.0;
    for (int k = 0; k < nt; ++k) {
        const double c2 = 1.0 + c.eps * P.times[k] * P.times[k];
        sup_trd = std::max(sup_trd, std::abs(cf.tr_hdot[k]));
        for (size_t i = 0; i < nn; ++i) {
            const double v = c.warp[k][i];
            const double dvv = b.dv[k][i] / v;
            sup_dvv = std::max(sup_dvv, std::abs(dvv));
            rep.bound[k][i] = 2.0 * P.lambda[k] / c2 +
                              (-cf.tr_hddot[k][i] + dvv * cf.tr_hdot[k]) / (v * v);
            rep.min_bound = std::min(rep.min_bound, rep.bound[k][i]);
            if (ev.R[k][i] < rep.min_R) {
                rep.min_R = ev.R[k][i];
                rep.argmin_time = k;
                rep.argmin_node = static_cast<int>(i);
            }
            rep.trace_noise = std::max(rep.trace_noise, std::abs(ev.trd[k][i] - cf.tr_hdot[k]));
            rep.ddot_noise = std::max(rep.ddot_noise, std::abs(ev.trdd[k][i] - cf.tr_hddot[k][i]));
        }
    }
    double sup_inv_v2 = 0.0;
    for (const auto& row : c.warp)
        for (double v : row) sup_inv_v2 = std::max(sup_inv_v2, 1.0 / (v * v));
    rep.noise_estimate = sup_inv_v2 * (rep.ddot_noise +
                                       (0.5 * sup_trd + sup_dvv) * rep.trace_noise +
                                       1.5 * ev.max_h_norm * rep.trace_noise);

    if (rep.trace_noise > 1e-3 * (1.0 + sup_trd))
        throw numeric_error("collar curvature: insufficient time resolution (first-derivative trace noise)");
    if (rep.min_bound > 0.0 && rep.noise_estimate > 0.5 * rep.min_bound)
        throw numeric_error("collar curvature: insufficient time resolution (noise exceeds positivity margin)");
    return rep;
}

std::vector<double> slice_mean_curvature(const CollarMetric& c, double t0) {
    require_collar(c);
    if (t0 < 0.0 || t0 > 1.0) throw input_error("slice_mean_curvature: t0 outside [0,1]");
    const MetricPath& P = *c.path;
    const int nt = static_cast<int>(P.times.size());
    const size_t nn = c.warp.front().size();
    const double trd = 4.0 * c.eps * t0 / (1.0 + c.eps * t0 * t0);

    BarycentricInterpolant B(P.times);
    std::vector<double> series(nt), H(nn, 0.0);
    for (size_t i = 0; i < nn; ++i) {
        for (int k = 0; k < nt; ++k) series[k] = c.warp[k][i];
        const double v = B.eval(series, t0);
        if (v <= 0.0) throw numeric_error("slice_mean_curvature: interpolated warp not positive");
        H[i] = trd / (2.0 * v);
    }
    return H;
}

} // namespace horizon
