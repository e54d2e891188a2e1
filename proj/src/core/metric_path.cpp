/// @file metric_path.cpp
/// @brief Path profile, area gauge, Poisson solve, flow integration, path assembly.

#include "core/metric_path.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "core/errors.hpp"

namespace horizon {

namespace {

constexpr double kFourPi = 4.0 * M_PI;
constexpr int kPanels = 64;
constexpr int kGL = 12;

/// Bump on (0, 1/2), flat to all orders at both ends.  The 1/16 keeps the
/// center exponent at -1 so ζ' stays moderate (max ≈ 3.3 rather than ≈ 9 for
/// the unscaled exponent), which both the Chebyshev time grid and later
/// finite differencing of path data appreciate.
double bump(double t) {
    if (t <= 0.0 || t >= 0.5) return 0.0;
    return std::exp(-0.0625 / (t * (0.5 - t)));
}

/// kGL-point Gauss–Legendre nodes/weights on [-1,1], computed once.
const std::vector<double>& gl_nodes() {
    static std::vector<double> x = [] {
        std::vector<double> xs, ws;
        gauss_legendre(kGL, xs, ws);
        return xs;
    }();
    return x;
}
const std::vector<double>& gl_weights() {
    static std::vector<double> w = [] {
        std::vector<double> xs, ws;
        gauss_legendre(kGL, xs, ws);
        return ws;
    }();
    return w;
}

double integrate_bump(double a, double b) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a), s = 0.0;
    for (int q = 0; q < kGL; ++q) s += gl_weights()[q] * bump(mid + half * gl_nodes()[q]);
    return s * half;
}

} // namespace

PathProfile::PathProfile(int flatness_order) : flatness_order_(flatness_order) {
    if (flatness_order < 1) throw input_error("PathProfile: flatness order must be >= 1");
    panel_cum_.assign(kPanels + 1, 0.0);
    double h = 0.5 / kPanels;
    for (int p = 0; p < kPanels; ++p)
        panel_cum_[p + 1] = panel_cum_[p] + integrate_bump(p * h, (p + 1) * h);
    norm_ = panel_cum_.back();
}

double PathProfile::zeta(double t) const {
    if (t <= 0.0) return 1.0;
    if (t >= 0.5) return 0.0;
    double h = 0.5 / kPanels;
    int p = std::min(static_cast<int>(t / h), kPanels - 1);
    double I = panel_cum_[p] + integrate_bump(p * h, t);
    return 1.0 - I / norm_;
}

double PathProfile::zeta_prime(double t) const { return -bump(t) / norm_; }

PathProfile default_zeta(int flatness_order) { return PathProfile(flatness_order); }

AreaGauge::AreaGauge(const ConformalMetric& g, const PathProfile& profile) : profile_(profile) {
    const SphereGrid& fg = *g.fine();
    w_fine_ = g.w_fine();
    weight_fine_.resize(w_fine_.size());
    for (int i = 0; i < fg.nlat; ++i)
        for (int j = 0; j < fg.nlon; ++j) weight_fine_[static_cast<size_t>(i) * fg.nlon + j] = fg.weight(i);
    logA1_ = std::log(area_of(1.0));
}

double AreaGauge::area_of(double z) const {
    double s = 0.0;
    for (size_t k = 0; k < w_fine_.size(); ++k) s += weight_fine_[k] * std::exp(2.0 * z * w_fine_[k]);
    return s;
}

double AreaGauge::w_moment(double z) const {
    double s = 0.0;
    for (size_t k = 0; k < w_fine_.size(); ++k)
        s += weight_fine_[k] * w_fine_[k] * std::exp(2.0 * z * w_fine_[k]);
    return s;
}

double AreaGauge::a(double t) const { return 0.5 * (logA1_ - std::log(area_of(profile_.zeta(t)))); }

double AreaGauge::a_prime(double t) const {
    double z = profile_.zeta(t), zp = profile_.zeta_prime(t);
    if (zp == 0.0) return 0.0;
    return -zp * w_moment(z) / area_of(z);
}

AreaGauge area_gauge(const ConformalMetric& g, const PathProfile& profile) { return AreaGauge(g, profile); }

ScalarField poisson_solve(const ConformalMetric& h, const ScalarField& rho) {
    if (rho.grid != h.base()) throw input_error("poisson_solve: source not on the metric's base grid");
    const SphereGrid& fg = *h.fine();

    Coeffs ar = sh_analyze(rho);
    std::vector<double> rho_fine = sht_synthesize(fg, ar);
    std::vector<double> rhs(rho_fine.size());
    double mean = 0.0, scale = 0.0;
    for (int i = 0; i < fg.nlat; ++i)
        for (int j = 0; j < fg.nlon; ++j) {
            size_t k = static_cast<size_t>(i) * fg.nlon + j;
            rhs[k] = rho_fine[k] * h.conformal_density_fine()[k];
            mean += fg.weight(i) * rhs[k];
            scale += fg.weight(i) * std::abs(rhs[k]);
        }
    if (std::abs(mean) > 1e-9 * std::max(1.0, scale))
        throw input_error("poisson_solve: source has nonzero mean against dA_h");

    Coeffs b = sht_analyze(fg, rhs, fg.L);
    Coeffs psi(fg.L);
    for (int l = 1; l <= psi.L; ++l)
        for (int m = -l; m <= l; ++m) psi.at(l, m) = -b.at(l, m) / (static_cast<double>(l) * (l + 1));
    return sh_synthesize(h.fine(), psi);
}

void TimeSampledVectorField::add_sample(double t, const SphereGrid& g,
                                        const std::vector<double>& comp_theta,
                                        const std::vector<double>& comp_phi) {
    if (L == 0) L = g.L;
    if (L != g.L) throw input_error("TimeSampledVectorField: inconsistent sample grids");
    bool all_zero = true;
    for (size_t k = 0; k < comp_theta.size() && all_zero; ++k)
        all_zero = comp_theta[k] == 0.0 && comp_phi[k] == 0.0;
    std::array<Coeffs, 3> sample = {Coeffs(L), Coeffs(L), Coeffs(L)};
    if (!all_zero) {
        std::vector<double> cart(static_cast<size_t>(g.nodes()));
        for (int d = 0; d < 3; ++d) {
            for (int i = 0; i < g.nlat; ++i) {
                double ct = g.x[i], st = g.sin_theta[i];
                for (int j = 0; j < g.nlon; ++j) {
                    size_t k = static_cast<size_t>(i) * g.nlon + j;
                    double cp = g.cosm(1, j), sp = g.sinm(1, j);
                    double et[3] = {ct * cp, ct * sp, -st};
                    double ep[3] = {-sp, cp, 0.0};
                    cart[k] = comp_theta[k] * et[d] + comp_phi[k] * ep[d];
                }
            }
            sample[d] = sht_analyze(g, cart, L);
        }
    }
    times.push_back(t);
    cart.push_back(std::move(sample));
}

void TimeSampledVectorField::finalize() {
    size_t n = times.size();
    bary.assign(n, 1.0);
    for (size_t j = 0; j < n; ++j)
        for (size_t i = 0; i < n; ++i)
            if (i != j) bary[j] /= (times[j] - times[i]);
    size_t tail = n;
    while (tail > 0 && max_abs_at(static_cast<int>(tail - 1)) == 0.0) --tail;
    zero_from = tail < n ? times[tail] : std::numeric_limits<double>::infinity();
}

std::array<Coeffs, 3> TimeSampledVectorField::at_time(double t) const {
    if (t >= zero_from) return {Coeffs(L), Coeffs(L), Coeffs(L)};
    for (size_t j = 0; j < times.size(); ++j)
        if (t == times[j]) return cart[j];
    std::array<Coeffs, 3> out = {Coeffs(L), Coeffs(L), Coeffs(L)};
    double denom = 0.0;
    std::vector<double> coef(times.size());
    for (size_t j = 0; j < times.size(); ++j) {
        coef[j] = bary[j] / (t - times[j]);
        denom += coef[j];
    }
    for (size_t j = 0; j < times.size(); ++j) {
        double cj = coef[j] / denom;
        if (cj == 0.0) continue;
        for (int d = 0; d < 3; ++d)
            for (size_t k = 0; k < out[d].c.size(); ++k) out[d].c[k] += cj * cart[j][d].c[k];
    }
    return out;
}

double TimeSampledVectorField::max_abs_at(int node) const {
    double m = 0.0;
    for (int d = 0; d < 3; ++d)
        for (double c : cart[node][d].c) m = std::max(m, std::abs(c));
    return m;
}

namespace {

inline void normalize(std::array<double, 3>& p) {
    double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    p[0] /= n;
    p[1] /= n;
    p[2] /= n;
}

inline void tangentialize(std::array<double, 3>& v, const std::array<double, 3>& p) {
    double d = v[0] * p[0] + v[1] * p[1] + v[2] * p[2];
    v[0] -= d * p[0];
    v[1] -= d * p[1];
    v[2] -= d * p[2];
}

/// Right-hand side of the coupled position/frame ODE at one point.
struct FlowDeriv {
    std::array<double, 3> dp, dv1, dv2;
};

FlowDeriv flow_rhs(const std::array<Coeffs, 3>& A, const FlowState& s, LegendreWorkspace& ws) {
    double r = std::sqrt(s.p[0] * s.p[0] + s.p[1] * s.p[1] + s.p[2] * s.p[2]);
    double theta = std::acos(std::clamp(s.p[2] / r, -1.0, 1.0));
    double phi = std::atan2(s.p[1], s.p[0]);
    const Coeffs* sets[3] = {&A[0], &A[1], &A[2]};
    PointSample ps[3];
    synth_point_multi(sets, 3, theta, phi, ws, ps);

    double ct = std::cos(theta), st = std::sin(theta), cp = std::cos(phi), sp = std::sin(phi);
    double et[3] = {ct * cp, ct * sp, -st};
    double ep[3] = {-sp, cp, 0.0};
    double phat[3] = {s.p[0] / r, s.p[1] / r, s.p[2] / r};

    FlowDeriv d{};
    double Xdotp = 0.0;
    for (int k = 0; k < 3; ++k) Xdotp += ps[k].value * phat[k];
    for (int k = 0; k < 3; ++k) d.dp[k] = ps[k].value - Xdotp * phat[k];

    // dv_a^k = <∇*X^k, v_a> with the gradient of each Cartesian component.
    for (int k = 0; k < 3; ++k) {
        double gk[3] = {ps[k].dtheta * et[0] + ps[k].dphi_over_sin * ep[0],
                        ps[k].dtheta * et[1] + ps[k].dphi_over_sin * ep[1],
                        ps[k].dtheta * et[2] + ps[k].dphi_over_sin * ep[2]};
        d.dv1[k] = gk[0] * s.v1[0] + gk[1] * s.v1[1] + gk[2] * s.v1[2];
        d.dv2[k] = gk[0] * s.v2[0] + gk[1] * s.v2[1] + gk[2] * s.v2[2];
    }
    return d;
}

FlowState seed_state(double theta, double phi) {
    double ct = std::cos(theta), st = std::sin(theta), cp = std::cos(phi), sp = std::sin(phi);
    FlowState s;
    s.p = {st * cp, st * sp, ct};
    s.v1 = {ct * cp, ct * sp, -st};
    s.v2 = {-sp, cp, 0.0};
    return s;
}

FlowState rotate_z(const FlowState& s, double cp, double sp) {
    auto rot = [&](const std::array<double, 3>& v) {
        return std::array<double, 3>{cp * v[0] - sp * v[1], sp * v[0] + cp * v[1], v[2]};
    };
    return FlowState{rot(s.p), rot(s.v1), rot(s.v2)};
}

} // namespace

namespace {

/// Advance `cur` through the record intervals, pushing a snapshot per record
/// time through `record` (which may expand a meridian to the full grid).
void integrate_core(const TimeSampledVectorField& X, std::vector<FlowState>& cur,
                    const std::vector<double>& record_times, double max_substep,
                    const std::function<void(const std::vector<FlowState>&)>& record) {
    if (record_times.size() < 2) throw input_error("flow_integrate: need at least two record times");
    if (!(max_substep > 1e-8)) throw numeric_error("flow_integrate: step size underflow");

    LegendreWorkspace ws;
    record(cur);
    for (size_t seg = 0; seg + 1 < record_times.size(); ++seg) {
        double t0 = record_times[seg], t1 = record_times[seg + 1];
        // Frozen interval: the field's zero tail covers it, so skipping the
        // segment outright is exact.
        if (t0 >= X.zero_from) {
            record(cur);
            continue;
        }
        int nsub = std::max(1, static_cast<int>(std::ceil((t1 - t0) / max_substep)));
        double hstep = (t1 - t0) / nsub;
        for (int st = 0; st < nsub; ++st) {
            double ta = t0 + st * hstep, tm = ta + 0.5 * hstep, tb = ta + hstep;
            std::array<Coeffs, 3> A0 = X.at_time(ta), Am = X.at_time(tm), Ab = X.at_time(tb);
            for (FlowState& s : cur) {
                FlowDeriv k1 = flow_rhs(A0, s, ws);
                FlowState s2 = s;
                for (int d = 0; d < 3; ++d) {
                    s2.p[d] += 0.5 * hstep * k1.dp[d];
                    s2.v1[d] += 0.5 * hstep * k1.dv1[d];
                    s2.v2[d] += 0.5 * hstep * k1.dv2[d];
                }
                FlowDeriv k2 = flow_rhs(Am, s2, ws);
                FlowState s3 = s;
                for (int d = 0; d < 3; ++d) {
                    s3.p[d] += 0.5 * hstep * k2.dp[d];
                    s3.v1[d] += 0.5 * hstep * k2.dv1[d];
                    s3.v2[d] += 0.5 * hstep * k2.dv2[d];
                }
                FlowDeriv k3 = flow_rhs(Am, s3, ws);
                FlowState s4 = s;
                for (int d = 0; d < 3; ++d) {
                    s4.p[d] += hstep * k3.dp[d];
                    s4.v1[d] += hstep * k3.dv1[d];
                    s4.v2[d] += hstep * k3.dv2[d];
                }
                FlowDeriv k4 = flow_rhs(Ab, s4, ws);
                for (int d = 0; d < 3; ++d) {
                    s.p[d] += hstep / 6.0 * (k1.dp[d] + 2.0 * k2.dp[d] + 2.0 * k3.dp[d] + k4.dp[d]);
                    s.v1[d] += hstep / 6.0 * (k1.dv1[d] + 2.0 * k2.dv1[d] + 2.0 * k3.dv1[d] + k4.dv1[d]);
                    s.v2[d] += hstep / 6.0 * (k1.dv2[d] + 2.0 * k2.dv2[d] + 2.0 * k3.dv2[d] + k4.dv2[d]);
                }
                normalize(s.p);
                tangentialize(s.v1, s.p);
                tangentialize(s.v2, s.p);
            }
        }
        for (const FlowState& s : cur) {
            double cx = s.v1[1] * s.v2[2] - s.v1[2] * s.v2[1];
            double cy = s.v1[2] * s.v2[0] - s.v1[0] * s.v2[2];
            double cz = s.v1[0] * s.v2[1] - s.v1[1] * s.v2[0];
            if (cx * s.p[0] + cy * s.p[1] + cz * s.p[2] <= 0.0)
                throw numeric_error("flow_integrate: Jacobian degeneracy (det <= 0)");
        }
        record(cur);
    }
}

} // namespace

FlowMap flow_integrate(const TimeSampledVectorField& X, GridPtr seeds,
                       const std::vector<double>& record_times, double max_substep,
                       bool zonal_replicate) {
    const SphereGrid& g = *seeds;
    std::vector<FlowState> cur;
    if (zonal_replicate) {
        for (int i = 0; i < g.nlat; ++i) cur.push_back(seed_state(g.theta[i], 0.0));
    } else {
        for (int i = 0; i < g.nlat; ++i)
            for (int j = 0; j < g.nlon; ++j) cur.push_back(seed_state(g.theta[i], g.phi[j]));
    }

    FlowMap fm;
    fm.grid = seeds;
    fm.times = record_times;
    fm.states.reserve(record_times.size());
    auto expand = [&](const std::vector<FlowState>& mer) {
        std::vector<FlowState> full(static_cast<size_t>(g.nodes()));
        for (int i = 0; i < g.nlat; ++i)
            for (int j = 0; j < g.nlon; ++j)
                full[static_cast<size_t>(i) * g.nlon + j] = rotate_z(mer[i], g.cosm(1, j), g.sinm(1, j));
        return full;
    };
    integrate_core(X, cur, record_times, max_substep, [&](const std::vector<FlowState>& states) {
        fm.states.push_back(zonal_replicate ? expand(states) : states);
    });
    return fm;
}

FlowMap flow_integrate(const TimeSampledVectorField& X, std::vector<FlowState> seeds,
                       GridPtr grid, const std::vector<double>& record_times, double max_substep) {
    FlowMap fm;
    fm.grid = std::move(grid);
    fm.times = record_times;
    fm.states.reserve(record_times.size());
    integrate_core(X, seeds, record_times, max_substep,
                   [&](const std::vector<FlowState>& states) { fm.states.push_back(states); });
    return fm;
}

namespace {

/// Chebyshev–Gauss–Lobatto nodes mapped to [0,1]: clustered where ζ varies fastest.
std::vector<double> chebyshev_time_nodes(int n) {
    std::vector<double> t(n);
    for (int k = 0; k < n; ++k) t[k] = 0.5 * (1.0 - std::cos(M_PI * k / (n - 1)));
    t.front() = 0.0;
    t.back() = 1.0;
    return t;
}

} // namespace

double MetricPath::omega_at(int k, double theta, double phi) const {
    LegendreWorkspace ws;
    double z = profile.zeta(times[k]);
    return z * synth_point(w, theta, phi, ws).value + gauge_a[k];
}

double MetricPath::rayleigh_pullback(int k) const {
    const SphereGrid& bg = *grid;
    ScalarField uf(grid, u[k]);
    Coeffs au = sh_analyze(uf);
    std::vector<double> gt, gp;
    synth_gradient(bg, au, gt, gp);

    Coeffs lapw = laplacian_coeffs(w);
    double z = profile.zeta(times[k]);
    double ak = gauge_a[k];
    LegendreWorkspace ws;

    double num = 0.0, den = 0.0;
    for (int i = 0; i < bg.nlat; ++i) {
        for (int j = 0; j < bg.nlon; ++j) {
            size_t n = static_cast<size_t>(i) * bg.nlon + j;
            const auto& comp = g[k][n];
            double g11 = comp[0], g12 = comp[1], g22 = comp[2];
            double det = g11 * g22 - g12 * g12;
            double sq = std::sqrt(det);
            // Inverse metric contraction of the frame gradient.
            double du1 = gt[n], du2 = gp[n];
            double grad2 = (g22 * du1 * du1 - 2.0 * g12 * du1 * du2 + g11 * du2 * du2) / det;

            // K_{g(t)}(x) = K_{h(t)}(φ_t(x)) = e^{-2Ω}(1 - ζ Δ*w) at the image point.
            const FlowState& s = flow.states[k][n];
            double theta_p = std::acos(std::clamp(s.p[2], -1.0, 1.0));
            double phi_p = std::atan2(s.p[1], s.p[0]);
            const Coeffs* sets[2] = {&w, &lapw};
            PointSample out[2];
            synth_point_multi(sets, 2, theta_p, phi_p, ws, out);
            double omega = z * out[0].value + ak;
            double K = std::exp(-2.0 * omega) * (1.0 - z * out[1].value);

            double uu = u[k][n];
            num += bg.weight(i) * sq * (grad2 + K * uu * uu);
            den += bg.weight(i) * sq * uu * uu;
        }
    }
    return num / den;
}

EigenContinuity eigen_along_path(MetricPath& path) {
    const int n = static_cast<int>(path.times.size());
    path.lambda.assign(n, 0.0);
    path.u_h.assign(n, Coeffs(path.w.L));
    path.u.assign(n, std::vector<double>());

    bool zonal = is_zonal(path.w);
    EigenContinuity cont;
    cont.min_gap = std::numeric_limits<double>::infinity();
    path.min_lambda = std::numeric_limits<double>::infinity();

    int frozen_from = -1;
    Coeffs frozen_u(path.w.L);
    double frozen_lambda = 0.0, frozen_gap = 0.0;
    for (int k = 0; k < n; ++k) {
        double z = path.profile.zeta(path.times[k]);
        Coeffs W(path.w.L);
        for (size_t c = 0; c < W.c.size(); ++c) W.c[c] = z * path.w.c[c];
        W.at(0, 0) += path.gauge_a[k] * std::sqrt(kFourPi);

        double lam, gap;
        Coeffs uc(path.w.L);
        if (z == 0.0 && frozen_from >= 0) {
            lam = frozen_lambda;
            gap = frozen_gap;
            uc = frozen_u;
        } else {
            ConformalMetric hk(W);
            EigenPair ep = first_eigenpair(hk);
            if (!(ep.lambda > default_membership_tol(hk)))
                throw verify_error("eigen_along_path: metric leaves the stable class along the path");
            if (ep.gap < 1e-10)
                throw numeric_error("eigen_along_path: eigenvalue gap below 1e-10; family is ill-defined");
            lam = ep.lambda;
            gap = ep.gap;
            uc = ep.u_coeffs;
            if (z == 0.0) {
                frozen_from = k;
                frozen_lambda = lam;
                frozen_gap = gap;
                frozen_u = uc;
            }
        }
        path.lambda[k] = lam;
        path.u_h[k] = uc;
        path.min_lambda = std::min(path.min_lambda, lam);
        cont.min_gap = std::min(cont.min_gap, gap);

        // Compose with the flow: u(t)∘φ_t sampled at the base nodes.
        const SphereGrid& bg = *path.grid;
        std::vector<double> uv(static_cast<size_t>(bg.nodes()));
        LegendreWorkspace ws;
        if (zonal) {
            for (int i = 0; i < bg.nlat; ++i) {
                const FlowState& s = path.flow.states[k][static_cast<size_t>(i) * bg.nlon];
                double theta_p = std::acos(std::clamp(s.p[2], -1.0, 1.0));
                double val = synth_point(uc, theta_p, 0.0, ws).value;
                for (int j = 0; j < bg.nlon; ++j) uv[static_cast<size_t>(i) * bg.nlon + j] = val;
            }
        } else {
            for (size_t nidx = 0; nidx < uv.size(); ++nidx) {
                const FlowState& s = path.flow.states[k][nidx];
                double theta_p = std::acos(std::clamp(s.p[2], -1.0, 1.0));
                double phi_p = std::atan2(s.p[1], s.p[0]);
                uv[nidx] = synth_point(uc, theta_p, phi_p, ws).value;
            }
        }
        path.u[k] = std::move(uv);
    }

    for (int k = 0; k + 1 < n; ++k) {
        cont.max_lambda_jump = std::max(cont.max_lambda_jump, std::abs(path.lambda[k + 1] - path.lambda[k]));
        double dd = 0.0;
        for (size_t nidx = 0; nidx < path.u[k].size(); ++nidx)
            dd = std::max(dd, std::abs(path.u[k + 1][nidx] - path.u[k][nidx]));
        cont.max_u_rate = std::max(cont.max_u_rate, dd / (path.times[k + 1] - path.times[k]));
    }
    path.min_eigen_gap = cont.min_gap;
    return cont;
}

MetricPath build_path(const ConformalMetric& g0, const PathProfile& profile, int n_time) {
    if (n_time < 8) throw input_error("build_path: need at least 8 time nodes");

    MetricPath path;
    path.grid = g0.base();
    path.w = g0.w_coeffs();
    path.profile = profile;
    path.area = g0.area();
    path.rho = std::sqrt(path.area / kFourPi);
    path.times = chebyshev_time_nodes(n_time);

    AreaGauge gauge(g0, profile);
    path.gauge_a.resize(n_time);
    for (int k = 0; k < n_time; ++k) path.gauge_a[k] = gauge.a(path.times[k]);

    bool zonal = is_zonal(path.w);
    const SphereGrid& fg = *g0.fine();

    // Velocity field X_t = e^{-2Ω} ∇*ψ with Δ_{h}ψ = -2(ζ'w + a').  Sampled on
    // its own Chebyshev grid over the active window [0, 1/2] (clustered at both
    // flat ends of the profile, where polynomial interpolation needs help) plus
    // a closing zero sample at t = 1.
    TimeSampledVectorField X;
    std::vector<double> zero(static_cast<size_t>(fg.nodes()), 0.0);
    const int n_sample = 128;
    std::vector<double> sample_times(n_sample);
    for (int k = 0; k < n_sample; ++k)
        sample_times[k] = 0.25 * (1.0 - std::cos(M_PI * k / (n_sample - 1)));
    sample_times.front() = 0.0;
    sample_times.back() = 0.5;
    sample_times.push_back(1.0);
    for (double t : sample_times) {
        double z = profile.zeta(t), zp = profile.zeta_prime(t);
        double ap = gauge.a_prime(t);
        if (zp == 0.0) {
            X.add_sample(t, fg, zero, zero);
            continue;
        }
        Coeffs W(path.w.L);
        for (size_t c = 0; c < W.c.size(); ++c) W.c[c] = z * path.w.c[c];
        W.at(0, 0) += gauge.a(t) * std::sqrt(kFourPi);
        ConformalMetric hk(W);

        ScalarField rho_f(path.grid);
        for (size_t nidx = 0; nidx < rho_f.size(); ++nidx)
            rho_f.values[nidx] = -2.0 * (zp * g0.w_base()[nidx] + ap);
        ScalarField psi = poisson_solve(hk, rho_f);

        std::vector<double> gt, gp;
        synth_gradient(fg, sh_analyze(psi), gt, gp);
        for (size_t nidx = 0; nidx < gt.size(); ++nidx) {
            gt[nidx] /= hk.conformal_density_fine()[nidx];
            gp[nidx] /= hk.conformal_density_fine()[nidx];
        }
        X.add_sample(t, fg, gt, gp);
    }
    X.finalize();

    path.flow = flow_integrate(X, path.grid, path.times, 0.01, zonal);

    // Pull back the metric: g_ab(t,x) = e^{2Ω(t, p)} <v_a, v_b>.
    const SphereGrid& bg = *path.grid;
    path.g.assign(n_time, std::vector<std::array<double, 3>>(static_cast<size_t>(bg.nodes())));
    LegendreWorkspace ws;
    for (int k = 0; k < n_time; ++k) {
        double z = profile.zeta(path.times[k]), ak = path.gauge_a[k];
        auto eval_node = [&](size_t nidx) {
            const FlowState& s = path.flow.states[k][nidx];
            double theta_p = std::acos(std::clamp(s.p[2], -1.0, 1.0));
            double phi_p = std::atan2(s.p[1], s.p[0]);
            double omega = z * synth_point(path.w, theta_p, phi_p, ws).value + ak;
            double e2 = std::exp(2.0 * omega);
            auto dot = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
                return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
            };
            return std::array<double, 3>{e2 * dot(s.v1, s.v1), e2 * dot(s.v1, s.v2), e2 * dot(s.v2, s.v2)};
        };
        if (zonal) {
            for (int i = 0; i < bg.nlat; ++i) {
                std::array<double, 3> comp = eval_node(static_cast<size_t>(i) * bg.nlon);
                for (int j = 0; j < bg.nlon; ++j) path.g[k][static_cast<size_t>(i) * bg.nlon + j] = comp;
            }
        } else {
            for (size_t nidx = 0; nidx < path.g[k].size(); ++nidx) path.g[k][nidx] = eval_node(nidx);
        }
    }

    // Diagnostics: pointwise area-form constancy and frozen-tail drift.
    path.max_area_form_dev = 0.0;
    for (int k = 0; k < n_time; ++k)
        for (size_t nidx = 0; nidx < path.g[k].size(); ++nidx) {
            const auto& c0 = path.g[0][nidx];
            const auto& ck = path.g[k][nidx];
            double s0 = std::sqrt(c0[0] * c0[2] - c0[1] * c0[1]);
            double sk = std::sqrt(ck[0] * ck[2] - ck[1] * ck[1]);
            path.max_area_form_dev = std::max(path.max_area_form_dev, std::abs(sk / s0 - 1.0));
        }
    path.max_frozen_drift = 0.0;
    for (int k = 0; k + 1 < n_time; ++k) {
        if (path.times[k] < 0.5) continue;
        for (size_t nidx = 0; nidx < path.g[k].size(); ++nidx)
            for (int c = 0; c < 3; ++c)
                path.max_frozen_drift =
                    std::max(path.max_frozen_drift, std::abs(path.g[k + 1][nidx][c] - path.g[k][nidx][c]));
    }

    eigen_along_path(path);
    return path;
}

namespace {

/// Legendre series of ring samples: c_l = (2l+1)/2 Σ_i glw_i f_i P_l(x_i),
/// plus evaluation of (f, f', f'') in the x = cosθ variable at the same rings.
struct RingSeries {
    std::vector<double> coef;

    RingSeries(const SphereGrid& g, const std::vector<double>& ring_vals) {
        int L = g.L;
        coef.assign(L + 1, 0.0);
        for (int i = 0; i < g.nlat; ++i) {
            double x = g.x[i], pm1 = 0.0, p = 1.0;
            for (int l = 0; l <= L; ++l) {
                coef[l] += (2.0 * l + 1.0) / 2.0 * g.glw[i] * ring_vals[i] * p;
                double pn = ((2.0 * l + 1.0) * x * p - l * pm1) / (l + 1.0);
                pm1 = p;
                p = pn;
            }
        }
    }

    void eval(double x, double& f, double& fx, double& fxx) const {
        f = fx = fxx = 0.0;
        double pm1 = 0.0, p = 1.0, dm1 = 0.0, d = 0.0, sm1 = 0.0, s = 0.0;
        for (int l = 0; l < static_cast<int>(coef.size()); ++l) {
            f += coef[l] * p;
            fx += coef[l] * d;
            fxx += coef[l] * s;
            double pn = ((2.0 * l + 1.0) * x * p - l * pm1) / (l + 1.0);
            double dn = (2.0 * l + 1.0) * p + dm1;
            double sn = (2.0 * l + 1.0) * d + sm1;
            pm1 = p; p = pn;
            dm1 = d; d = dn;
            sm1 = s; s = sn;
        }
    }
};

} // namespace

std::vector<double> zonal_curvature_from_samples(const MetricPath& path, int k) {
    if (!is_zonal(path.w)) throw input_error("zonal_curvature_from_samples: path is not zonal");
    const SphereGrid& bg = *path.grid;
    std::vector<double> E(bg.nlat), G(bg.nlat);
    for (int i = 0; i < bg.nlat; ++i) {
        const auto& comp = path.g[k][static_cast<size_t>(i) * bg.nlon];
        E[i] = comp[0];
        G[i] = bg.sin_theta[i] * bg.sin_theta[i] * comp[2];  // g_φφ coordinate component
    }
    RingSeries Es(bg, E), Gs(bg, G);

    // Surface of revolution ds² = E dθ² + G dφ²:
    //   K = -G_θθ/(2EG) + G_θ (E_θ G + E G_θ) / (4 E² G²),
    // with θ-derivatives from the x = cosθ series: f_θ = -s f_x,
    // f_θθ = -c f_x + s² f_xx.
    std::vector<double> K(bg.nlat);
    for (int i = 0; i < bg.nlat; ++i) {
        double x = bg.x[i], s = bg.sin_theta[i];
        double e, ex, exx, g, gx, gxx;
        Es.eval(x, e, ex, exx);
        Gs.eval(x, g, gx, gxx);
        double Et = -s * ex;
        double Gt = -s * gx;
        double Gtt = -x * gx + s * s * gxx;
        K[i] = -Gtt / (2.0 * e * g) + Gt * (Et * g + e * Gt) / (4.0 * e * e * g * g);
    }
    return K;
}

} // namespace horizon
