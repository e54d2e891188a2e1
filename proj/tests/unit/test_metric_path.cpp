/// @file test_metric_path.cpp
/// @brief Path profile, area gauge, sphere Poisson solve, flow maps, and the
///        area-preserving path from a conformal metric to the round metric.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "core/errors.hpp"
#include "core/metric_path.hpp"
#include "test_support.hpp"

using namespace horizon;
using horizon::test::max_abs;
using horizon::test::random_coeffs;
using horizon::test::report;

namespace {

constexpr double kFourPi = 4.0 * M_PI;

Coeffs half_cos_w(int L) {
    Coeffs w(L);
    w.at(1, 0) = 0.5 * std::sqrt(kFourPi / 3.0);
    return w;
}

Coeffs constant_w(int L, double c) {
    Coeffs w(L);
    w.at(0, 0) = c * std::sqrt(kFourPi);
    return w;
}

std::vector<double> cgl_nodes(int n) {
    std::vector<double> t(n);
    for (int k = 0; k < n; ++k) t[k] = 0.5 * (1.0 - std::cos(M_PI * k / (n - 1)));
    t.front() = 0.0;
    t.back() = 1.0;
    return t;
}

double sup_gradient(const Coeffs& a) {
    GridPtr fine = make_grid(2 * a.L);
    std::vector<double> gt, gp;
    synth_gradient(*fine, a, gt, gp);
    double s = 0.0;
    for (size_t k = 0; k < gt.size(); ++k) s = std::max(s, std::hypot(gt[k], gp[k]));
    return s;
}

/// Mean-zero random w rescaled so sup|∇*w| hits the target (inside the
/// gradient-certified stable class for target < 1).
Coeffs bounded_gradient_w(int L, unsigned seed, double target_sup) {
    Coeffs w = random_coeffs(L, seed, 0.3);
    w.at(0, 0) = 0.0;
    double s = sup_gradient(w);
    for (double& c : w.c) c *= target_sup / s;
    return w;
}

FlowState frame_seed(double theta, double phi) {
    double ct = std::cos(theta), st = std::sin(theta), cp = std::cos(phi), sp = std::sin(phi);
    FlowState s;
    s.p = {st * cp, st * sp, ct};
    s.v1 = {ct * cp, ct * sp, -st};
    s.v2 = {-sp, cp, 0.0};
    return s;
}

double state_distance(const FlowState& a, const FlowState& b) {
    double m = 0.0;
    for (int d = 0; d < 3; ++d) {
        m = std::max(m, std::abs(a.p[d] - b.p[d]));
        m = std::max(m, std::abs(a.v1[d] - b.v1[d]));
        m = std::max(m, std::abs(a.v2[d] - b.v2[d]));
    }
    return m;
}

} // namespace

TEST_CASE("path profile: endpoints, monotonicity, flat start") {
    std::printf("--- Path profile ---\n");
    PathProfile z = default_zeta(3);
    CHECK(z.flatness_order() == 3);

    report("zeta(0) = 1", std::abs(z.zeta(0.0) - 1.0), 1e-15);
    report("zeta(0.5) = 0", std::abs(z.zeta(0.5)), 1e-15);
    report("zeta(0.75) = 0", std::abs(z.zeta(0.75)), 1e-15);
    report("zeta(1) = 0", std::abs(z.zeta(1.0)), 1e-15);
    CHECK(z.zeta(0.2) > z.zeta(0.4));

    double max_pos_slope = -1.0;
    for (int k = 0; k <= 200; ++k) max_pos_slope = std::max(max_pos_slope, z.zeta_prime(k / 200.0));
    report("zeta' <= 0 everywhere", max_pos_slope, 0.0);

    report("flat start: 1 - zeta(0.004)", std::abs(z.zeta(0.004) - 1.0), 1e-12);
    report("flat start: |zeta'(0.004)|", std::abs(z.zeta_prime(0.004)), 1e-12);

    double max_fd = 0.0, h = 1e-5;
    for (double t : {0.15, 0.25, 0.35}) {
        double fd = (z.zeta(t + h) - z.zeta(t - h)) / (2.0 * h);
        max_fd = std::max(max_fd, std::abs(fd - z.zeta_prime(t)));
    }
    report("zeta' matches centered FD", max_fd, 1e-6);
}

TEST_CASE("area gauge: closed forms and area constancy") {
    std::printf("--- Area gauge ---\n");
    PathProfile prof = default_zeta(1);

    AreaGauge a0 = area_gauge(ConformalMetric(Coeffs(8)), prof);
    double dev0 = 0.0;
    for (int k = 0; k <= 16; ++k) dev0 = std::max(dev0, std::abs(a0.a(k / 16.0)));
    report("round metric: a = 0", dev0, 1e-15);

    const double c = 0.37;
    AreaGauge ac = area_gauge(ConformalMetric(constant_w(8, c)), prof);
    double devc = 0.0;
    for (int k = 0; k <= 16; ++k) {
        double t = k / 16.0;
        devc = std::max(devc, std::abs(ac.a(t) - c * (1.0 - prof.zeta(t))));
    }
    report("constant w: a = c(1 - zeta)", devc, 1e-12);

    ConformalMetric ghc(half_cos_w(32));
    AreaGauge ahc = area_gauge(ghc, prof);
    double area_dev = 0.0;
    for (double t : cgl_nodes(64)) {
        Coeffs W = half_cos_w(32);
        double zt = prof.zeta(t);
        for (double& cc : W.c) cc *= zt;
        W.at(0, 0) += ahc.a(t) * std::sqrt(kFourPi);
        area_dev = std::max(area_dev, std::abs(ConformalMetric(W).area() - ghc.area()));
    }
    report("half-cos w: area constancy", area_dev, 1e-8);

    double max_fd = 0.0, h = 1e-5;
    for (double t : {0.15, 0.25, 0.35}) {
        double fd = (ahc.a(t + h) - ahc.a(t - h)) / (2.0 * h);
        max_fd = std::max(max_fd, std::abs(fd - ahc.a_prime(t)));
    }
    report("a' matches centered FD", max_fd, 1e-6);
}

TEST_CASE("poisson solve: closed forms, strong residual, compatibility gate") {
    std::printf("--- Poisson solve ---\n");

    ConformalMetric hc(constant_w(8, 0.2));
    ScalarField zero_rho(hc.base(), 0.0);
    report("zero source: psi = 0", max_abs(poisson_solve(hc, zero_rho).values), 1e-15);

    ConformalMetric round16(Coeffs(16));
    ScalarField rho1(round16.base());
    for (int i = 0; i < round16.base()->nlat; ++i)
        for (int j = 0; j < round16.base()->nlon; ++j)
            rho1.values[static_cast<size_t>(i) * round16.base()->nlon + j] = round16.base()->x[i];
    ScalarField psi1 = poisson_solve(round16, rho1);
    double dev1 = 0.0;
    for (int i = 0; i < psi1.grid->nlat; ++i)
        for (int j = 0; j < psi1.grid->nlon; ++j)
            dev1 = std::max(dev1, std::abs(psi1.values[static_cast<size_t>(i) * psi1.grid->nlon + j] +
                                           0.5 * psi1.grid->x[i]));
    report("round, rho = cos: psi = -cos/2", dev1, 1e-12);

    // Smooth non-zonal metric: strong residual of the re-applied operator.
    Coeffs ws(16);
    ws.at(1, 0) = 0.3 * std::sqrt(kFourPi / 3.0);
    ws.at(2, 1) = 0.12;
    ws.at(3, -2) = 0.08;
    ConformalMetric hs(ws);
    const SphereGrid& fg = *hs.fine();

    Coeffs af = random_coeffs(8, 91, 0.4).resized(16);
    std::vector<double> f_fine = sht_synthesize(fg, af);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < fg.nlat; ++i)
        for (int j = 0; j < fg.nlon; ++j) {
            size_t k = static_cast<size_t>(i) * fg.nlon + j;
            num += fg.weight(i) * f_fine[k] * hs.conformal_density_fine()[k];
            den += fg.weight(i) * hs.conformal_density_fine()[k];
        }
    Coeffs arho = af;
    arho.at(0, 0) -= (num / den) * std::sqrt(kFourPi);
    ScalarField rho = sh_synthesize(hs.base(), arho);

    ScalarField psi = poisson_solve(hs, rho);
    Coeffs apsi = sh_analyze(psi);
    std::vector<double> lap_fine = sht_synthesize(fg, laplacian_coeffs(apsi));
    std::vector<double> rho_fine = sht_synthesize(fg, arho);
    double resid = 0.0, psi_mean = 0.0;
    for (int i = 0; i < fg.nlat; ++i)
        for (int j = 0; j < fg.nlon; ++j) {
            size_t k = static_cast<size_t>(i) * fg.nlon + j;
            resid = std::max(resid,
                             std::abs(lap_fine[k] / hs.conformal_density_fine()[k] - rho_fine[k]));
            psi_mean += fg.weight(i) * psi.values[k];
        }
    report("conformal: strong residual", resid, 1e-8);
    report("psi mean-zero", std::abs(psi_mean), 1e-10);

    ScalarField bad(hs.base(), 0.3);
    CHECK_THROWS_AS(poisson_solve(hs, bad), input_error);
}

TEST_CASE("flow maps: identity, rigid rotation, reverse composition") {
    std::printf("--- Flow maps ---\n");
    GridPtr g = make_grid(8);
    const SphereGrid& gr = *g;

    TimeSampledVectorField Xz;
    std::vector<double> zc(static_cast<size_t>(gr.nodes()), 0.0);
    Xz.add_sample(0.0, gr, zc, zc);
    Xz.add_sample(1.0, gr, zc, zc);
    Xz.finalize();
    FlowMap fz = flow_integrate(Xz, g, {0.0, 0.5, 1.0});
    double idev = 0.0;
    for (const auto& snapshot : fz.states)
        for (int i = 0; i < gr.nlat; ++i)
            for (int j = 0; j < gr.nlon; ++j)
                idev = std::max(idev, state_distance(snapshot[static_cast<size_t>(i) * gr.nlon + j],
                                                     frame_seed(gr.theta[i], gr.phi[j])));
    report("X = 0: identity map and frames", idev, 1e-14);

    // Rotation generator about z: components (0, sin θ) in the (ê_θ, ê_φ) frame.
    TimeSampledVectorField Xr;
    std::vector<double> ct(static_cast<size_t>(gr.nodes()), 0.0), cp(static_cast<size_t>(gr.nodes()));
    for (int i = 0; i < gr.nlat; ++i)
        for (int j = 0; j < gr.nlon; ++j) cp[static_cast<size_t>(i) * gr.nlon + j] = gr.sin_theta[i];
    Xr.add_sample(0.0, gr, ct, cp);
    Xr.add_sample(1.0, gr, ct, cp);
    Xr.finalize();
    FlowMap fr = flow_integrate(Xr, g, {0.0, 0.5, 1.0});
    double rot_dev = 0.0, orth_dev = 0.0, unit_dev = 0.0;
    for (size_t snap = 0; snap < fr.states.size(); ++snap) {
        double ca = std::cos(fr.times[snap]), sa = std::sin(fr.times[snap]);
        for (int i = 0; i < gr.nlat; ++i)
            for (int j = 0; j < gr.nlon; ++j) {
                FlowState want = frame_seed(gr.theta[i], gr.phi[j]);
                auto rot = [&](std::array<double, 3> v) {
                    return std::array<double, 3>{ca * v[0] - sa * v[1], sa * v[0] + ca * v[1], v[2]};
                };
                want.p = rot(want.p);
                want.v1 = rot(want.v1);
                want.v2 = rot(want.v2);
                const FlowState& got = fr.states[snap][static_cast<size_t>(i) * gr.nlon + j];
                rot_dev = std::max(rot_dev, state_distance(got, want));
                auto dot = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
                    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
                };
                orth_dev = std::max({orth_dev, std::abs(dot(got.v1, got.v1) - 1.0),
                                     std::abs(dot(got.v2, got.v2) - 1.0), std::abs(dot(got.v1, got.v2))});
                unit_dev = std::max(unit_dev, std::abs(dot(got.p, got.p) - 1.0));
            }
    }
    report("rotation field: rigid rotation", rot_dev, 1e-8);
    report("rotation field: orthogonal Jacobian", orth_dev, 1e-8);
    report("positions unit-norm", unit_dev, 1e-10);

    // Reverse composition: flow X(t) = sin(πt)∇*f forward, then -X(1-τ) from
    // the image points; the composition must return to the identity.
    Coeffs af = random_coeffs(6, 42, 0.3);
    std::vector<double> gt, gp;
    synth_gradient(gr, af, gt, gp);
    std::vector<double> nodes = cgl_nodes(12);
    TimeSampledVectorField Xf;
    for (double t : nodes) {
        double amp = std::sin(M_PI * t);
        std::vector<double> st(gt.size()), sp(gt.size());
        for (size_t k = 0; k < gt.size(); ++k) {
            st[k] = amp * gt[k];
            sp[k] = amp * gp[k];
        }
        Xf.add_sample(t, gr, st, sp);
    }
    Xf.finalize();
    FlowMap fwd = flow_integrate(Xf, g, nodes);

    TimeSampledVectorField Xb;
    Xb.L = Xf.L;
    for (size_t j = 0; j < nodes.size(); ++j) {
        size_t src = nodes.size() - 1 - j;
        Xb.times.push_back(1.0 - Xf.times[src]);
        std::array<Coeffs, 3> neg = Xf.cart[src];
        for (int d = 0; d < 3; ++d)
            for (double& cc : neg[d].c) cc = -cc;
        Xb.cart.push_back(neg);
    }
    Xb.finalize();
    FlowMap rev = flow_integrate(Xb, fwd.states.back(), g, nodes);
    double comp_dev = 0.0;
    for (int i = 0; i < gr.nlat; ++i)
        for (int j = 0; j < gr.nlon; ++j)
            comp_dev = std::max(comp_dev, state_distance(rev.states.back()[static_cast<size_t>(i) * gr.nlon + j],
                                                         frame_seed(gr.theta[i], gr.phi[j])));
    report("reverse composition = identity", comp_dev, 1e-6);

    CHECK_THROWS_AS(flow_integrate(Xr, g, {0.0, 1.0}, 1e-12), numeric_error);
}

TEST_CASE("path to round: trivial conformal factors") {
    std::printf("--- Path: trivial factors ---\n");

    MetricPath p0 = build_path(ConformalMetric(Coeffs(8)), default_zeta(1), 16);
    double ga = 0.0, gdev = 0.0, ldev = 0.0, udev = 0.0;
    for (int k = 0; k < 16; ++k) {
        ga = std::max(ga, std::abs(p0.gauge_a[k]));
        ldev = std::max(ldev, std::abs(p0.lambda[k] - 1.0));
        for (const auto& comp : p0.g[k])
            gdev = std::max({gdev, std::abs(comp[0] - 1.0), std::abs(comp[1]), std::abs(comp[2] - 1.0)});
        for (double uv : p0.u[k]) udev = std::max(udev, std::abs(uv - 1.0 / std::sqrt(kFourPi)));
    }
    report("round: gauge a = 0", ga, 1e-15);
    report("round: g(t) = g*", gdev, 1e-12);
    report("round: lambda = 1", ldev, 1e-9);
    report("round: u = (4pi)^{-1/2}", udev, 1e-8);
    report("round: area-form deviation", p0.max_area_form_dev, 1e-12);
    report("round: eigen gap - 2", std::abs(p0.min_eigen_gap - 2.0), 1e-6);
    std::vector<double> K0 = zonal_curvature_from_samples(p0, 15);
    double kdev = 0.0;
    for (double kv : K0) kdev = std::max(kdev, std::abs(kv - 1.0));
    report("round: sampled curvature = 1", kdev, 1e-10);
    report("round: pullback Rayleigh = 1", std::abs(p0.rayleigh_pullback(8) - 1.0), 1e-10);

    const double c = 0.3;
    MetricPath pc = build_path(ConformalMetric(constant_w(8, c)), default_zeta(1), 16);
    double gdevc = 0.0, ldevc = 0.0;
    for (int k = 0; k < 16; ++k) {
        ldevc = std::max(ldevc, std::abs(pc.lambda[k] - std::exp(-2.0 * c)));
        for (const auto& comp : pc.g[k])
            gdevc = std::max({gdevc, std::abs(comp[0] - std::exp(2.0 * c)), std::abs(comp[1]),
                              std::abs(comp[2] - std::exp(2.0 * c))});
    }
    report("constant w: g(t) = e^{2c} g*", gdevc, 1e-12);
    report("constant w: lambda = e^{-2c}", ldevc, 1e-9);
    report("constant w: area", std::abs(pc.area - kFourPi * std::exp(2.0 * c)), 1e-10);
}

TEST_CASE("path to round: half-cosine geometry at L = 32") {
    std::printf("--- Path: w = 0.5 cos theta ---\n");
    ConformalMetric g0(half_cos_w(32));
    MetricPath path = build_path(g0, default_zeta(1), 64);
    const double round_lambda = kFourPi / path.area;

    report("area-form constancy", path.max_area_form_dev, 1e-4);

    double g0dev = 0.0;
    const SphereGrid& bg = *path.grid;
    for (int i = 0; i < bg.nlat; ++i)
        for (int j = 0; j < bg.nlon; ++j) {
            size_t n = static_cast<size_t>(i) * bg.nlon + j;
            double e2w = std::exp(2.0 * g0.w_base()[n]);
            const auto& comp = path.g[0][n];
            g0dev = std::max({g0dev, std::abs(comp[0] - e2w), std::abs(comp[1]),
                              std::abs(comp[2] - e2w)});
        }
    report("g(0) = e^{2w} g*", g0dev, 1e-6);

    CHECK(path.min_lambda > 0.0);
    report("lambda(0) matches direct solve", std::abs(path.lambda[0] - first_eigenpair(g0).lambda), 1e-12);
    report("tail lambda = 4pi/area", std::abs(path.lambda.back() - round_lambda), 1e-9);
    report("frozen tail metric drift", path.max_frozen_drift, 1e-8);

    double kdev = 0.0, u_tail_dev = 0.0;
    int first_tail = -1;
    for (int k = 0; k < 64; ++k) {
        if (path.times[k] < 0.5) continue;
        if (first_tail < 0) first_tail = k;
        for (double kv : zonal_curvature_from_samples(path, k))
            kdev = std::max(kdev, std::abs(kv - round_lambda));
        for (size_t n = 0; n < path.u[k].size(); ++n)
            u_tail_dev = std::max(u_tail_dev, std::abs(path.u[k][n] - path.u[first_tail][n]));
    }
    report("tail curvature = 4pi/area", kdev, 1e-4);
    report("tail eigenfunction constant", u_tail_dev, 1e-8);

    double ray_dev = 0.0;
    for (int k : {0, 16, 28, 40, 63})
        ray_dev = std::max(ray_dev, std::abs(path.rayleigh_pullback(k) - path.lambda[k]));
    report("pullback Rayleigh = lambda(t)", ray_dev, 1e-6);

    double norm_dev = 0.0;
    for (int k : {0, 16, 28, 40, 63}) {
        double s = 0.0;
        for (int i = 0; i < bg.nlat; ++i)
            for (int j = 0; j < bg.nlon; ++j) {
                size_t n = static_cast<size_t>(i) * bg.nlon + j;
                const auto& comp = path.g[k][n];
                s += bg.weight(i) * std::sqrt(comp[0] * comp[2] - comp[1] * comp[1]) *
                     path.u[k][n] * path.u[k][n];
            }
        norm_dev = std::max(norm_dev, std::abs(s - 1.0));
    }
    report("carried u normalized in g(t)", norm_dev, 1e-6);

    EigenContinuity cont = eigen_along_path(path);
    report("lambda jump between nodes", cont.max_lambda_jump, 1e-3);
    report("u rate (reported C)", cont.max_u_rate, 50.0);
    CHECK(cont.min_gap > 1.0);

    double unit_dev = 0.0;
    for (const auto& snapshot : path.flow.states)
        for (const FlowState& s : snapshot)
            unit_dev = std::max(unit_dev,
                                std::abs(s.p[0] * s.p[0] + s.p[1] * s.p[1] + s.p[2] * s.p[2] - 1.0));
    report("flow positions unit-norm", unit_dev, 1e-10);
}

TEST_CASE("path to round: non-zonal metric") {
    std::printf("--- Path: non-zonal w ---\n");
    // Band-limit-8 conformal factor solved at L = 16: the path invariants are
    // resolution statements, so the solve bandlimit over-resolves the metric.
    Coeffs w = bounded_gradient_w(8, 204, 0.2).resized(16);
    ConformalMetric g0(w);
    MetricPath path = build_path(g0, default_zeta(1), 64);

    report("area-form constancy", path.max_area_form_dev, 1e-4);
    CHECK(path.min_lambda > 0.0);

    double g0dev = 0.0;
    for (size_t n = 0; n < path.g[0].size(); ++n) {
        double e2w = std::exp(2.0 * g0.w_base()[n]);
        const auto& comp = path.g[0][n];
        g0dev = std::max({g0dev, std::abs(comp[0] - e2w), std::abs(comp[1]), std::abs(comp[2] - e2w)});
    }
    report("g(0) = e^{2w} g*", g0dev, 1e-6);
    report("frozen tail metric drift", path.max_frozen_drift, 1e-8);
    report("tail lambda = 4pi/area", std::abs(path.lambda.back() - kFourPi / path.area), 1e-9);

    double ray_dev = 0.0;
    for (int k : {0, 30, 63})
        ray_dev = std::max(ray_dev, std::abs(path.rayleigh_pullback(k) - path.lambda[k]));
    report("pullback Rayleigh = lambda(t)", ray_dev, 1e-6);

    EigenContinuity cont = eigen_along_path(path);
    report("lambda jump between nodes", cont.max_lambda_jump, 1e-3);
}
