/// @file zoo.cpp
/// @brief Implementation of the certified zoo constructions.

#include "core/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "core/errors.hpp"
#include "core/stability.hpp"

namespace horizon {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_finite(const Coeffs& a, const char* who) {
    for (double x : a.c)
        if (!std::isfinite(x))
            throw input_error(std::string(who) + ": non-finite coefficient");
}

/// ca·a + cb·b zero-padded to bandlimit L.
Coeffs axpby(double ca, const Coeffs& a, double cb, const Coeffs& b, int L) {
    Coeffs ra = a.resized(L), rb = b.resized(L);
    Coeffs r(L);
    for (std::size_t k = 0; k < r.c.size(); ++k)
        r.c[k] = ca * ra.c[k] + cb * rb.c[k];
    return r;
}

bool is_zero(const Coeffs& a) {
    for (double x : a.c)
        if (x != 0.0) return false;
    return true;
}

/// Q_v φ = −Δ*φ − |∇*(φ−v)|² + 1 sampled on the grid, together with
/// |∇*(φ−v)| (the uniform-margin route reuses the same gradient).
struct QSamples {
    GridPtr grid;
    std::vector<double> q;
    std::vector<double> grad_pv;  ///< |∇*(φ−v)| per node
};

QSamples q_samples(const Coeffs& v, const Coeffs& phi, int L) {
    QSamples s;
    s.grid = make_grid(2 * L + 8);
    Coeffs pL = phi.resized(L);
    std::vector<double> lap_phi =
        sht_synthesize(*s.grid, laplacian_coeffs(pL));
    Coeffs pv = axpby(1.0, phi, -1.0, v, L);
    std::vector<double> gt, gp;
    synth_gradient(*s.grid, pv, gt, gp);
    s.q.resize(lap_phi.size());
    s.grad_pv.resize(lap_phi.size());
    for (std::size_t i = 0; i < s.q.size(); ++i) {
        s.grad_pv[i] = std::sqrt(gt[i] * gt[i] + gp[i] * gp[i]);
        s.q[i] = -lap_phi[i] - s.grad_pv[i] * s.grad_pv[i] + 1.0;
    }
    return s;
}

/// Certificate field for the base factor: φ = 0 for the round metric
/// (Q_0 0 ≡ 1), otherwise φ = log u + v from the first eigenpair.
Coeffs base_certificate(const Coeffs& v) {
    if (v.L < 0 || is_zero(v)) return Coeffs(0);
    ConformalMetric gv(v);
    MembershipCertificate mc = certificate_from_eigenpair(gv);
    return sh_analyze(mc.phi);
}

/// Exact round area of {θ ∈ [π/3, 2π/3] : cos(nθ) ≥ 1/2}: the set is a
/// finite union of θ-intervals [(6k−1)π/3n, (6k+1)π/3n], and each piece
/// contributes 2π(cos a − cos b).
double mu_exact(int n) {
    const double lo = kPi / 3.0, hi = 2.0 * kPi / 3.0;
    double mu = 0.0;
    for (int k = 0;; ++k) {
        double a = (6.0 * k - 1.0) * kPi / (3.0 * n);
        double b = (6.0 * k + 1.0) * kPi / (3.0 * n);
        if (a > hi) break;
        double x = std::max(a, lo), y = std::min(b, hi);
        if (x < y) mu += 2.0 * kPi * (std::cos(x) - std::cos(y));
    }
    return mu;
}

/// One zonal sample of G(θ) = 1 − Δ*v − α sin(nθ) cot θ.
double lambda_integrand(const Coeffs& lap_v, double alpha, int n, double theta,
                        LegendreWorkspace& ws) {
    double lap = lap_v.L >= 0 && !lap_v.c.empty()
                     ? synth_point(lap_v, theta, 0.0, ws).value
                     : 0.0;
    return 1.0 - lap -
           alpha * std::sin(n * theta) * std::cos(theta) / std::sin(theta);
}

/// sup over D = [π/3, 2π/3] of G, by dense scan plus parabolic refinement
/// of interior local maxima (zonal v), or a grid-node sup otherwise.
double lambda_sup(const Coeffs& v, double alpha, int n) {
    const double lo = kPi / 3.0, hi = 2.0 * kPi / 3.0;
    if (v.L < 0 || is_zonal(v)) {
        Coeffs lap_v = v.L >= 0 ? laplacian_coeffs(v) : Coeffs(0);
        LegendreWorkspace ws;
        int N = 200 * std::max(n, std::max(v.L, 1)) + 4001;
        std::vector<double> g(N);
        double best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < N; ++i) {
            double th = lo + (hi - lo) * i / (N - 1);
            g[i] = lambda_integrand(lap_v, alpha, n, th, ws);
            best = std::max(best, g[i]);
        }
        for (int i = 1; i + 1 < N; ++i) {
            if (g[i] < g[i - 1] || g[i] < g[i + 1]) continue;
            double d = 0.5 * (g[i + 1] - g[i - 1]);
            double c2 = g[i + 1] - 2.0 * g[i] + g[i - 1];
            if (c2 < 0.0) best = std::max(best, g[i] - d * d / (2.0 * c2));
        }
        return best;
    }
    int L = 2 * std::max(v.L, n) + 8;
    auto grid = make_grid(L);
    std::vector<double> lap = sht_synthesize(*grid, laplacian_coeffs(v));
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid->nlat; ++i) {
        double th = grid->theta[i];
        if (th < lo || th > hi) continue;
        double zonal =
            alpha * std::sin(n * th) * grid->x[i] / grid->sin_theta[i];
        for (int j = 0; j < grid->nlon; ++j)
            best = std::max(best, 1.0 - lap[grid->node(i, j)] - zonal);
    }
    return best;
}

/// Signed curvature density on the round measure, zonal case:
/// F(θ) = 1 − Δ*w(θ), with (K)± dA_g = (F)± dA*.
struct ZonalDensity {
    Coeffs lap_w;
    mutable LegendreWorkspace ws;
    double operator()(double theta) const {
        return 1.0 - synth_point(lap_w, theta, 0.0, ws).value;
    }
};

/// ∫(F)₊ dA* and ∫(F)₋ dA* by sign-panel decomposition: scan for sign
/// changes, bisect each root, and integrate 2π·F·sinθ with Gauss–Legendre
/// panels no wider than π/(L+1) so every panel is spectrally resolved.
void zonal_split_integrals(const Coeffs& w, double& pos, double& neg) {
    ZonalDensity F{laplacian_coeffs(w), {}};
    const int L = std::max(w.L, 1);

    int N = 32 * L + 1024;
    std::vector<double> roots;
    double t_prev = kPi * 0.5 / N, f_prev = F(t_prev);
    for (int i = 1; i < N; ++i) {
        double t = kPi * (i + 0.5) / N, f = F(t);
        if ((f_prev < 0.0) != (f < 0.0)) {
            double a = t_prev, b = t;
            for (int it = 0; it < 60; ++it) {
                double m = 0.5 * (a + b);
                if ((F(m) < 0.0) == (f_prev < 0.0))
                    a = m;
                else
                    b = m;
            }
            roots.push_back(0.5 * (a + b));
        }
        t_prev = t;
        f_prev = f;
    }

    std::vector<double> cuts;
    cuts.push_back(0.0);
    cuts.insert(cuts.end(), roots.begin(), roots.end());
    cuts.push_back(kPi);

    std::vector<double> gx, gw;
    gauss_legendre(24, gx, gw);
    const double max_width = kPi / (L + 1);
    pos = neg = 0.0;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        double a = cuts[p], b = cuts[p + 1];
        if (!(b > a)) continue;
        bool negative = F(0.5 * (a + b)) < 0.0;
        int sub = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
        double integral = 0.0;
        for (int s = 0; s < sub; ++s) {
            double sa = a + (b - a) * s / sub, sb = a + (b - a) * (s + 1) / sub;
            double half = 0.5 * (sb - sa), mid = 0.5 * (sa + sb);
            for (std::size_t q = 0; q < gx.size(); ++q) {
                double th = mid + half * gx[q];
                integral += half * gw[q] * F(th) * std::sin(th);
            }
        }
        integral *= 2.0 * kPi;
        if (negative)
            neg -= integral;
        else
            pos += integral;
    }
}

}  // namespace

Coeffs zonal_cos_profile(int n, int L) {
    if (n < 1) throw input_error("zonal_cos_profile: frequency must be >= 1");
    if (L < n)
        throw input_error(
            "zonal_cos_profile: bandlimit below the zonal frequency");
    auto grid = make_grid(L);
    std::vector<double> values(grid->nodes());
    for (int i = 0; i < grid->nlat; ++i) {
        double h = -std::cos(n * grid->theta[i]) / n;
        for (int j = 0; j < grid->nlon; ++j) values[grid->node(i, j)] = h;
    }
    return sht_analyze(*grid, values, L);
}

double openness_margin(const Coeffs& v, const Coeffs& w, const Coeffs& phi) {
    check_finite(v, "openness_margin");
    check_finite(w, "openness_margin");
    check_finite(phi, "openness_margin");
    int L = std::max({v.L, w.L, phi.L, 0});
    QSamples s = q_samples(v, phi, L);
    Coeffs diff = axpby(1.0, w, -1.0, v, L);
    Coeffs two_phi = axpby(2.0, phi, -1.0, w, L);
    for (std::size_t k = 0; k < two_phi.c.size(); ++k)
        two_phi.c[k] -= v.resized(L).c[k];
    std::vector<double> at, ap, bt, bp;
    synth_gradient(*s.grid, two_phi, at, ap);
    synth_gradient(*s.grid, diff, bt, bp);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.q.size(); ++i) {
        double ga = std::sqrt(at[i] * at[i] + ap[i] * ap[i]);
        double gb = std::sqrt(bt[i] * bt[i] + bp[i] * bp[i]);
        m = std::min(m, s.q[i] - ga * gb);
    }
    return m;
}

double openness_margin_uniform(const Coeffs& v, const Coeffs& phi,
                               double alpha) {
    if (!(alpha > 0.0))
        throw input_error("openness_margin_uniform: amplitude must be > 0");
    check_finite(v, "openness_margin_uniform");
    check_finite(phi, "openness_margin_uniform");
    int L = std::max({v.L, phi.L, 0});
    QSamples s = q_samples(v, phi, L);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s.q.size(); ++i)
        m = std::min(m, s.q[i] - (2.0 * s.grad_pv[i] + alpha) * alpha);
    return m;
}

ZooMetric zoo_metric(const ZooSpec& spec) {
    if (!(spec.alpha >= 0.0 && spec.alpha < 1.0))
        throw input_error("zoo_metric: amplitude must lie in [0,1)");
    if (spec.n < 1) throw input_error("zoo_metric: frequency must be >= 1");
    check_finite(spec.v, "zoo_metric");

    Coeffs phi = base_certificate(spec.v);
    int L = std::max(2 * spec.n + 16, std::max(spec.v.L, 0));

    if (spec.alpha == 0.0) {
        // Degenerate unperturbed case: the base metric itself, certified by
        // the plain Q minimum (the margin's perturbation term vanishes).
        Coeffs w = spec.v.resized(L);
        return ZooMetric{ConformalMetric(w), spec,
                         openness_margin(spec.v, spec.v, phi), 0};
    }

    double alpha = spec.alpha;
    double margin = 0.0;
    int shrinks = 0;
    for (;; ++shrinks) {
        margin = openness_margin_uniform(spec.v, phi, alpha);
        if (margin > 0.0) break;
        if (shrinks >= 20) {
            std::ostringstream os;
            os << "zoo_metric: amplitude underflow: margin " << margin
               << " still not positive after 20 halvings (alpha = " << alpha
               << ")";
            throw verify_error(os.str());
        }
        alpha *= 0.5;
    }

    Coeffs h = zonal_cos_profile(spec.n, L);
    Coeffs w = axpby(1.0, spec.v, alpha, h, L);

    ZooSpec used = spec;
    used.alpha = alpha;
    return ZooMetric{ConformalMetric(w), used, margin, shrinks};
}

NegativePartReport negative_part_report(const ZooMetric& zm) {
    NegativePartReport r;
    r.lambda1 = first_eigenpair(zm.g).lambda;

    const Coeffs& w = zm.g.w_coeffs();
    if (is_zonal(w)) {
        zonal_split_integrals(w, r.positive_integral, r.negative_integral);
    } else {
        r.negative_integral = zm.g.negative_curvature_integral();
        const auto& lap = zm.g.lap_w_fine();
        ScalarField fplus(zm.g.fine());
        for (std::size_t i = 0; i < fplus.size(); ++i)
            fplus.values[i] = std::max(1.0 - lap[i], 0.0);
        r.positive_integral = integrate_round(fplus);
    }

    const double alpha = zm.spec.alpha;
    const int n = zm.spec.n;
    r.mu = mu_exact(n);
    r.Lambda = lambda_sup(zm.spec.v, alpha, n);
    r.bound = r.mu * (0.5 * alpha * n - r.Lambda);
    r.c1_distance = alpha * (1.0 + 1.0 / n);
    return r;
}

NegativePartReport negative_part_report(const ZooSpec& spec) {
    return negative_part_report(zoo_metric(spec));
}

DensityResult density_demo(const Coeffs& v, double c, double alpha0) {
    if (!(c > 0.0)) throw input_error("density_demo: target must be positive");
    if (!(alpha0 > 0.0 && alpha0 < 1.0))
        throw input_error("density_demo: amplitude must lie in (0,1)");
    check_finite(v, "density_demo");

    Coeffs phi = base_certificate(v);
    double alpha = alpha0;
    double margin = 0.0;
    for (int k = 0;; ++k) {
        margin = openness_margin_uniform(v, phi, alpha);
        if (margin > 0.0) break;
        if (k >= 20)
            throw verify_error(
                "density_demo: amplitude underflow before certification");
        alpha *= 0.5;
    }

    for (int n = 8; n <= (1 << 22); n *= 2) {
        ZooSpec spec;
        spec.v = v;
        spec.alpha = alpha;
        spec.n = n;
        ZooMetric zm = zoo_metric(spec);
        NegativePartReport rep = negative_part_report(zm);
        if (rep.negative_integral >= c)
            return DensityResult{zm.spec, margin, rep.negative_integral,
                                 rep.c1_distance};
    }
    throw numeric_error("density_demo: target not reached within the frequency cap");
}

}  // namespace horizon
