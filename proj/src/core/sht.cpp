/// @file sht.cpp
/// @brief Grids, normalized associated-Legendre recurrences, and transforms.

#include "core/sht.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <stdexcept>

#include "core/errors.hpp"

namespace horizon {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    // Newton iteration on P_n with the standard Chebyshev-like initial guess.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;  // ascending in x
        x[n - 1 - i] = z;
        double wi = 2.0 / ((1.0 - z * z) * pp * pp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
}

SphereGrid::SphereGrid(int bandlimit) : L(bandlimit) {
    if (L < 1) throw input_error("SphereGrid: bandlimit must be >= 1");
    nlat = L + 1;
    nlon = 2 * L + 1;

    std::vector<double> xs, ws;
    gauss_legendre(nlat, xs, ws);
    theta.resize(nlat);
    x.resize(nlat);
    sin_theta.resize(nlat);
    glw.resize(nlat);
    // Colatitude increases with ring index, so x = cosθ descends.
    for (int i = 0; i < nlat; ++i) {
        double xi = xs[nlat - 1 - i];
        x[i] = xi;
        theta[i] = std::acos(xi);
        sin_theta[i] = std::sqrt(std::max(0.0, 1.0 - xi * xi));
        glw[i] = ws[nlat - 1 - i];
    }
    phi.resize(nlon);
    for (int j = 0; j < nlon; ++j) phi[j] = 2.0 * M_PI * j / nlon;

    cos_mphi.resize(static_cast<size_t>(L + 1) * nlon);
    sin_mphi.resize(static_cast<size_t>(L + 1) * nlon);
    for (int m = 0; m <= L; ++m)
        for (int j = 0; j < nlon; ++j) {
            cos_mphi[static_cast<size_t>(m) * nlon + j] = std::cos(m * phi[j]);
            sin_mphi[static_cast<size_t>(m) * nlon + j] = std::sin(m * phi[j]);
        }
}

GridPtr make_grid(int L) {
    // Grids are immutable and reused heavily; cache by bandlimit (single-threaded library).
    static std::map<int, std::weak_ptr<const SphereGrid>> cache;
    auto& slot = cache[L];
    if (auto g = slot.lock()) return g;
    auto g = std::make_shared<const SphereGrid>(L);
    slot = g;
    return g;
}

Coeffs Coeffs::resized(int Lnew) const {
    Coeffs out(Lnew);
    int Lc = std::min(L, Lnew);
    for (int l = 0; l <= Lc; ++l)
        for (int m = -l; m <= l; ++m) out.at(l, m) = at(l, m);
    return out;
}

void LegendreWorkspace::resize(int bandlimit) {
    if (L == bandlimit) return;
    L = bandlimit;
    size_t n = static_cast<size_t>(L + 1) * (L + 2) / 2;
    P.assign(n, 0.0);
    Q.assign(n, 0.0);
    dP.assign(n, 0.0);
}

void legendre_columns(int L, double x, double s, LegendreWorkspace& ws) {
    ws.resize(L);
    double* P = ws.P.data();
    double* Q = ws.Q.data();
    double* dP = ws.dP.data();

    // Pbar columns (stable upward recurrences; near-pole underflow is benign).
    for (int m = 0; m <= L; ++m) {
        int o = ws.off(m);
        if (m == 0) {
            P[o] = std::sqrt(0.5);
        } else {
            double r = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
            P[o] = r * s * P[ws.idx(m - 1, m - 1)];
        }
        if (m + 1 <= L) P[o + 1] = std::sqrt(2.0 * m + 3.0) * x * P[o];
        for (int l = m + 2; l <= L; ++l) {
            double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
            double b = std::sqrt(((static_cast<double>(l - 1) * (l - 1)) - static_cast<double>(m) * m) /
                                 (4.0 * static_cast<double>(l - 1) * (l - 1) - 1.0));
            P[o + (l - m)] = a * (x * P[o + (l - 1 - m)] - b * P[o + (l - 2 - m)]);
        }
    }

    // Q = Pbar/sinθ for m >= 1: same recurrences with one fewer factor of sinθ.
    for (int m = 1; m <= L; ++m) {
        int o = ws.off(m);
        if (m == 1) {
            Q[o] = std::sqrt(1.5) * P[ws.idx(0, 0)];  // Pbar_{1,1}/sinθ = √(3)/2
        } else {
            double r = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
            Q[o] = r * s * Q[ws.idx(m - 1, m - 1)];
        }
        if (m + 1 <= L) Q[o + 1] = std::sqrt(2.0 * m + 3.0) * x * Q[o];
        for (int l = m + 2; l <= L; ++l) {
            double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
            double b = std::sqrt(((static_cast<double>(l - 1) * (l - 1)) - static_cast<double>(m) * m) /
                                 (4.0 * static_cast<double>(l - 1) * (l - 1) - 1.0));
            Q[o + (l - m)] = a * (x * Q[o + (l - 1 - m)] - b * Q[o + (l - 2 - m)]);
        }
    }
    for (int l = 0; l <= L; ++l) ws.Q[ws.idx(l, 0)] = 0.0;

    // dPbar/dθ via the ladder identity (pole-safe: no 1/sinθ).
    for (int l = 0; l <= L; ++l) dP[ws.idx(l, 0)] = (l >= 1) ? -std::sqrt(static_cast<double>(l) * (l + 1)) * P[ws.idx(l, 1)] : 0.0;
    for (int m = 1; m <= L; ++m)
        for (int l = m; l <= L; ++l) {
            double t = std::sqrt(static_cast<double>(l + m) * (l - m + 1)) * P[ws.idx(l, m - 1)];
            if (m + 1 <= l) t -= std::sqrt(static_cast<double>(l - m) * (l + m + 1)) * P[ws.idx(l, m + 1)];
            dP[ws.idx(l, m)] = 0.5 * t;
        }
}

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/√(2π)
constexpr double kInvSqrtPi = 0.5641895835477562869;   // 1/√π

void fourier_stage(const SphereGrid& g, const std::vector<double>& v, int L,
                   std::vector<double>& Fc, std::vector<double>& Fs) {
    Fc.assign(static_cast<size_t>(g.nlat) * (L + 1), 0.0);
    Fs.assign(static_cast<size_t>(g.nlat) * (L + 1), 0.0);
    for (int i = 0; i < g.nlat; ++i) {
        const double* row = v.data() + static_cast<size_t>(i) * g.nlon;
        for (int m = 0; m <= L; ++m) {
            const double* cm = g.cos_mphi.data() + static_cast<size_t>(m) * g.nlon;
            const double* sm = g.sin_mphi.data() + static_cast<size_t>(m) * g.nlon;
            double ac = 0.0, as = 0.0;
            for (int j = 0; j < g.nlon; ++j) {
                ac += row[j] * cm[j];
                as += row[j] * sm[j];
            }
            Fc[static_cast<size_t>(i) * (L + 1) + m] = ac;
            Fs[static_cast<size_t>(i) * (L + 1) + m] = as;
        }
    }
}
} // namespace

Coeffs sht_analyze(const SphereGrid& g, const std::vector<double>& values, int L) {
    if (L > g.L) throw input_error("sht_analyze: requested bandlimit exceeds grid bandlimit");
    if (values.size() != static_cast<size_t>(g.nodes()))
        throw input_error("sht_analyze: value array does not match grid");
    for (double v : values)
        if (!std::isfinite(v)) throw input_error("sht_analyze: non-finite input value");

    std::vector<double> Fc, Fs;
    fourier_stage(g, values, L, Fc, Fs);

    Coeffs out(L);
    LegendreWorkspace ws;
    for (int i = 0; i < g.nlat; ++i) {
        legendre_columns(L, g.x[i], g.sin_theta[i], ws);
        double wq = g.weight(i);
        const double* fc = Fc.data() + static_cast<size_t>(i) * (L + 1);
        const double* fs = Fs.data() + static_cast<size_t>(i) * (L + 1);
        for (int m = 0; m <= L; ++m) {
            double norm = (m == 0) ? kInvSqrt2Pi : kInvSqrtPi;
            double gc = wq * norm * fc[m];
            double gs = wq * norm * fs[m];
            const double* Pcol = ws.P.data() + ws.off(m);
            for (int l = m; l <= L; ++l) {
                out.at(l, m) += gc * Pcol[l - m];
                if (m > 0) out.at(l, -m) += gs * Pcol[l - m];
            }
        }
    }
    return out;
}

std::vector<double> sht_synthesize(const SphereGrid& g, const Coeffs& a) {
    int L = a.L;
    std::vector<double> out(static_cast<size_t>(g.nodes()), 0.0);
    int Leff = std::min(L, g.L);  // modes beyond the grid's bandlimit cannot be represented
    if (L > g.L) throw input_error("sht_synthesize: coefficient bandlimit exceeds grid bandlimit");
    LegendreWorkspace ws;
    std::vector<double> Gc(Leff + 1), Gs(Leff + 1);
    for (int i = 0; i < g.nlat; ++i) {
        legendre_columns(Leff, g.x[i], g.sin_theta[i], ws);
        for (int m = 0; m <= Leff; ++m) {
            double norm = (m == 0) ? kInvSqrt2Pi : kInvSqrtPi;
            const double* Pcol = ws.P.data() + ws.off(m);
            double gc = 0.0, gs = 0.0;
            for (int l = m; l <= Leff; ++l) {
                gc += a.at(l, m) * Pcol[l - m];
                if (m > 0) gs += a.at(l, -m) * Pcol[l - m];
            }
            Gc[m] = norm * gc;
            Gs[m] = norm * gs;
        }
        double* row = out.data() + static_cast<size_t>(i) * g.nlon;
        for (int m = 0; m <= Leff; ++m) {
            const double* cm = g.cos_mphi.data() + static_cast<size_t>(m) * g.nlon;
            const double* sm = g.sin_mphi.data() + static_cast<size_t>(m) * g.nlon;
            if (m == 0) {
                for (int j = 0; j < g.nlon; ++j) row[j] += Gc[0];
            } else {
                for (int j = 0; j < g.nlon; ++j) row[j] += Gc[m] * cm[j] + Gs[m] * sm[j];
            }
        }
    }
    return out;
}

PointSample synth_point(const Coeffs& a, double theta, double phi, LegendreWorkspace& ws) {
    const Coeffs* sets[1] = {&a};
    PointSample out[1];
    synth_point_multi(sets, 1, theta, phi, ws, out);
    return out[0];
}

void synth_point_multi(const Coeffs* const* sets, int k, double theta, double phi,
                       LegendreWorkspace& ws, PointSample* out) {
    int L = 0;
    for (int s = 0; s < k; ++s) L = std::max(L, sets[s]->L);
    const double eps = 1e-12;
    theta = std::clamp(theta, eps, M_PI - eps);
    double x = std::cos(theta), sn = std::sin(theta);
    legendre_columns(L, x, sn, ws);

    for (int s = 0; s < k; ++s) out[s] = PointSample{};

    // Trig recurrence over m.
    double cphi = std::cos(phi), sphi = std::sin(phi);
    double cm = 1.0, sm = 0.0;  // cos(mφ), sin(mφ) with m = 0
    for (int m = 0; m <= L; ++m) {
        if (m > 0) {
            double cn = cm * cphi - sm * sphi;
            double snw = sm * cphi + cm * sphi;
            cm = cn;
            sm = snw;
        }
        double norm = (m == 0) ? kInvSqrt2Pi : kInvSqrtPi;
        const double* Pcol = ws.P.data() + ws.off(m);
        const double* Qcol = ws.Q.data() + ws.off(m);
        const double* Dcol = ws.dP.data() + ws.off(m);
        for (int s = 0; s < k; ++s) {
            const Coeffs& a = *sets[s];
            if (m > a.L) continue;
            double vc = 0.0, vs = 0.0, dc = 0.0, ds = 0.0, qc = 0.0, qs = 0.0;
            for (int l = m; l <= a.L; ++l) {
                double ccos = a.at(l, m);
                vc += ccos * Pcol[l - m];
                dc += ccos * Dcol[l - m];
                if (m > 0) {
                    double csin = a.at(l, -m);
                    vs += csin * Pcol[l - m];
                    ds += csin * Dcol[l - m];
                    qc += ccos * Qcol[l - m];
                    qs += csin * Qcol[l - m];
                }
            }
            out[s].value += norm * (vc * cm + vs * sm);
            out[s].dtheta += norm * (dc * cm + ds * sm);
            if (m > 0) out[s].dphi_over_sin += norm * m * (-qc * sm + qs * cm);
        }
    }
}

bool is_zonal(const Coeffs& a, double rel_tol) {
    double scale = 1.0, offdiag = 0.0;
    for (int l = 0; l <= a.L; ++l) {
        scale = std::max(scale, std::abs(a.at(l, 0)));
        for (int m = 1; m <= l; ++m)
            offdiag = std::max({offdiag, std::abs(a.at(l, m)), std::abs(a.at(l, -m))});
    }
    return offdiag <= rel_tol * scale;
}

Coeffs laplacian_coeffs(const Coeffs& a) {
    Coeffs out = a;
    for (int l = 0; l <= a.L; ++l) {
        double ev = -static_cast<double>(l) * (l + 1);
        for (int m = -l; m <= l; ++m) out.at(l, m) *= ev;
    }
    return out;
}

void synth_gradient(const SphereGrid& g, const Coeffs& a,
                    std::vector<double>& comp_theta, std::vector<double>& comp_phi) {
    int L = a.L;
    if (L > g.L) throw input_error("synth_gradient: coefficient bandlimit exceeds grid bandlimit");
    comp_theta.assign(static_cast<size_t>(g.nodes()), 0.0);
    comp_phi.assign(static_cast<size_t>(g.nodes()), 0.0);
    LegendreWorkspace ws;
    std::vector<double> Dc(L + 1), Ds(L + 1), Ac(L + 1), As(L + 1);
    for (int i = 0; i < g.nlat; ++i) {
        legendre_columns(L, g.x[i], g.sin_theta[i], ws);
        for (int m = 0; m <= L; ++m) {
            double norm = (m == 0) ? kInvSqrt2Pi : kInvSqrtPi;
            const double* Dcol = ws.dP.data() + ws.off(m);
            const double* Qcol = ws.Q.data() + ws.off(m);
            double dc = 0.0, ds = 0.0, ac = 0.0, as = 0.0;
            for (int l = m; l <= L; ++l) {
                dc += a.at(l, m) * Dcol[l - m];
                if (m > 0) {
                    ds += a.at(l, -m) * Dcol[l - m];
                    ac += a.at(l, m) * Qcol[l - m];
                    as += a.at(l, -m) * Qcol[l - m];
                }
            }
            Dc[m] = norm * dc;
            Ds[m] = norm * ds;
            Ac[m] = norm * m * ac;
            As[m] = norm * m * as;
        }
        double* rt = comp_theta.data() + static_cast<size_t>(i) * g.nlon;
        double* rp = comp_phi.data() + static_cast<size_t>(i) * g.nlon;
        for (int m = 0; m <= L; ++m) {
            const double* cmj = g.cos_mphi.data() + static_cast<size_t>(m) * g.nlon;
            const double* smj = g.sin_mphi.data() + static_cast<size_t>(m) * g.nlon;
            if (m == 0) {
                for (int j = 0; j < g.nlon; ++j) rt[j] += Dc[0];
            } else {
                for (int j = 0; j < g.nlon; ++j) {
                    rt[j] += Dc[m] * cmj[j] + Ds[m] * smj[j];
                    rp[j] += -Ac[m] * smj[j] + As[m] * cmj[j];
                }
            }
        }
    }
}

Coeffs weak_divergence(const SphereGrid& g, const std::vector<double>& comp_theta,
                       const std::vector<double>& comp_phi, int L) {
    if (L > g.L) throw input_error("weak_divergence: requested bandlimit exceeds grid bandlimit");
    std::vector<double> FAc, FAs, FBc, FBs;
    fourier_stage(g, comp_theta, L, FAc, FAs);
    fourier_stage(g, comp_phi, L, FBc, FBs);

    Coeffs out(L);
    LegendreWorkspace ws;
    for (int i = 0; i < g.nlat; ++i) {
        legendre_columns(L, g.x[i], g.sin_theta[i], ws);
        double wq = g.weight(i);
        const double* fac = FAc.data() + static_cast<size_t>(i) * (L + 1);
        const double* fas = FAs.data() + static_cast<size_t>(i) * (L + 1);
        const double* fbc = FBc.data() + static_cast<size_t>(i) * (L + 1);
        const double* fbs = FBs.data() + static_cast<size_t>(i) * (L + 1);
        for (int m = 0; m <= L; ++m) {
            double norm = (m == 0) ? kInvSqrt2Pi : kInvSqrtPi;
            const double* Dcol = ws.dP.data() + ws.off(m);
            const double* Qcol = ws.Q.data() + ws.off(m);
            for (int l = m; l <= L; ++l) {
                // -∫ <∇Y_I, X>: cos harmonics pick (Aθ·dP·cos - Aφ·mQ·sin),
                // sin harmonics pick (Aθ·dP·sin + Aφ·mQ·cos).
                out.at(l, m) -= wq * norm * (Dcol[l - m] * fac[m] - m * Qcol[l - m] * fbs[m]);
                if (m > 0) out.at(l, -m) -= wq * norm * (Dcol[l - m] * fas[m] + m * Qcol[l - m] * fbc[m]);
            }
        }
    }
    return out;
}

} // namespace horizon
