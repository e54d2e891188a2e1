#include "core/croke.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "core/errors.hpp"

namespace horizon {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kSqrt3 = std::sqrt(3.0);

using C = std::complex<double>;

/// Coordinates of z in the lattice basis (w1, w2).
std::pair<double, double> lattice_coords(C z, C w1, C w2) {
    const double det = w1.real() * w2.imag() - w1.imag() * w2.real();
    const double a = (z.real() * w2.imag() - z.imag() * w2.real()) / det;
    const double b = (w1.real() * z.imag() - w1.imag() * z.real()) / det;
    return {a, b};
}

bool is_integer_pair(std::pair<double, double> ab, double tol = 1e-12) {
    return std::abs(ab.first - std::round(ab.first)) <= tol &&
           std::abs(ab.second - std::round(ab.second)) <= tol;
}

// --- normalized cap profile -------------------------------------------------
// psi'(u) = 1 on [0,u1], descends to 1/3 through a quintic smoothstep on
// [u1,u2], and equals 1/3 beyond; psi(0) = 0.  All integrals closed-form.

constexpr double kU1 = 0.5;
constexpr double kU2 = 0.875;
constexpr double kW = kU2 - kU1;
constexpr double kDrop = 2.0 / 3.0;  // slope drop 1 -> 1/3

double smoothstep5(double x) { return x * x * x * (10.0 + x * (-15.0 + 6.0 * x)); }
double smoothstep5_prime(double x) {
    const double y = x * (1.0 - x);
    return 30.0 * y * y;
}
/// ∫₀ˣ S = 2.5x⁴ − 3x⁵ + x⁶
double smoothstep5_int(double x) {
    const double x4 = x * x * x * x;
    return x4 * (2.5 + x * (-3.0 + x));
}
constexpr double kIntS1 = 0.5;        // ∫₀¹ S
constexpr double kIntIntS1 = 1.0 / 7; // ∫₀¹ ∫₀ˣ S

double psi_value(double u) {
    if (u <= kU1) return u;
    if (u <= kU2) {
        const double x = (u - kU1) / kW;
        return u - kDrop * kW * smoothstep5_int(x);
    }
    const double psi_u2 = kU1 + kW * (1.0 - kDrop * kIntS1);
    return psi_u2 + (u - kU2) / 3.0;
}
double psi_slope(double u) {
    if (u <= kU1) return 1.0;
    if (u <= kU2) return 1.0 - kDrop * smoothstep5((u - kU1) / kW);
    return 1.0 / 3.0;
}
double psi_second(double u) {
    if (u <= kU1 || u >= kU2) return 0.0;
    return -(kDrop / kW) * smoothstep5_prime((u - kU1) / kW);
}
double psi_at_one() { return psi_value(1.0); }
/// ∫₀¹ psi, assembled zone by zone.
double psi_integral() {
    const double psi_u2 = kU1 + kW * (1.0 - kDrop * kIntS1);
    const double zone1 = 0.5 * kU1 * kU1;
    const double zone2 = kU1 * kW + 0.5 * kW * kW - kDrop * kW * kW * kIntIntS1;
    const double tail = 1.0 - kU2;
    const double zone3 = psi_u2 * tail + tail * tail / 6.0;
    return zone1 + zone2 + zone3;
}

}  // namespace

// ---------------------------------------------------------------------------
// flat singular sphere

ConeSurface build_cone_surface() {
    ConeSurface s;
    const double r = 2.0 * kSqrt3;
    s.omega1 = std::polar(r, -kPi / 6.0);
    s.omega2 = std::polar(r, kPi / 6.0);
    for (int k = 0; k < 6; ++k) s.hexagon[k] = std::polar(2.0, k * kPi / 3.0);
    s.cone_points = {C(0.0, 0.0), C(2.0, 0.0), std::polar(2.0, kPi / 3.0)};

    const C rot = std::polar(1.0, 2.0 * kPi / 3.0);
    // the rotation must map the lattice to itself ...
    for (C w : {s.omega1, s.omega2})
        if (!is_integer_pair(lattice_coords(rot * w, s.omega1, s.omega2)))
            throw verify_error("rotation does not preserve the hexagonal lattice");
    // ... and fix each cone class (R p − p is a lattice vector)
    for (C p : s.cone_points)
        if (!is_integer_pair(lattice_coords(rot * p - p, s.omega1, s.omega2)))
            throw verify_error("rotation does not fix a cone class");

    const double torus_area =
        std::abs(s.omega1.real() * s.omega2.imag() - s.omega1.imag() * s.omega2.real());
    s.area = torus_area / 3.0;
    if (std::abs(s.area - 2.0 * kSqrt3) > 1e-12)
        throw verify_error("quotient area does not equal 2*sqrt(3)");
    return s;
}

double lattice_systole(C w1, C w2) {
    double best = std::abs(w1);
    for (int a = -4; a <= 4; ++a)
        for (int b = -4; b <= 4; ++b) {
            if (a == 0 && b == 0) continue;
            best = std::min(best, std::abs(double(a) * w1 + double(b) * w2));
        }
    return best;
}

int lattice_systole_multiplicity(C w1, C w2) {
    const double sys = lattice_systole(w1, w2);
    int count = 0;
    for (int a = -4; a <= 4; ++a)
        for (int b = -4; b <= 4; ++b) {
            if (a == 0 && b == 0) continue;
            if (std::abs(double(a) * w1 + double(b) * w2) <= sys * (1.0 + 1e-9)) ++count;
        }
    return count;
}

double cone_distance(const ConeSurface& s, int i, int j) {
    if (i < 0 || i > 2 || j < 0 || j > 2)
        throw input_error("cone index out of range");
    const C p = s.cone_points[i], q = s.cone_points[j];
    const C rot = std::polar(1.0, 2.0 * kPi / 3.0);
    double best = (i == j) ? 0.0 : std::abs(p - q);
    C rp = p;
    for (int k = 0; k < 3; ++k) {
        for (int a = -4; a <= 4; ++a)
            for (int b = -4; b <= 4; ++b) {
                const C d = rp + double(a) * s.omega1 + double(b) * s.omega2 - q;
                if (k == 0 && a == 0 && b == 0 && i == j) continue;
                best = std::min(best, std::abs(d));
            }
        rp *= rot;
    }
    return best;
}

// ---------------------------------------------------------------------------
// cap profile

double CapProfile::value(double rho) const {
    return radial_extent * psi_value(rho / radial_extent);
}
double CapProfile::slope(double rho) const { return psi_slope(rho / radial_extent); }
double CapProfile::second(double rho) const {
    return psi_second(rho / radial_extent) / radial_extent;
}
double CapProfile::gauss_curvature(double rho) const {
    if (rho <= 0.0) return 0.0;
    return -second(rho) / value(rho);
}
double CapProfile::turning(double rho) const {
    return std::acos(std::clamp(slope(rho), -1.0, 1.0));
}
double CapProfile::geodesic_curvature(double rho) const {
    if (!(rho > 0.0)) throw input_error("geodesic curvature needs rho > 0");
    return slope(rho) / value(rho);
}
double CapProfile::total_curvature() const {
    return 2.0 * kPi * (slope(0.0) - slope(radial_extent));
}
double CapProfile::area() const {
    return 2.0 * kPi * radial_extent * radial_extent * psi_integral();
}

CapProfile make_cap_profile(double r0) {
    if (!(r0 > 0.0) || !(r0 < 0.5))
        throw input_error("cap smoothing radius must lie in (0, 1/2)");
    CapProfile cap;
    cap.smoothing_radius = r0;
    cap.radial_extent = r0 / (3.0 * psi_at_one());
    cap.flat_zone_end = kU1 * cap.radial_extent;
    cap.cone_zone_start = kU2 * cap.radial_extent;
    return cap;
}

// ---------------------------------------------------------------------------
// geodesic shooting on the cap (for transition-zone edge lengths)

namespace {

struct ShotState {
    double rho, theta, chi;
};

ShotState integrate_geodesic(const CapProfile& cap, double rho0, double chi0,
                             double s_total) {
    auto deriv = [&cap](const ShotState& y) {
        const double phi = cap.value(y.rho);
        const double dphi = cap.slope(y.rho);
        const double sc = std::sin(y.chi);
        return ShotState{std::cos(y.chi), sc / phi, -dphi / phi * sc};
    };
    ShotState y{rho0, 0.0, chi0};
    const int n = 64;
    const double h = s_total / n;
    for (int i = 0; i < n; ++i) {
        const ShotState k1 = deriv(y);
        const ShotState y2{y.rho + 0.5 * h * k1.rho, y.theta + 0.5 * h * k1.theta,
                           y.chi + 0.5 * h * k1.chi};
        const ShotState k2 = deriv(y2);
        const ShotState y3{y.rho + 0.5 * h * k2.rho, y.theta + 0.5 * h * k2.theta,
                           y.chi + 0.5 * h * k2.chi};
        const ShotState k3 = deriv(y3);
        const ShotState y4{y.rho + h * k3.rho, y.theta + h * k3.theta,
                           y.chi + h * k3.chi};
        const ShotState k4 = deriv(y4);
        y.rho += h / 6.0 * (k1.rho + 2.0 * k2.rho + 2.0 * k3.rho + k4.rho);
        y.theta += h / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta);
        y.chi += h / 6.0 * (k1.chi + 2.0 * k2.chi + 2.0 * k3.chi + k4.chi);
    }
    return y;
}

/// Length of the geodesic joining (rho1, 0) and (rho2, dtheta) on the cap:
/// two-unknown Newton (initial angle, arc length) on the shot endpoint.
double geodesic_arc(const CapProfile& cap, double rho1, double rho2, double dtheta) {
    const double phi_mid = cap.value(0.5 * (rho1 + rho2));
    double s = std::hypot(rho2 - rho1, phi_mid * dtheta);
    double chi = std::atan2(phi_mid * dtheta, rho2 - rho1);
    const double scale = cap.radial_extent;
    for (int it = 0; it < 40; ++it) {
        const ShotState y = integrate_geodesic(cap, rho1, chi, s);
        const double f1 = y.rho - rho2;
        const double f2 = (y.theta - dtheta) * phi_mid;
        if (std::abs(f1) + std::abs(f2) <= 1e-12 * scale) return s;
        const double hc = 1e-7, hs = 1e-7 * s;
        const ShotState yc = integrate_geodesic(cap, rho1, chi + hc, s);
        const ShotState ys = integrate_geodesic(cap, rho1, chi, s + hs);
        const double j11 = (yc.rho - y.rho) / hc, j12 = (ys.rho - y.rho) / hs;
        const double j21 = (yc.theta - y.theta) * phi_mid / hc;
        const double j22 = (ys.theta - y.theta) * phi_mid / hs;
        const double det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-30)
            throw numeric_error("cap geodesic shooting hit a singular Jacobian");
        chi -= (f1 * j22 - f2 * j12) / det;
        s -= (j11 * f2 - j21 * f1) / det;
        if (!(s > 0.0)) s = 0.5 * std::hypot(rho2 - rho1, phi_mid * dtheta);
    }
    throw numeric_error("cap geodesic shooting did not converge");
}

}  // namespace

// ---------------------------------------------------------------------------
// mesh assembly

namespace {

/// Per-cap template: ring radii and the exact edge lengths, shared by all
/// three cones (the profile is identical, so lengths match bitwise and the
/// junction seams agree with the flat chart by construction).
struct CapTemplate {
    std::vector<double> rho;        // interior rings, ascending (junction excluded)
    std::vector<double> ring_len;   // circumferential edge at rho[i]
    std::vector<double> radial_len; // rho[i] -> next ring (last: to junction)
    std::vector<double> diag_len;   // rho[i] -> next ring, one slot over
    double junction_ring_len = 0.0;
    double apex_spoke = 0.0;
};

CapTemplate build_cap_template(const CapProfile& cap, int slots) {
    const double r0 = cap.smoothing_radius;
    const double c = cap.radial_extent;
    const double rho_a = cap.flat_zone_end, rho_b = cap.cone_zone_start;
    const double dtheta = 2.0 * kPi / slots;        // cap chart step
    const double dtheta_dev = dtheta / 3.0;         // cone development step
    const double max_gap = r0 / 8.0;
    const double max_turn = 0.05;

    CapTemplate t;
    // flat zone: uniform rings
    const int n_a = std::max(1, static_cast<int>(std::ceil(rho_a / max_gap)));
    for (int i = 1; i <= n_a; ++i) t.rho.push_back(rho_a * i / n_a);
    // transition zone: rings at equal turning increments (gap-capped)
    auto solve_turning = [&cap](double lo, double hi, double target) {
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            (cap.turning(mid) < target ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    double rho = rho_a;
    for (int guard = 0; guard < 4000; ++guard) {
        const double target = cap.turning(rho) + max_turn;
        double nxt = (cap.turning(rho_b) <= target) ? rho_b
                                                    : solve_turning(rho, rho_b, target);
        nxt = std::min(nxt, rho + max_gap);
        if (nxt >= rho_b - 1e-3 * c) break;
        rho = nxt;
        t.rho.push_back(rho);
    }
    t.rho.push_back(rho_b);
    // cone zone: uniform rings up to (but excluding) the junction
    const int n_c = std::max(1, static_cast<int>(std::ceil((c - rho_b) / max_gap)));
    for (int i = 1; i < n_c; ++i) t.rho.push_back(rho_b + (c - rho_b) * i / n_c);

    const double ztol = 1e-12 * c;
    auto ring_edge = [&](double r) {
        if (r <= rho_a + ztol) return 2.0 * r * std::sin(0.5 * dtheta);
        if (r >= rho_b - ztol)
            return 2.0 * (3.0 * cap.value(r)) * std::sin(0.5 * dtheta_dev);
        return geodesic_arc(cap, r, r, dtheta);
    };
    auto diag_edge = [&](double r1, double r2) {
        if (r2 <= rho_a + ztol)
            return std::sqrt(r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * std::cos(dtheta));
        if (r1 >= rho_b - ztol) {
            const double R1 = 3.0 * cap.value(r1), R2 = 3.0 * cap.value(r2);
            return std::sqrt(R1 * R1 + R2 * R2 - 2.0 * R1 * R2 * std::cos(dtheta_dev));
        }
        return geodesic_arc(cap, r1, r2, dtheta);
    };

    const int nr = static_cast<int>(t.rho.size());
    t.ring_len.resize(nr);
    t.radial_len.resize(nr);
    t.diag_len.resize(nr);
    for (int i = 0; i < nr; ++i) {
        const double r1 = t.rho[i];
        const double r2 = (i + 1 < nr) ? t.rho[i + 1] : c;
        t.ring_len[i] = ring_edge(r1);
        t.radial_len[i] = r2 - r1;
        t.diag_len[i] = diag_edge(r1, r2);
    }
    t.junction_ring_len = 2.0 * (3.0 * cap.value(c)) * std::sin(0.5 * dtheta_dev);
    t.apex_spoke = t.rho.front();
    return t;
}

}  // namespace

SmoothedCrokeSurface smooth_caps(double r0, bool with_spectrum) {
    SmoothedCrokeSurface S;
    S.base = build_cone_surface();
    S.cap = make_cap_profile(r0);

    // ---- layout parameters
    constexpr int kM = 36;          // angular cells per kite (72 junction slots)
    constexpr int kSlots = 2 * kM;  // nodes on each junction ring
    // chart angular step π/108 equals the cone-development step (2π/72)/3, so
    // the junction ring is uniform in both charts and the seam chords agree
    const double dalpha = (kPi / 3.0) / kM;
    const double h_cell = 0.05 / std::sqrt(2.0);
    const double l_max = 2.0 / kSqrt3;
    const int K = std::max(
        8, static_cast<int>(std::ceil(std::log(l_max / r0) / std::log1p(h_cell / l_max))));

    // ---- chart geometry (one equilateral triangle, side 2)
    const std::array<C, 3> V = {C(0, 0), C(2, 0), C(1, kSqrt3)};
    const std::array<C, 3> M = {0.5 * (V[0] + V[1]), 0.5 * (V[1] + V[2]),
                                0.5 * (V[2] + V[0])};
    const C O = (V[0] + V[1] + V[2]) / 3.0;
    auto far_node = [&](int v, int j) {
        const C a = M[v], b = M[(v + 2) % 3];
        if (j <= kM / 2) return a + (static_cast<double>(j) / (kM / 2)) * (O - a);
        return O + (static_cast<double>(j - kM / 2) / (kM / 2)) * (b - O);
    };
    std::array<std::array<double, kM + 1>, 3> len_far, ang_uni, ang_far;
    for (int v = 0; v < 3; ++v) {
        const double a0 = v * (2.0 * kPi / 3.0);
        for (int j = 0; j <= kM; ++j) {
            const C d = far_node(v, j) - V[v];
            len_far[v][j] = std::abs(d);
            ang_uni[v][j] = a0 + j * dalpha;
            double beta = std::arg(d);
            while (beta < a0 - 1e-9) beta += 2.0 * kPi;
            ang_far[v][j] = beta;
        }
    }
    // angular blend: exact uniform angles on the junction ring (k = 0), the
    // transfinite directions on the far polyline (k = K)
    auto pos = [&](int v, int j, int k) -> C {
        if (k == K) return far_node(v, j);
        const double l = len_far[v][j];
        const double r = (k == 0) ? r0 : r0 * std::exp(k * std::log(l / r0) / K);
        const double frac = static_cast<double>(k) / K;
        const double ang = ang_uni[v][j] + frac * (ang_far[v][j] - ang_uni[v][j]);
        return V[v] + std::polar(r, ang);
    };

    // ---- vertex registry (ids allocated in a fixed order)
    TriMesh& mesh = S.mesh;
    std::array<std::array<int, kSlots>, 3> J;
    for (int v = 0; v < 3; ++v)
        for (int t = 0; t < kSlots; ++t) J[v][t] = mesh.add_vertex();
    std::array<std::array<std::vector<int>, 2>, 3> E;  // [edge][side][k=1..K-1]
    for (int e = 0; e < 3; ++e)
        for (int sd = 0; sd < 2; ++sd) {
            E[e][sd].assign(K, -1);
            for (int k = 1; k < K; ++k) E[e][sd][k] = mesh.add_vertex();
        }
    std::array<int, 3> mid_id;
    for (int e = 0; e < 3; ++e) mid_id[e] = mesh.add_vertex();
    std::array<int, 2> o_id;
    std::array<std::array<std::vector<int>, 3>, 2> far_id;  // [tri][v][i=1..17]
    for (int tri = 0; tri < 2; ++tri) {
        o_id[tri] = mesh.add_vertex();
        for (int v = 0; v < 3; ++v) {
            far_id[tri][v].assign(kM / 2, -1);
            for (int i = 1; i < kM / 2; ++i) far_id[tri][v][i] = mesh.add_vertex();
        }
    }
    std::array<std::array<std::vector<int>, 3>, 2> interior;  // [(j-1)*(K-1)+(k-1)]
    for (int tri = 0; tri < 2; ++tri)
        for (int v = 0; v < 3; ++v) {
            interior[tri][v].assign(static_cast<size_t>(kM - 1) * (K - 1), -1);
            for (auto& id : interior[tri][v]) id = mesh.add_vertex();
        }

    auto vid = [&](int tri, int v, int j, int k) -> int {
        if (k == 0) return J[v][tri == 0 ? j % kSlots : (kSlots - j) % kSlots];
        if (j == 0) return k == K ? mid_id[v] : E[v][0][k];
        if (j == kM) return k == K ? mid_id[(v + 2) % 3] : E[(v + 2) % 3][1][k];
        if (k == K) {
            if (j == kM / 2) return o_id[tri];
            if (j < kM / 2) return far_id[tri][v][j];
            return far_id[tri][(v + 2) % 3][kM - j];
        }
        return interior[tri][v][static_cast<size_t>(j - 1) * (K - 1) + (k - 1)];
    };

    // ---- flat region: both triangle copies (the second mirrored)
    for (int tri = 0; tri < 2; ++tri)
        for (int v = 0; v < 3; ++v)
            for (int j = 0; j < kM; ++j)
                for (int k = 0; k < K; ++k) {
                    const int a1 = vid(tri, v, j, k), a2 = vid(tri, v, j + 1, k);
                    const int b1 = vid(tri, v, j, k + 1), b2 = vid(tri, v, j + 1, k + 1);
                    const C pa1 = pos(v, j, k), pa2 = pos(v, j + 1, k);
                    const C pb1 = pos(v, j, k + 1), pb2 = pos(v, j + 1, k + 1);
                    mesh.set_edge_length(a1, a2, std::abs(pa1 - pa2));
                    mesh.set_edge_length(a1, b1, std::abs(pa1 - pb1));
                    mesh.set_edge_length(a2, b2, std::abs(pa2 - pb2));
                    mesh.set_edge_length(b1, b2, std::abs(pb1 - pb2));
                    const double d1 = std::abs(pa1 - pb2), d2 = std::abs(pa2 - pb1);
                    auto emit = [&](int x, int y, int z) {
                        if (tri == 0)
                            mesh.add_face(x, y, z);
                        else
                            mesh.add_face(x, z, y);
                    };
                    if (d1 <= d2) {
                        mesh.set_edge_length(a1, b2, d1);
                        emit(a1, a2, b2);
                        emit(a1, b2, b1);
                    } else {
                        mesh.set_edge_length(a2, b1, d2);
                        emit(a1, a2, b1);
                        emit(a2, b2, b1);
                    }
                }

    // ---- caps: rotationally symmetric template instantiated at each cone
    const CapTemplate tpl = build_cap_template(S.cap, kSlots);
    const int nr = static_cast<int>(tpl.rho.size());
    std::array<int, 3> apex;
    std::array<std::vector<int>, 3> ring_ids;  // nr*kSlots ids per cone
    for (int v = 0; v < 3; ++v) {
        apex[v] = mesh.add_vertex();
        ring_ids[v].assign(static_cast<size_t>(nr) * kSlots, -1);
        for (auto& id : ring_ids[v]) id = mesh.add_vertex();
    }
    S.apex_vertices = apex;
    auto rid = [&](int v, int i, int t) -> int {
        t = (t % kSlots + kSlots) % kSlots;
        if (i == nr) return J[v][t];
        return ring_ids[v][static_cast<size_t>(i) * kSlots + t];
    };
    for (int v = 0; v < 3; ++v) {
        for (int t = 0; t < kSlots; ++t) {  // apex fan, wound to oppose the flat side
            mesh.add_face(apex[v], rid(v, 0, t + 1), rid(v, 0, t));
            mesh.set_edge_length(apex[v], rid(v, 0, t), tpl.apex_spoke);
            mesh.set_edge_length(rid(v, 0, t), rid(v, 0, t + 1), tpl.ring_len[0]);
        }
        for (int i = 0; i < nr; ++i) {
            const double outer_ring_len =
                (i + 1 < nr) ? tpl.ring_len[i + 1] : tpl.junction_ring_len;
            for (int t = 0; t < kSlots; ++t) {
                const int p1 = rid(v, i, t), p2 = rid(v, i + 1, t);
                const int p3 = rid(v, i + 1, t + 1), p4 = rid(v, i, t + 1);
                mesh.set_edge_length(p1, p2, tpl.radial_len[i]);
                mesh.set_edge_length(p2, p3, outer_ring_len);
                mesh.set_edge_length(p1, p3, tpl.diag_len[i]);
                mesh.add_face(p1, p3, p2);
                mesh.add_face(p1, p4, p3);
            }
        }
    }

    mesh.finalize();
    if (mesh.euler_characteristic() != 2)
        throw numeric_error("smoothed surface mesh is not a sphere");

    // ---- certificates
    S.mesh_area = mesh.total_area();
    S.delta_area = S.mesh_area - 2.0 * kSqrt3;
    S.total_defect = mesh.total_angle_defect();
    S.min_defect = mesh.min_angle_defect();
    for (int v = 0; v < 3; ++v) {
        double sum = mesh.angle_defect(apex[v]);
        for (int i = 0; i < nr; ++i)
            for (int t = 0; t < kSlots; ++t) sum += mesh.angle_defect(rid(v, i, t));
        for (int t = 0; t < kSlots; ++t) {
            sum += mesh.angle_defect(J[v][t]);
            S.max_junction_defect =
                std::max(S.max_junction_defect, std::abs(mesh.angle_defect(J[v][t])));
        }
        S.cap_defects[v] = sum;
    }
    if (with_spectrum) {
        S.lambda1 = mesh.fem_lambda1();
        S.has_spectrum = true;
    }
    return S;
}

// ---------------------------------------------------------------------------
// certificates and the hoop report

double geodesic_lower_bound(const SmoothedCrokeSurface& s) {
    const double r0 = s.cap.smoothing_radius;
    const double flat_case = 2.0 * kSqrt3;        // no cap visited: lattice systole
    const double one_cap = 2.0 * kSqrt3 - 2.0 * r0;  // one cap: detour shortcut <= 2r0
    const double multi_cap = 4.0 - 4.0 * r0;      // >= two caps: cone distance 2 each
    if (!(multi_cap > one_cap))
        throw input_error(
            "cap radius too large: the multi-cap case no longer dominates");
    return std::min(flat_case, std::min(one_cap, multi_cap));
}

CounterexampleReport counterexample_report(const SmoothedCrokeSurface& s,
                                           double mass_factor) {
    if (!(mass_factor > 1.0))
        throw input_error("mass factor must exceed 1 (super-Hawking mass)");
    if (!s.has_spectrum || !(s.lambda1 > 0.0))
        throw verify_error("stability of the smoothed sphere is uncertified");
    CounterexampleReport r;
    r.area = s.mesh_area;
    r.systole_bound = geodesic_lower_bound(s);
    r.systolic_ratio = r.systole_bound * r.systole_bound / r.area;
    r.mass = mass_factor * std::sqrt(r.area / (16.0 * kPi));
    r.hoop_bound = 4.0 * kPi * r.mass;
    r.lambda1 = s.lambda1;
    r.ratio_exceeds_pi = r.systolic_ratio > kPi;
    r.hoop_violated = r.systole_bound > r.hoop_bound;
    return r;
}

} // namespace horizon
