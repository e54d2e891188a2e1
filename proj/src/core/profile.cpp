/// @file profile.cpp
/// @brief Profile calculus: curvature, Schwarzschild curve, bending, gluing.

#include "core/profile.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/sht.hpp"

namespace horizon {

namespace {

/// Finite-difference consistency budget: builders pick local steps so the
/// midpoint-rule mismatch h²|f‴|/12 stays at half of 1e−6·(1+sup|f″|)·h.
constexpr double kFdTolCoeff = 1e-6;

/// Floor step density near bending/gluing zones (4096 samples per unit).
constexpr double kFloorStep = 1.0 / 4096.0;

double fd_tolerance(double sup_fpp) { return kFdTolCoeff * (1.0 + sup_fpp); }

/// Largest step meeting the consistency budget against |f‴| (half budget,
/// so downstream consumers keep 2x headroom).
double step_for(double sup_fpp, double fppp) {
    double denom = std::max(std::abs(fppp), 1e-12);
    return 6.0 * fd_tolerance(sup_fpp) / denom;
}

/// Walks a grid from a to b with local step cap hmax(s) (clamped to
/// [hmin, hcap]), landing exactly on b; a final short step is split in two
/// so no interval is shorter than half of its neighbours.
std::vector<double> walk_grid(double a, double b, double hmin, double hcap,
                              const std::function<double(double)>& hmax) {
    if (!(b > a)) throw input_error("profile grid: empty interval");
    hcap = std::max(hcap, hmin);
    std::vector<double> s{a};
    double t = a;
    while (true) {
        double h = std::clamp(hmax(t), hmin, hcap);
        double rest = b - t;
        if (rest <= 1.5 * h) {
            if (rest > 0.75 * h) s.push_back(t + 0.5 * rest);
            s.push_back(b);
            break;
        }
        t += h;
        s.push_back(t);
    }
    return s;
}

/// Concatenation of walks between consecutive landmarks, so every landmark
/// lands exactly on a grid node (no micro-intervals from insertions).
std::vector<double> walk_segments(const std::vector<double>& marks,
                                  double hmin, double hcap,
                                  const std::function<double(double)>& hmax) {
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < marks.size(); ++k) {
        auto part = walk_grid(marks[k], marks[k + 1], hmin, hcap, hmax);
        if (!out.empty()) part.erase(part.begin());
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

/// 24-point Gauss–Legendre rule on [-1,1], cached.
const std::vector<double>& quad_nodes() {
    static const std::vector<double> x = [] {
        std::vector<double> xs, ws;
        gauss_legendre(24, xs, ws);
        return xs;
    }();
    return x;
}
const std::vector<double>& quad_weights() {
    static const std::vector<double> w = [] {
        std::vector<double> xs, ws;
        gauss_legendre(24, xs, ws);
        return ws;
    }();
    return w;
}

/// ∫_a^b g by n-panel composite 24-point Gauss–Legendre.
double integrate_panels(const std::function<double(double)>& g, double a,
                        double b, int panels) {
    double total = 0.0;
    double w = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double lo = a + p * w;
        double mid = lo + 0.5 * w, half = 0.5 * w;
        double acc = 0.0;
        for (std::size_t q = 0; q < quad_nodes().size(); ++q)
            acc += quad_weights()[q] * g(mid + half * quad_nodes()[q]);
        total += acc * half;
    }
    return total;
}

/// Normalized compact smoothing kernel on (−1,1): the triweight
/// q(y) = (35/32)(1−y²)³, with ∫q = 1 and ∫y²q = 1/9.  A polynomial
/// kernel keeps the convolution quadrature exact for polynomial source
/// pieces (and spectrally accurate for analytic ones), so the smoothed
/// samples carry no quadrature noise into the finite-difference gate;
/// it is C² at the support boundary, which is all the gate requires.
double mollifier(double y) {
    double t = 1.0 - y * y;
    if (t <= 0.0) return 0.0;
    return (35.0 / 32.0) * t * t * t;
}
/// Half second moment of the kernel, ∫y²q/2 = 1/18.
constexpr double kKernelHalfM2 = 1.0 / 18.0;

/// Smooth step built from e^{−1/τ}: exactly 0 for τ ≤ 0 and 1 for τ ≥ 1
/// in double precision; value and first two derivatives.
struct Step {
    double v = 0.0, d1 = 0.0, d2 = 0.0;
};
Step smooth_step(double tau) {
    if (tau <= 0.002) return {0.0, 0.0, 0.0};
    if (tau >= 0.998) return {1.0, 0.0, 0.0};
    double n = std::exp(-1.0 / tau);
    double m = std::exp(-1.0 / (1.0 - tau));
    double d = n + m;
    double it2 = 1.0 / (tau * tau);
    double io2 = 1.0 / ((1.0 - tau) * (1.0 - tau));
    double p = it2 + io2;
    double pp = -2.0 * it2 / tau + 2.0 * io2 / (1.0 - tau);
    double dd = n * it2 - m * io2;
    Step s;
    s.v = n / d;
    double base = n * m / (d * d);
    s.d1 = base * p;
    s.d2 = base * ((it2 - io2) * p + pp - 2.0 * p * dd / d);
    return s;
}

/// Bending bump θ = 1 + e^{−1/(s−s₀)²} left of s₀, ≡ 1 at and beyond s₀.
/// Underflow makes the bump exactly 1 (derivatives exactly 0) within ~0.17
/// of s₀; "numerically active" classification keys off that.
double theta_at(double s, double s0) {
    if (s >= s0) return 1.0;
    double x = s0 - s;
    return 1.0 + std::exp(-1.0 / (x * x));
}
double theta_prime_at(double s, double s0) {
    if (s >= s0) return 0.0;
    double tau = s - s0;
    double e = std::exp(-1.0 / (tau * tau));
    if (e == 0.0) return 0.0;
    return 2.0 * e / (tau * tau * tau);
}
double theta_second_at(double s, double s0) {
    if (s >= s0) return 0.0;
    double tau = s - s0;
    double e = std::exp(-1.0 / (tau * tau));
    if (e == 0.0) return 0.0;
    double t2 = tau * tau;
    return (4.0 / (t2 * t2 * t2) - 6.0 / (t2 * t2)) * e;
}

/// E(y) = ∫₀^y e^{−1/x²} dx, the reparametrization defect of the bump.
double bump_integral(double y) {
    if (y <= 0.0) return 0.0;
    // The integrand is increasing, so y·e^{−1/y²} bounds the integral;
    // below one ulp of typical arclengths the defect is exactly zero.
    if (y * std::exp(-1.0 / (y * y)) < 1e-18) return 0.0;
    return integrate_panels(
        [](double x) {
            if (x <= 0.0) return 0.0;
            return std::exp(-1.0 / (x * x));
        },
        0.0, y, 6);
}

/// Even Taylor coefficients of the scaled horizon series U(σ):
/// u_m(s) = 2m·U(s/2m), U = 1 + σ²/4 − σ⁴/48 + 11σ⁶/2880 − 73σ⁸/80640,
/// obtained by matching U·(U′)² = U − 1 order by order.
constexpr double kA1 = 0.25;
constexpr double kA2 = -1.0 / 48.0;
constexpr double kA3 = 11.0 / 2880.0;
constexpr double kA4 = -73.0 / 80640.0;

double series_u(double sg) {
    double q = sg * sg;
    return 1.0 + q * (kA1 + q * (kA2 + q * (kA3 + q * kA4)));
}
double series_up(double sg) {
    double q = sg * sg;
    return sg *
           (2.0 * kA1 + q * (4.0 * kA2 + q * (6.0 * kA3 + q * 8.0 * kA4)));
}
double series_upp(double sg) {
    double q = sg * sg;
    return 2.0 * kA1 + q * (12.0 * kA2 + q * (30.0 * kA3 + q * 56.0 * kA4));
}

/// One profile sample triple.
struct Tri {
    double f = 0.0, fp = 0.0, fpp = 0.0;
};

std::size_t locate_interval(const std::vector<double>& s, double x) {
    auto it = std::upper_bound(s.begin(), s.end(), x);
    std::size_t i = (it == s.begin())
                        ? 0
                        : static_cast<std::size_t>(it - s.begin() - 1);
    if (i + 1 >= s.size()) i = s.size() - 2;
    return i;
}

/// Hermite-cubic evaluation from (f, f′) samples; f″ by linear interpolation
/// of the stored samples (more accurate than the cubic's own curvature).
Tri hermite_eval(const Profile& p, double x) {
    std::size_t i = locate_interval(p.s, x);
    double h = p.s[i + 1] - p.s[i];
    double t = (x - p.s[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    Tri out;
    out.f = (2 * t3 - 3 * t2 + 1) * p.f[i] + (t3 - 2 * t2 + t) * h * p.fp[i] +
            (-2 * t3 + 3 * t2) * p.f[i + 1] + (t3 - t2) * h * p.fp[i + 1];
    out.fp = (6 * t2 - 6 * t) * (p.f[i] - p.f[i + 1]) / h +
             (3 * t2 - 4 * t + 1) * p.fp[i] + (3 * t2 - 2 * t) * p.fp[i + 1];
    out.fpp = (1.0 - t) * p.fpp[i] + t * p.fpp[i + 1];
    return out;
}

class ProfileEval;

void require_positive(double v, const char* what) {
    if (!(v > 0.0)) {
        std::ostringstream os;
        os << "profile: " << what << " must be positive (got " << v << ")";
        throw input_error(os.str());
    }
}

/// Closed-form-or-Hermite evaluator for a profile at arbitrary points.
class ProfileEval {
  public:
    explicit ProfileEval(const Profile& p) : p_(p) {
        if (p.kind == ProfileKind::schwarzschild ||
            p.kind == ProfileKind::bent)
            curve_ = std::make_unique<SchwarzschildCurve>(p.mass);
    }

    Tri operator()(double x) const {
        switch (p_.kind) {
            case ProfileKind::schwarzschild: {
                Tri t;
                t.f = curve_->u(x);
                t.fp = curve_->up(x);
                t.fpp = curve_->upp(x);
                return t;
            }
            case ProfileKind::bent: {
                double th = theta_at(x, p_.s0);
                double thp = theta_prime_at(x, p_.s0);
                double sg = (x >= p_.s0) ? x : x - bump_integral(p_.s0 - x);
                Tri t;
                double u = curve_->u(sg);
                double up = curve_->up(sg);
                double upp = curve_->upp(sg);
                t.f = u;
                t.fp = up * th;
                t.fpp = upp * th * th + up * thp;
                return t;
            }
            case ProfileKind::collar_tail: {
                double c = p_.eps / (p_.T * p_.T);
                double w = 1.0 + c * x * x;
                double r = std::sqrt(w);
                Tri t;
                t.f = p_.rho * r;
                t.fp = p_.rho * c * x / r;
                t.fpp = p_.rho * c / (w * r);
                return t;
            }
            default:
                return hermite_eval(p_, x);
        }
    }

  private:
    const Profile& p_;
    std::unique_ptr<SchwarzschildCurve> curve_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Validation and pointwise calculus
// ---------------------------------------------------------------------------

void validate_profile(const Profile& p) {
    std::size_t n = p.s.size();
    if (n < 2 || p.f.size() != n || p.fp.size() != n || p.fpp.size() != n)
        throw input_error("profile: needs >= 2 samples with matching arrays");
    double sup_fpp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i + 1 < n && !(p.s[i + 1] > p.s[i]))
            throw input_error("profile: grid must be strictly increasing");
        if (!(p.f[i] > 0.0)) {
            std::ostringstream os;
            os << "profile: f <= 0 at s = " << p.s[i];
            throw input_error(os.str());
        }
        sup_fpp = std::max(sup_fpp, std::abs(p.fpp[i]));
    }
    double tol = fd_tolerance(sup_fpp);
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double h = p.s[i + 1] - p.s[i];
        double quot = (p.f[i + 1] - p.f[i]) / h;
        double mid = 0.5 * (p.fp[i] + p.fp[i + 1]);
        // The truncation budget tol*h shrinks with h while the rounding
        // noise of the difference quotient grows as ulp(f)/h, so a pure
        // O(h) bound is unattainable on fine grids; allow the quotient its
        // representation error (a short chain of rounded operations per
        // stored sample) in addition to the truncation budget.
        double floor_term =
            16.0 * kEps * (1.0 + std::abs(p.f[i]) + std::abs(p.f[i + 1])) / h;
        double budget = tol * h + floor_term;
        if (std::abs(quot - mid) > budget) {
            std::ostringstream os;
            os << "profile: f/f' finite-difference mismatch at s = " << p.s[i]
               << " (|" << quot - mid << "| > " << budget << ")";
            throw input_error(os.str());
        }
    }
}

double OmegaBound::sup() const {
    if (!(alpha > 0.0))
        throw input_error("omega bound: alpha must be positive");
    return (1.0 - beta * beta) / (2.0 * alpha);
}

std::vector<double> scalar_curvature_1d(const Profile& p) {
    validate_profile(p);
    std::vector<double> r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        double f = p.f[i], fp = p.fp[i], fpp = p.fpp[i];
        r[i] = 2.0 / (f * f) * (1.0 - fp * fp) - 4.0 * fpp / f;
    }
    return r;
}

std::vector<double> psc_margin(const Profile& p) {
    validate_profile(p);
    std::vector<double> m(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        m[i] = (1.0 - p.fp[i] * p.fp[i]) / (2.0 * p.f[i]) - p.fpp[i];
    return m;
}

bool psc_test(const Profile& p) {
    auto m = psc_margin(p);
    for (double v : m)
        if (!(v > 0.0)) return false;
    return true;
}

double mean_curvature_1d(const Profile& p, double s) {
    if (p.s.size() < 2) throw input_error("profile: needs >= 2 samples");
    if (s < p.a() - 1e-12 || s > p.b() + 1e-12)
        throw input_error("mean curvature: point outside profile interval");
    ProfileEval ev(p);
    Tri t = ev(std::clamp(s, p.a(), p.b()));
    if (!(t.f > 0.0)) throw numeric_error("mean curvature: f <= 0");
    return 2.0 * t.fp / t.f;
}

// ---------------------------------------------------------------------------
// Schwarzschild curve
// ---------------------------------------------------------------------------

SchwarzschildCurve::SchwarzschildCurve(double m) : m_(m) {
    require_positive(m, "schwarzschild mass");
}

/// Solves m·sinh 2χ + 2mχ = s for χ ≥ 0 (u = 2m·cosh²χ).  The left side is
/// increasing and convex in χ with slope ≥ 4m, so Newton converges globally
/// and the inversion stays non-degenerate down to the horizon.
double SchwarzschildCurve::chi_for(double s) const {
    if (s <= 0.0) return 0.0;
    double chi = 0.5 * std::asinh(0.5 * s / m_);
    for (int it = 0; it < 100; ++it) {
        double sh = std::sinh(2.0 * chi), ch = std::cosh(2.0 * chi);
        double f = m_ * sh + 2.0 * m_ * chi - s;
        double fp = 2.0 * m_ * ch + 2.0 * m_;
        double d = f / fp;
        chi -= d;
        if (std::abs(d) <= 1e-16 * (1.0 + std::abs(chi))) break;
    }
    return chi;
}

double SchwarzschildCurve::u(double s) const {
    if (s < 0.0) throw input_error("schwarzschild: s must be >= 0");
    if (s <= m_ / 100.0) return 2.0 * m_ * series_u(s / (2.0 * m_));
    double chi = chi_for(s);
    double c = std::cosh(chi);
    return 2.0 * m_ * c * c;
}

double SchwarzschildCurve::up(double s) const {
    if (s < 0.0) throw input_error("schwarzschild: s must be >= 0");
    if (s <= m_ / 100.0) return series_up(s / (2.0 * m_));
    return std::tanh(chi_for(s));
}

double SchwarzschildCurve::upp(double s) const {
    if (s < 0.0) throw input_error("schwarzschild: s must be >= 0");
    if (s <= m_ / 100.0) return series_upp(s / (2.0 * m_)) / (2.0 * m_);
    double v = u(s);
    return m_ / (v * v);
}

double SchwarzschildCurve::arclength(double u) const {
    if (u < 2.0 * m_ * (1.0 - 1e-14))
        throw input_error("schwarzschild: radius below the horizon");
    double t = std::max(u - 2.0 * m_, 0.0);
    return std::sqrt(u * t) +
           2.0 * m_ *
               std::log((std::sqrt(u) + std::sqrt(t)) / std::sqrt(2.0 * m_));
}

Profile schwarzschild_profile(double m, double s_max) {
    require_positive(m, "schwarzschild mass");
    require_positive(s_max, "schwarzschild profile length");
    SchwarzschildCurve c(m);
    double sup_fpp = 1.0 / (4.0 * m);  // u″ peaks at the horizon: m/(2m)²
    double near_end = std::min(s_max, 2.0);
    auto hmax = [&](double s) {
        double uu = c.u(s);
        double fppp = 2.0 * m * c.up(s) / (uu * uu * uu);
        double h = step_for(sup_fpp, fppp);
        if (s < near_end) h = std::min(h, kFloorStep);
        return h;
    };
    double hcap = std::max(m / 16.0, s_max / 1024.0);
    auto grid = walk_grid(0.0, s_max, 1e-9 * std::max(1.0, m), hcap, hmax);
    Profile p;
    p.kind = ProfileKind::schwarzschild;
    p.mass = m;
    p.s = grid;
    p.f.resize(grid.size());
    p.fp.resize(grid.size());
    p.fpp.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        p.f[i] = c.u(grid[i]);
        p.fp[i] = c.up(grid[i]);
        p.fpp[i] = c.upp(grid[i]);
    }
    validate_profile(p);
    return p;
}

// ---------------------------------------------------------------------------
// Collar tail and slope matching
// ---------------------------------------------------------------------------

Profile collar_tail(double eps, double T, double rho) {
    require_positive(eps, "collar tail eps");
    require_positive(T, "collar tail T");
    require_positive(rho, "collar tail rho");
    double c = eps / (T * T);
    double lo = 0.5 * T;
    double sup_fpp = rho * c / std::pow(1.0 + c * lo * lo, 1.5);
    auto hmax = [&](double s) {
        double w = 1.0 + c * s * s;
        double fppp = 3.0 * rho * c * c * s / std::pow(w, 2.5);
        return step_for(sup_fpp, fppp);
    };
    auto grid = walk_grid(lo, T, 1e-9 * T, kFloorStep, hmax);
    Profile p;
    p.kind = ProfileKind::collar_tail;
    p.eps = eps;
    p.T = T;
    p.rho = rho;
    p.s = grid;
    p.f.resize(grid.size());
    p.fp.resize(grid.size());
    p.fpp.resize(grid.size());
    ProfileEval ev(p);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Tri t = ev(grid[i]);
        p.f[i] = t.f;
        p.fp[i] = t.fp;
        p.fpp[i] = t.fpp;
    }
    validate_profile(p);
    return p;
}

double match_epsilon(double target_slope, double T, double rho, double eps0) {
    require_positive(T, "match T");
    require_positive(rho, "match rho");
    require_positive(eps0, "match eps0");
    require_positive(target_slope, "match target slope");
    auto slope = [&](double e) { return rho * e / (T * std::sqrt(1.0 + e)); };
    double top = slope(eps0);
    // Closed-form inverse of ε/√(1+ε) = q, used as reference and start.
    double q = target_slope * T / rho;
    double eps_exact = 0.5 * (q * q + q * std::sqrt(q * q + 4.0));
    if (target_slope > top) {
        std::ostringstream os;
        os << "slope matching infeasible: target " << target_slope
           << " exceeds the collar-tail slope " << top << " at eps0 = "
           << eps0 << "; required eps = " << eps_exact;
        throw verify_error(os.str());
    }
    // Safeguarded Newton on the monotone slope law, bracketed in (0, eps0].
    double lo = 0.0, hi = eps0;
    double e = std::clamp(eps_exact, std::numeric_limits<double>::min(), eps0);
    for (int it = 0; it < 200; ++it) {
        double r = slope(e) - target_slope;
        if (r > 0.0)
            hi = e;
        else
            lo = e;
        double dslope = rho / T * (1.0 + 0.5 * e) / std::pow(1.0 + e, 1.5);
        double next = e - r / dslope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - e) <= 1e-15 * (1.0 + e)) {
            e = next;
            break;
        }
        e = next;
    }
    return e;
}

// ---------------------------------------------------------------------------
// Bending
// ---------------------------------------------------------------------------

namespace {

Profile build_bent(const SchwarzschildCurve& c, double m, double s0,
                   double delta) {
    double lo = s0 - delta;
    double hi = s0 + std::min(delta, s0);
    // Probe |f″| for the tolerance scale, then walk with the closed form
    //   f‴ = u‴θ³ + 3u″θθ′ + u′θ″,  u‴ = −2m·u′/u³.
    double sup_fpp = 0.0;
    for (int i = 0; i <= 512; ++i) {
        double s = lo + (hi - lo) * i / 512.0;
        double th = theta_at(s, s0);
        double fpp = c.upp(s) * th * th + c.up(s) * theta_prime_at(s, s0);
        sup_fpp = std::max(sup_fpp, std::abs(fpp));
    }
    auto hmax = [&](double s) {
        double th = theta_at(s, s0);
        double uu = c.u(s), up = c.up(s), upp = c.upp(s);
        double uppp = -2.0 * m * up / (uu * uu * uu);
        double fppp = std::abs(uppp * th * th * th) +
                      std::abs(3.0 * upp * th * theta_prime_at(s, s0)) +
                      std::abs(up * theta_second_at(s, s0));
        return step_for(sup_fpp, fppp);
    };
    auto grid = walk_segments({lo, s0, hi}, 1e-10 * std::max(1.0, s0),
                              kFloorStep, hmax);
    Profile p;
    p.kind = ProfileKind::bent;
    p.mass = m;
    p.s0 = s0;
    p.delta = delta;
    p.s = grid;
    p.f.resize(grid.size());
    p.fp.resize(grid.size());
    p.fpp.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double s = grid[i];
        double th = theta_at(s, s0);
        double thp = theta_prime_at(s, s0);
        double sg = (s >= s0) ? s : s - bump_integral(s0 - s);
        p.f[i] = c.u(sg);
        p.fp[i] = c.up(sg) * th;
        p.fpp[i] = c.upp(sg) * th * th + c.up(sg) * thp;
    }
    return p;
}

}  // namespace

Profile bend(double m, double s0, double delta) {
    require_positive(m, "bend mass");
    require_positive(s0, "bend location");
    if (!(delta > 0.0) || !(delta < s0))
        throw input_error("bend: need 0 < delta < s0");
    SchwarzschildCurve c(m);
    // The bump meets its boundary conditions exactly in double precision:
    // underflow gives θ(s₀) = 1 with identically vanishing derivatives.
    if (theta_at(s0, s0) != 1.0 || theta_prime_at(s0, s0) != 0.0 ||
        theta_second_at(s0, s0) != 0.0)
        throw numeric_error("bend: bump boundary conditions violated");

    double d = delta;
    for (int attempt = 0; attempt <= 20; ++attempt, d *= 0.5) {
        // The reparametrized arclength must not run off the horizon.
        if ((s0 - d) - bump_integral(d) < 0.0) continue;
        Profile p = build_bent(c, m, s0, d);
        auto R = scalar_curvature_1d(p);
        bool ok = true;
        for (std::size_t i = 0; i < p.size() && ok; ++i) {
            double s = p.s[i];
            if (s >= s0) {
                if (std::abs(R[i]) > 1e-8) ok = false;
            } else if (theta_at(s, s0) - 1.0 >= 1e-13) {
                if (!(R[i] > 0.0)) ok = false;  // numerically active bending
            } else {
                if (R[i] < -kPscBand) ok = false;  // flat up to rounding
            }
        }
        if (ok) return p;
    }
    throw numeric_error(
        "bend: width reduction exhausted without positive curvature on the "
        "bent region");
}

// ---------------------------------------------------------------------------
// Gluing
// ---------------------------------------------------------------------------

namespace {

/// Piecewise C^{1,1} reference: f₁, then the linear bridge with slope
/// f₁′(b₁), then the translated f₂.
struct TildeEval {
    const ProfileEval& e1;
    const ProfileEval& e2;
    double b1, a2, shift;
    double fb1, db1;

    Tri operator()(double t) const {
        if (t <= b1) return e1(t);
        if (t >= a2) return e2(t - shift);
        Tri r;
        r.f = fb1 + (t - b1) * db1;
        r.fp = db1;
        r.fpp = 0.0;
        return r;
    }
};

/// Blend weight χ with two smooth shoulders, ≡ 1 across the bridge and the
/// kinks, exactly 0 outside [zl, zr]; value and first two derivatives.
struct ChiEval {
    double zl, cl, cr, zr;

    Step at(double t) const {
        if (t <= zl || t >= zr) return {0.0, 0.0, 0.0};
        if (t < cl) {
            double w = cl - zl;
            Step s = smooth_step((t - zl) / w);
            return {s.v, s.d1 / w, s.d2 / (w * w)};
        }
        if (t <= cr) return {1.0, 0.0, 0.0};
        double w = zr - cr;
        Step s = smooth_step((zr - t) / w);
        return {s.v, -s.d1 / w, s.d2 / (w * w)};
    }
};

/// Difference convolution (f̃⋆φ_σ − f̃)(t) for (f, f′, f″) in one pass.
/// The quadrature splits at the bridge kinks so each segment integrand is
/// smooth, and differencing against the center value keeps the result
/// accurate at tiny widths (integrand O(σ) instead of O(1)).
Tri conv_delta(const TildeEval& te, double t, double sigma) {
    Tri base = te(t);
    double cuts[4] = {-1.0, 1.0, 0.0, 0.0};
    int ncuts = 2;
    for (double kink : {te.b1, te.a2}) {
        double y = (t - kink) / sigma;
        if (y > -1.0 + 1e-14 && y < 1.0 - 1e-14) cuts[ncuts++] = y;
    }
    std::sort(cuts, cuts + ncuts);
    Tri acc;
    for (int seg = 0; seg + 1 < ncuts; ++seg) {
        double ya = cuts[seg], yb = cuts[seg + 1];
        if (yb - ya < 1e-14) continue;
        double mid = 0.5 * (ya + yb), half = 0.5 * (yb - ya);
        for (std::size_t q = 0; q < quad_nodes().size(); ++q) {
            double y = mid + half * quad_nodes()[q];
            double w = quad_weights()[q] * half * mollifier(y);
            Tri v = te(t - sigma * y);
            acc.f += w * (v.f - base.f);
            acc.fp += w * (v.fp - base.fp);
            acc.fpp += w * (v.fpp - base.fpp);
        }
    }
    return acc;
}

/// Output sample of the blended glue at width σ (σ = 0 means the plain
/// C^{1,1} reference, used when every positive width underflows).
Tri glue_sample(const TildeEval& te, const ChiEval& chi, double t,
                double sigma) {
    Tri base = te(t);
    if (sigma <= 0.0) return base;
    Step x = chi.at(t);
    if (x.v == 0.0 && x.d1 == 0.0 && x.d2 == 0.0) return base;
    Tri d = conv_delta(te, t, sigma);
    Tri out;
    out.f = base.f + x.v * d.f;
    out.fp = base.fp + x.d1 * d.f + x.v * d.fp;
    out.fpp = base.fpp + x.d2 * d.f + 2.0 * x.d1 * d.fp + x.v * d.fpp;
    return out;
}

double margin_of(const Tri& t) {
    return (1.0 - t.fp * t.fp) / (2.0 * t.f) - t.fpp;
}

void check_glue_input(const Profile& p, const char* which) {
    validate_profile(p);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p.fp[i] > 0.0) || !(p.fpp[i] > 0.0)) {
            std::ostringstream os;
            os << "glue: " << which
               << " must have f' > 0 and f'' > 0 throughout (fails at s = "
               << p.s[i] << ")";
            throw input_error(os.str());
        }
        double mg = (1.0 - p.fp[i] * p.fp[i]) / (2.0 * p.f[i]) - p.fpp[i];
        if (mg < -kPscBand) {
            std::ostringstream os;
            os << "glue: " << which << " is not scalar positive (margin "
               << mg << " at s = " << p.s[i] << ")";
            throw input_error(os.str());
        }
    }
}

}  // namespace

Profile glue(const Profile& f1, const Profile& f2) {
    check_glue_input(f1, "first profile");
    check_glue_input(f2, "second profile");
    ProfileEval e1(f1), e2(f2);

    double b1 = f1.b(), fb1 = f1.f.back(), db1 = f1.fp.back();
    double a2o = f2.a(), fa2 = f2.f.front(), da2 = f2.fp.front();
    if (std::abs(db1 - da2) > 1e-9 * (1.0 + std::abs(db1)))
        throw input_error("glue: endpoint slope mismatch exceeds 1e-9");
    if (fb1 > fa2)
        throw input_error(
            "glue: ordering violation (first profile must end below the "
            "second)");

    double gap = (fa2 - fb1) / db1;
    double a2 = b1 + gap;
    double shift = a2 - a2o;

    // Degenerate self-glue: the arcs already meet with matching value and
    // slope, so the interpolant is the function itself (kept bit-exact).
    if (gap <= 1e-12 * (1.0 + std::abs(b1))) {
        Profile out;
        out.kind = ProfileKind::glued;
        out.s = f1.s;
        out.f = f1.f;
        out.fp = f1.fp;
        out.fpp = f1.fpp;
        std::size_t start =
            (std::abs(f2.s.front() + shift - b1) < 1e-12) ? 1 : 0;
        for (std::size_t i = start; i < f2.size(); ++i) {
            out.s.push_back(f2.s[i] + shift);
            out.f.push_back(f2.f[i]);
            out.fp.push_back(f2.fp[i]);
            out.fpp.push_back(f2.fpp[i]);
        }
        validate_profile(out);
        return out;
    }

    double len1 = b1 - f1.a(), len2 = f2.b() - a2o;
    double w1 = len1 / 4.0, w2 = len2 / 4.0;
    TildeEval te{e1, e2, b1, a2, shift, fb1, db1};
    ChiEval chi{b1 - w1, b1 - 0.5 * w1, a2 + 0.5 * w2, a2 + w2};

    double sup_fpp_in = 0.0;
    for (double v : f1.fpp) sup_fpp_in = std::max(sup_fpp_in, std::abs(v));
    for (double v : f2.fpp) sup_fpp_in = std::max(sup_fpp_in, std::abs(v));
    double jump = std::max(f1.fpp.back(), f2.fpp.front());

    // Input grids already meet the consistency budget; reuse their local
    // spacing in the blend zone as the baseline step.
    auto input_step = [&](double t) {
        if (t <= b1) {
            std::size_t i = locate_interval(f1.s, std::min(t, b1));
            return f1.s[i + 1] - f1.s[i];
        }
        if (t >= a2) {
            std::size_t i =
                locate_interval(f2.s, std::clamp(t - shift, f2.a(), f2.b()));
            return f2.s[i + 1] - f2.s[i];
        }
        return kFloorStep;
    };

    // Mollification stays well inside the χ plateau (so the kinks are
    // smoothed at full weight) and keeps the blend shoulders cheap to
    // resolve; the bridge-scale cap keeps near-degenerate glues exact.
    double sigma0 = std::min(gap / 4.0, 0.03 * std::min(len1, len2));
    double sigma_floor = 1e-9 * std::max({1.0, len1, len2});
    double sigma = sigma0;
    std::string last_gate_failure = "no attempt recorded";
    for (int attempt = 0; attempt <= 40; ++attempt) {
        if (sigma < sigma_floor) sigma = 0.0;

        // Probe pass: margins at the mollified scale plus the kink nodes.
        auto probe_step = [&](double t) {
            double h = kFloorStep;
            if (sigma > 0.0 &&
                std::min(std::abs(t - b1), std::abs(t - a2)) < 3.0 * sigma)
                h = std::min(h, sigma / 16.0);
            return h;
        };
        auto probe =
            walk_segments({chi.zl, b1, a2, chi.zr},
                          1e-12 * std::max(1.0, b1), kFloorStep, probe_step);
        bool ok = true;
        for (double t : probe) {
            Tri out = glue_sample(te, chi, t, sigma);
            if (!(out.f > 0.0) || !(out.fp > 0.0)) {
                ok = false;
                break;
            }
            double mg = margin_of(out);
            double ref = margin_of(te(t));
            if (sigma > 0.0) {
                // The mollified profile averages a σ-neighbourhood, so the
                // retention criterion compares against its worst margin.
                ref = std::min({ref, margin_of(te(t - sigma)),
                                margin_of(te(t + sigma))});
            }
            if (mg < -kPscBand || mg < 0.5 * ref - kPscBand) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            if (sigma == 0.0)
                throw numeric_error(
                    "glue: mollification width underflow without admissible "
                    "margins");
            sigma *= 0.5;
            continue;
        }

        // Final pass: output grid fine enough for the finite-difference
        // consistency gate, including the smoothed-kink |f‴| ≈ jump·φ(y)/σ
        // spike and the blend-shoulder terms χ‴Δ and χ″Δ′.
        double refine = 1.0;
        for (int attempt2 = 0; attempt2 <= 8; ++attempt2, refine *= 0.5) {
            auto hmax = [&](double t) {
                double h = std::min(input_step(t), kFloorStep);
                if (sigma > 0.0) {
                    double fppp = 0.0;
                    for (double kink : {b1, a2}) {
                        double y = (t - kink) / sigma;
                        if (std::abs(y) < 1.0)
                            fppp += jump * mollifier(y) / sigma;
                    }
                    double wsh = 0.0;
                    if (t > chi.zl && t < chi.cl)
                        wsh = chi.cl - chi.zl;
                    else if (t > chi.cr && t < chi.zr)
                        wsh = chi.zr - chi.cr;
                    if (wsh > 0.0) {
                        double dmax = kKernelHalfM2 * sigma * sigma *
                                      std::abs(te(t).fpp);
                        double dpmax = kKernelHalfM2 * sigma * sigma * 6.0 *
                                       fd_tolerance(sup_fpp_in) /
                                       input_step(t);
                        fppp += 100.0 / (wsh * wsh * wsh) * dmax +
                                21.0 / (wsh * wsh) * dpmax;
                    }
                    if (fppp > 0.0)
                        h = std::min(h, step_for(sup_fpp_in, fppp));
                }
                return h * refine;
            };
            auto zone =
                walk_segments({chi.zl, b1, a2, chi.zr},
                              1e-12 * std::max(1.0, b1), kFloorStep, hmax);
            Profile out;
            out.kind = ProfileKind::glued;
            for (std::size_t i = 0; i < f1.size() && f1.s[i] < chi.zl; ++i) {
                out.s.push_back(f1.s[i]);
                out.f.push_back(f1.f[i]);
                out.fp.push_back(f1.fp[i]);
                out.fpp.push_back(f1.fpp[i]);
            }
            for (double t : zone) {
                Tri v = glue_sample(te, chi, t, sigma);
                out.s.push_back(t);
                out.f.push_back(v.f);
                out.fp.push_back(v.fp);
                out.fpp.push_back(v.fpp);
            }
            for (std::size_t i = 0; i < f2.size(); ++i) {
                double t = f2.s[i] + shift;
                if (t <= chi.zr) continue;
                out.s.push_back(t);
                out.f.push_back(f2.f[i]);
                out.fp.push_back(f2.fp[i]);
                out.fpp.push_back(f2.fpp[i]);
            }
            try {
                validate_profile(out);
            } catch (const input_error& e) {
                last_gate_failure = e.what();
                continue;
            }
            return out;
        }
        throw numeric_error(
            "glue: could not meet the sample-consistency budget near the "
            "bridge (" +
            last_gate_failure + ")");
    }
    throw numeric_error("glue: mollification width underflow");
}

Profile restrict_profile(const Profile& p, double a, double b) {
    if (p.s.size() < 2) throw input_error("restrict: needs >= 2 samples");
    if (!(b > a)) throw input_error("restrict: empty interval");
    auto lo = std::lower_bound(p.s.begin(), p.s.end(), a - 1e-12);
    auto hi = std::upper_bound(p.s.begin(), p.s.end(), b + 1e-12);
    std::size_t i0 = static_cast<std::size_t>(lo - p.s.begin());
    std::size_t i1 = static_cast<std::size_t>(hi - p.s.begin());
    if (i1 < i0 + 2)
        throw input_error("restrict: fewer than two samples in range");
    Profile out;
    out.kind = p.kind;
    out.mass = p.mass;
    out.eps = p.eps;
    out.T = p.T;
    out.rho = p.rho;
    out.s0 = p.s0;
    out.delta = p.delta;
    out.s.assign(p.s.begin() + i0, p.s.begin() + i1);
    out.f.assign(p.f.begin() + i0, p.f.begin() + i1);
    out.fp.assign(p.fp.begin() + i0, p.fp.begin() + i1);
    out.fpp.assign(p.fpp.begin() + i0, p.fpp.begin() + i1);
    return out;
}

}  // namespace horizon
