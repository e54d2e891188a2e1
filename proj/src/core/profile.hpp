/// @file profile.hpp
/// @brief 1D calculus of rotationally symmetric metrics f(s)²g* + ds².
///
/// PURPOSE: everything about warped-product cylinders over the round
/// area-4π sphere that can be reduced to the single profile function f:
///   R(s)       = 2f⁻²(1 − f′²) − 4 f″/f          (scalar curvature)
///   margin(s)  = (1 − f′²)/(2f) − f″              (psc margin, R = 4·margin/f)
///   Ω(α, β)    = (−∞, (1 − β²)/(2α))              (admissible f″ interval)
///   H(s)       = 2 f′/f                           (slice mean curvature)
/// Schwarzschild is the exact equality case: u″ = m/u² = (1 − u′²)/(2u),
/// which is what fixes the exponents above (f = sin s gives R ≡ 6, f = s
/// gives R ≡ 0, Schwarzschild gives R ≡ 0).
///
/// The module builds the four profile families the extension pipeline glues
/// together: the exact Schwarzschild curve u_m, the collar tail
/// f_ε(s) = ρ√(1+εT⁻²s²) on [T/2, T], the bent Schwarzschild profile
/// u_m∘σ with σ′ = θ = 1 + e^{−1/(s−s₀)²}, and the C^{1,1}
/// linear-interpolation glue of two compatible profiles, smoothed by a
/// compactly supported mollifier and blended so the outer halves of both
/// inputs are preserved bit-for-bit.
///
/// FLOATING-POINT STRICTNESS: e^{−1/x²} is below one ulp of 1 for
/// x < 0.165, so a bent profile is bit-identical to Schwarzschild except
/// near the outer edge of the bent window, and sampled curvature there is
/// 0 ± rounding rather than strictly positive.  All strict-positivity
/// verification in this module therefore asserts R > 0 only where the
/// construction is numerically active (the bump registers above one ulp)
/// and |R| ≤ band elsewhere, with band = 1e−10, the same tolerance band
/// used to classify boundary cases of the psc test.
#pragma once

#include <cstddef>
#include <vector>

namespace horizon {

/// Boundary band for sampled positivity classification: |R| (or |margin|)
/// below this is treated as "flat up to rounding", not a sign.
inline constexpr double kPscBand = 1e-10;

/// Which closed-form family a profile's samples came from.  generic means
/// samples only (evaluation between samples falls back to Hermite
/// interpolation); the other tags carry exact evaluators.
enum class ProfileKind { generic, schwarzschild, collar_tail, glued, bent };

/// Sampled profile on [a,b] = [s.front(), s.back()]: strictly increasing
/// grid and dense samples of f, f′, f″.  Invariants (validate_profile):
/// f > 0 everywhere and the midpoint finite difference of f matches f′,
///   |(f_{i+1}−f_i)/h_i − (f′_i+f′_{i+1})/2| ≤ 1e−6·(1 + sup|f″|)·h_i,
/// which every builder in this module meets by choosing local step sizes
/// h ≲ 12·1e−6·(1 + sup|f″|)/|f‴| (the 4096-per-unit floor near bending
/// and gluing zones is refined further wherever f‴ demands it).
struct Profile {
    ProfileKind kind = ProfileKind::generic;
    std::vector<double> s;
    std::vector<double> f;
    std::vector<double> fp;
    std::vector<double> fpp;

    // Closed-form parameters, populated per kind.
    double mass = 0.0;   ///< schwarzschild, bent
    double eps = 0.0;    ///< collar_tail
    double T = 0.0;      ///< collar_tail
    double rho = 0.0;    ///< collar_tail
    double s0 = 0.0;     ///< bent: bump ends here, exact Schwarzschild beyond
    double delta = 0.0;  ///< bent: window is [s0−delta, s0]

    double a() const { return s.front(); }
    double b() const { return s.back(); }
    std::size_t size() const { return s.size(); }
};

/// Throws input_error on malformed samples: size mismatch, non-increasing
/// grid, f ≤ 0, or midpoint finite-difference inconsistency between f and f′.
void validate_profile(const Profile& p);

/// Admissible open interval Ω(α, β) = (−∞, sup) of second derivatives at a
/// profile point with value α > 0 and slope β: sup = (1 − β²)/(2α).
/// f″ ∈ Ω(f, f′) pointwise is equivalent to R > 0.
struct OmegaBound {
    double alpha = 1.0;
    double beta = 0.0;
    double sup() const;  ///< (1 − β²)/(2α); throws input_error if α ≤ 0
};

/// Scalar curvature R = 2f⁻²(1 − f′²) − 4f″/f per sample.
std::vector<double> scalar_curvature_1d(const Profile& p);

/// psc margin (1 − f′²)/(2f) − f″ per sample (= sup Ω(f, f′) − f″ = R·f/4).
std::vector<double> psc_margin(const Profile& p);

/// True iff the margin is strictly positive at every sample.
bool psc_test(const Profile& p);

/// Mean curvature H = 2f′/f of the slice through s (Hermite interpolation
/// between samples; exact at grid points).  Throws input_error off [a,b].
double mean_curvature_1d(const Profile& p, double s);

/// Exact mass-m Schwarzschild profile u_m: u(0) = 2m, u′ = √(1 − 2m/u),
/// u″ = m/u².  Near the horizon (s ≤ m/100) the even power series
/// u = 2m·U(s/2m), U(σ) = 1 + σ²/4 − σ⁴/48 + 11σ⁶/2880 − 73σ⁸/80640 is
/// used (the square-root ODE is degenerate at u = 2m); beyond, s(u) is
/// inverted through the non-degenerate parametrization u = 2m·cosh²χ,
/// s = m·sinh 2χ + 2mχ, solved by fixed-point + Newton iteration.
class SchwarzschildCurve {
  public:
    explicit SchwarzschildCurve(double m);
    double mass() const { return m_; }
    double u(double s) const;
    double up(double s) const;   ///< u′(s) = √(1 − 2m/u) (series form near 0)
    double upp(double s) const;  ///< u″(s) = m/u²
    /// Exact radial arclength from the horizon:
    /// s(u) = √(u(u−2m)) + 2m·ln[(√u + √(u−2m))/√(2m)].
    double arclength(double u) const;

  private:
    double m_;
    double chi_for(double s) const;
};

/// Densely sampled Schwarzschild profile on [0, s_max] with the grid refined
/// near the horizon and geometrically coarsened along the tail, always within
/// the finite-difference consistency budget.  Throws input_error if m ≤ 0 or
/// s_max ≤ 0.
Profile schwarzschild_profile(double m, double s_max);

/// Bent Schwarzschild profile u_m∘σ on [s₀−δ, s₀+min(δ,s₀)]:
/// σ′ = θ = 1 + e^{−1/(s−s₀)²} left of s₀ and σ(s) = s beyond, so the
/// metric is exactly Schwarzschild for s ≥ s₀ and scalar positive where the
/// bump is numerically active.  Verifies θ(s₀) = 1 with vanishing
/// derivatives, θ > 0, R > 0 on the active bent zone and R ≥ −band on the
/// rest of the window; on far-end positivity failure δ is halved and retried
/// (max 20 halvings, then numeric_error).  The returned delta field records
/// the accepted width.
Profile bend(double m, double s0, double delta);

/// Collar tail f_ε(s) = ρ·√(1 + εT⁻²s²) on [T/2, T] with the exact
/// derivatives f′ = ρεT⁻²s/√(1+εT⁻²s²), f″ = ρεT⁻²(1+εT⁻²s²)^{−3/2}.
Profile collar_tail(double eps, double T, double rho);

/// The unique ε ∈ (0, ε₀] with f_ε′(T) = target_slope, from the monotone
/// slope law f_ε′(T) = ρε/(T√(1+ε)) (bisection + Newton to 1e−12).  Throws
/// verify_error when the target exceeds f_{ε₀}′(T), reporting the ε that
/// would be required (the target mass sits too close to the Hawking bound
/// for the given cap).
double match_epsilon(double target_slope, double T, double rho, double eps0);

/// Gluing lemma: given f₁, f₂ with f, f′, f″ > 0, margins ≥ −band, matching
/// end slopes (within 1e−9) and f₁(b₁) < f₂(a₂), translates f₂ so that
/// a₂ − b₁ = (f₂(a₂) − f₁(b₁))/f₁′(b₁) (the linear bridge of slope f₁′(b₁)
/// then interpolates C^{1,1}), mollifies the bridge region with a normalized
/// compact bump of width σ (starting at min((b₁−a₁)/8, (b₂−a₂)/8, gap/4)
/// and halved — max 40, then numeric_error — until every sample keeps
/// margin ≥ −band and at least half the C^{1,1} reference margin), and
/// blends smoothly back to the inputs so that [a₁, (a₁+b₁)/2] and
/// [(a₂+b₂)/2, b₂] are preserved bit-for-bit.
Profile glue(const Profile& f1, const Profile& f2);

/// Sub-profile on [a, b] (endpoints snapped to existing grid points), with
/// samples copied bit-for-bit and closed-form tags preserved.
Profile restrict_profile(const Profile& p, double a, double b);

}  // namespace horizon
