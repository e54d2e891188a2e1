/// @file croke.hpp
/// @brief Croke's sphere of systolic ratio > π, smoothed into a nonnegatively
///        curved surface, as a certified counterexample input to the hoop
///        inequality ℓ > 4π·m for sub-Hawking masses.
///
/// PURPOSE: the doubled equilateral triangle Σ (quotient of the hexagonal
/// torus C/Λ by the order-3 rotation) has area 2√3, three cone points of
/// angle 2π/3 at pairwise distance 2, and shortest closed geodesic 2√3.
/// Replacing an r₀-disk at each cone point by a rotationally symmetric cap
/// with K ≥ 0 gives a smooth sphere whose shortest closed geodesic is
/// certified ≥ 2√3 − 2r₀ by a three-case argument (flat loops ≥ lattice
/// systole; one cap visited ≥ 2√3 − 2r₀; several caps ≥ 4 − 4r₀).  All
/// quantities here are produced with exact flat/developable formulas so the
/// certificates survive at 1e-12 .. 1e-6 tolerances.

#pragma once

#include <array>
#include <complex>

#include "core/trimesh.hpp"

namespace horizon {

/// The flat singular sphere: hexagonal lattice data, the fundamental hexagon,
/// and the three cone classes, with the rotation invariants verified.
struct ConeSurface {
    std::complex<double> omega1;  ///< 2√3·e^{-iπ/6}
    std::complex<double> omega2;  ///< 2√3·e^{+iπ/6}
    std::array<std::complex<double>, 6> hexagon;      ///< vertices 2·e^{kπi/3}
    std::array<std::complex<double>, 3> cone_points;  ///< classes 0, 2, 2e^{iπ/3}
    double area = 0.0;  ///< quotient area = (torus area)/3 = 2√3
};

/// Builds the surface and verifies computationally that the rotation
/// z ↦ e^{2πi/3}z preserves the lattice and fixes each cone class, and that
/// the quotient area equals 2√3; throws verify_error otherwise.
ConeSurface build_cone_surface();

/// Shortest nonzero vector of Z·w1 + Z·w2 by enumeration over coefficients
/// |a|,|b| <= 4 (sufficient: the Gram matrix is positive definite, so larger
/// coefficients only grow the norm once the basis is reduced, which holds
/// for the near-hexagonal bases used here).
double lattice_systole(std::complex<double> w1, std::complex<double> w2);

/// Number of lattice vectors attaining the systole (6 for hexagonal).
int lattice_systole_multiplicity(std::complex<double> w1, std::complex<double> w2);

/// Quotient distance between cone classes i and j: minimum of
/// |R^k p_i + a·w1 + b·w2 − p_j| over k in {0,1,2} and |a|,|b| <= 4.
double cone_distance(const ConeSurface& s, int i, int j);

/// Rotationally symmetric smoothing profile g = dρ² + φ(ρ)²dθ² replacing the
/// flat disk of radius r₀ at each cone point.  φ′ descends from 1 to 1/3
/// (the cone slope) through a quintic smoothstep, so K = −φ″/φ ≥ 0, the cap
/// is flat near the apex and exactly conical near the junction, and the glue
/// is C²: φ(extent) = r₀/3, φ′(extent) = 1/3 (circumference continuity).
struct CapProfile {
    double smoothing_radius = 0.0;  ///< r₀: flat radius of the replaced disk
    double radial_extent = 0.0;     ///< intrinsic cap radius c = r₀/(3ψ(1))
    double flat_zone_end = 0.0;     ///< = extent/2 (φ ≡ ρ below this)
    double cone_zone_start = 0.0;   ///< = (7/8)·extent (φ′ ≡ 1/3 beyond)

    double value(double rho) const;   ///< φ (extended conically past extent)
    double slope(double rho) const;   ///< φ′ in [1/3, 1]
    double second(double rho) const;  ///< φ″ ≤ 0
    double gauss_curvature(double rho) const;      ///< K = −φ″/φ ≥ 0
    double turning(double rho) const;              ///< arccos φ′
    double geodesic_curvature(double rho) const;   ///< k_g = φ′/φ > 0
    double total_curvature() const;  ///< 2π(φ′(0) − φ′(c)) = 4π/3 exactly
    double area() const;             ///< 2π∫₀ᶜ φ dρ, in closed form
};

/// Validates 0 < r₀ < 1/2 and assembles the profile.
CapProfile make_cap_profile(double r0);

/// The smoothed sphere as an intrinsic mesh with exact geodesic edge lengths
/// (flat chords, cone-development chords, and shot cap geodesics), plus the
/// certificates extracted from it.
struct SmoothedCrokeSurface {
    ConeSurface base;
    CapProfile cap;
    TriMesh mesh;
    double mesh_area = 0.0;
    double delta_area = 0.0;    ///< mesh_area − 2√3 (≤ 0: caps lose area)
    double total_defect = 0.0;  ///< Σ angle defects = 4π (combinatorial)
    double min_defect = 0.0;    ///< ≥ −1e-8 certifies K ≥ 0 discretely
    std::array<double, 3> cap_defects{};    ///< per-cap Σ defects ≈ 4π/3
    double max_junction_defect = 0.0;       ///< sup |defect| on seam rings
    double lambda1 = 0.0;       ///< FEM λ₁ > 0 (0.0 when not computed)
    bool has_spectrum = false;
    std::array<int, 3> apex_vertices{};     ///< cap centers (search seeds)
};

/// Meshes the smoothed surface: structured kite grids on the flat region
/// (36 angular x geometric radial sectors per half-corner, cell target .05),
/// rings by equal turning increments on the caps, all edge lengths assigned
/// from closed forms or Clairaut shooting.  `with_spectrum` controls the
/// (comparatively expensive) FEM eigenvalue.
SmoothedCrokeSurface smooth_caps(double r0, bool with_spectrum = true);

/// Certified lower bound for the shortest closed geodesic:
/// min(2√3, 2√3 − 2r₀, 4 − 4r₀).  Throws input_error when the multi-cap
/// case stops dominating the single-cap case (4 − 4r₀ <= 2√3 − 2r₀).
double geodesic_lower_bound(const SmoothedCrokeSurface& s);

/// The hoop-inequality audit for a super-Hawking mass m = factor·√(A/16π).
struct CounterexampleReport {
    double area = 0.0;           ///< mesh area A
    double systole_bound = 0.0;  ///< certified ℓ
    double systolic_ratio = 0.0; ///< ℓ²/A
    double mass = 0.0;           ///< factor·√(A/16π)
    double hoop_bound = 0.0;     ///< 4π·mass
    double lambda1 = 0.0;        ///< stability eigenvalue of the surface
    bool ratio_exceeds_pi = false;   ///< ℓ²/A > π
    bool hoop_violated = false;      ///< ℓ > 4π·mass (the counterexample flag)
};

/// Requires mass_factor > 1 (super-Hawking) and a certified λ₁ > 0 on the
/// surface; throws input_error / verify_error respectively.
CounterexampleReport counterexample_report(const SmoothedCrokeSurface& s,
                                           double mass_factor);

} // namespace horizon
