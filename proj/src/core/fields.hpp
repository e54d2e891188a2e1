/// @file fields.hpp
/// @brief Scalar/tangent fields on the round sphere and conformal metrics g = e^{2w} g*.
///
/// PURPOSE: nodal field containers bound to a grid, the round differential
/// operators (Δ*, ∇*, div*), and ConformalMetric — the geometry object holding
/// the log conformal factor w with cached area form, Gauss curvature
/// K = e^{-2w}(1 - Δ*w), and integrals against dA_g.  Nonlinear quantities
/// (e^{2w}, pointwise positive parts, products) are evaluated on a "fine" grid
/// at twice the bandlimit so that quadrature of smooth integrands stays at
/// spectral accuracy.

#pragma once

#include <memory>
#include <vector>

#include "core/sht.hpp"

namespace horizon {

/// Real scalar field: one value per grid node (latitude-major).
struct ScalarField {
    GridPtr grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(GridPtr g, double fill = 0.0)
        : grid(std::move(g)), values(static_cast<size_t>(grid->nodes()), fill) {}
    ScalarField(GridPtr g, std::vector<double> v);

    double& operator[](size_t k) { return values[k]; }
    double operator[](size_t k) const { return values[k]; }
    size_t size() const { return values.size(); }
};

/// Tangent field in the orthonormal frame (ê_θ, ê_φ) = (∂_θ, (sin θ)^{-1} ∂_φ).
struct TangentField {
    GridPtr grid;
    std::vector<double> comp_theta, comp_phi;

    TangentField() = default;
    explicit TangentField(GridPtr g)
        : grid(std::move(g)),
          comp_theta(static_cast<size_t>(grid->nodes()), 0.0),
          comp_phi(static_cast<size_t>(grid->nodes()), 0.0) {}
};

/// Analysis at the grid's own bandlimit (exact for band-limited fields).
Coeffs sh_analyze(const ScalarField& f);
/// Analysis truncated to bandlimit L ≤ grid bandlimit.
Coeffs sh_analyze(const ScalarField& f, int L);
ScalarField sh_synthesize(GridPtr g, const Coeffs& a);

/// Δ* f (spectral: eigenvalue -l(l+1) per harmonic).
ScalarField laplace_round(const ScalarField& f);
/// ∇* f in the orthonormal frame.
TangentField grad_round(const ScalarField& f);
/// div* X computed weakly: ∫ f div*X dA* = -∫ g*(∇*f, X) dA* for all test harmonics.
ScalarField div_round(const TangentField& X);

/// ∫ f dA* by Gauss–Legendre × trapezoid quadrature (exact through degree 2L).
double integrate_round(const ScalarField& f);

/// Conformal metric g = e^{2w} g* on the round sphere of area 4π.
///
/// Owns a base grid at bandlimit L (where w lives spectrally) and a fine grid
/// at bandlimit 2L used for all nonlinear quadrature.  Immutable after
/// construction; derived data is computed once.
class ConformalMetric {
public:
    /// Build from spectral coefficients of w (bandlimit taken from the coefficients).
    explicit ConformalMetric(const Coeffs& w_coeffs);
    /// Build from nodal samples of w on grid g; w is analyzed at g's bandlimit.
    ConformalMetric(GridPtr g, const std::vector<double>& w_values);

    int bandlimit() const { return w_.L; }
    const GridPtr& base() const { return base_; }
    const GridPtr& fine() const { return fine_; }

    const Coeffs& w_coeffs() const { return w_; }
    const std::vector<double>& w_base() const { return w_base_; }
    const std::vector<double>& w_fine() const { return w_fine_; }
    /// Area density e^{2w} on the fine grid (dA_g = e^{2w} dA*).
    const std::vector<double>& conformal_density_fine() const { return e2w_fine_; }
    /// Δ*w on the fine grid.
    const std::vector<double>& lap_w_fine() const { return lap_w_fine_; }

    /// Total area ∫ e^{2w} dA*.
    double area() const { return area_; }

    /// ∫ f dA_g for f given nodally on the FINE grid.
    double integrate_fine(const std::vector<double>& f_fine) const;
    /// ∫ f dA_g for a band-limited f on the base grid (resampled spectrally to fine).
    double integrate(const ScalarField& f) const;

    /// Gauss curvature K = e^{-2w}(1 - Δ*w) on the base grid.
    ScalarField gauss_curvature() const;
    /// Same, sampled on the fine grid.
    std::vector<double> gauss_curvature_fine() const;

    /// ∫ (K)_- dA_g with (K)_- = max{0, -K}; equals ∫ (Δ*w - 1)_+ dA*,
    /// evaluated pointwise on the fine grid.
    double negative_curvature_integral() const;

private:
    void finish();

    Coeffs w_{0};
    GridPtr base_, fine_;
    std::vector<double> w_base_, w_fine_, e2w_fine_, lap_w_fine_;
    double area_ = 0.0;
};

} // namespace horizon
