/// @file sht.hpp
/// @brief Pseudo-spectral discretization of the round 2-sphere: Gauss–Legendre ×
///        uniform-longitude grids, real spherical-harmonic transforms, and
///        pole-safe point evaluation with first derivatives.
///
/// Conventions:
///  - Real orthonormal basis on the area-4π sphere:
///      Y_{l,0}  = Pbar_{l,0}(cosθ)/√(2π),
///      Y_{l,m}  = Pbar_{l,m}(cosθ)·cos(mφ)/√π   (m ≥ 1),
///      Y_{l,-m} = Pbar_{l,m}(cosθ)·sin(mφ)/√π   (m ≥ 1),
///    where Pbar are the L²-normalized associated Legendre functions
///    (∫_{-1}^{1} Pbar² dx = 1, no Condon–Shortley phase).
///  - Coefficient storage: k = l(l+1) + m, m ∈ [-l, l]; size (L+1)².
///  - Grid nodes are latitude-major: node = i·nlon + j. Colatitudes are interior
///    Gauss–Legendre nodes (the poles are never sampled).
///  - Analysis is exact for band-limited inputs: longitude sums are exact
///    trigonometric quadrature (degree ≤ 2L over 2L+1 points) and the remaining
///    θ-integrands are polynomials of degree ≤ 2L (Gauss–Legendre with L+1 nodes
///    is exact to degree 2L+1).

#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <vector>

namespace horizon {

/// Gauss–Legendre nodes/weights on [-1,1] (sum of weights = 2).
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

struct SphereGrid {
    int L = 0;     ///< bandlimit resolvable on this grid
    int nlat = 0;  ///< number of colatitude rings (= L+1)
    int nlon = 0;  ///< number of longitudes (= 2L+1)

    std::vector<double> theta;      ///< colatitudes, increasing (size nlat)
    std::vector<double> x;          ///< cosθ per ring
    std::vector<double> sin_theta;  ///< sinθ per ring
    std::vector<double> glw;        ///< Gauss–Legendre weight per ring (Σ = 2)
    std::vector<double> phi;        ///< longitudes (size nlon)

    /// Fourier tables: trig(m, j) for m = 0..L.
    std::vector<double> cos_mphi;  ///< (L+1) × nlon
    std::vector<double> sin_mphi;  ///< (L+1) × nlon

    explicit SphereGrid(int bandlimit);

    int    nodes() const { return nlat * nlon; }
    int    node(int i, int j) const { return i * nlon + j; }
    /// Quadrature weight of node (i,j) against the round area form (Σ = 4π).
    double weight(int i) const { return glw[i] * (2.0 * M_PI / nlon); }
    double cosm(int m, int j) const { return cos_mphi[m * nlon + j]; }
    double sinm(int m, int j) const { return sin_mphi[m * nlon + j]; }
};

using GridPtr = std::shared_ptr<const SphereGrid>;

/// Grids are immutable; shared instances are fine. nlat = L+1, nlon = 2L+1.
GridPtr make_grid(int L);

/// Real spherical-harmonic coefficients up to degree L.
struct Coeffs {
    int L = -1;
    std::vector<double> c;  ///< size (L+1)², index l(l+1)+m

    Coeffs() = default;
    explicit Coeffs(int bandlimit) : L(bandlimit), c((bandlimit + 1) * (bandlimit + 1), 0.0) {}

    double& at(int l, int m) { return c[l * (l + 1) + m]; }
    double  at(int l, int m) const { return c[l * (l + 1) + m]; }
    /// Truncate or zero-pad to bandlimit Lnew.
    Coeffs resized(int Lnew) const;
};

/// Workspace for per-point / per-ring associated-Legendre columns.
/// Layout: triangular, off(m) = m(L+1) - m(m-1)/2, idx = off(m) + (l-m).
struct LegendreWorkspace {
    int L = -1;
    std::vector<double> P;   ///< Pbar_{l,m}(x)
    std::vector<double> Q;   ///< Pbar_{l,m}(x)/sinθ  (m ≥ 1; zero for m = 0)
    std::vector<double> dP;  ///< d Pbar_{l,m}/dθ

    void resize(int bandlimit);
    int  off(int m) const { return m * (L + 1) - (m * (m - 1)) / 2; }
    int  idx(int l, int m) const { return off(m) + (l - m); }
};

/// Fill P, Q, dP columns at x = cosθ, s = sinθ (s > 0 required; poles excluded).
void legendre_columns(int L, double x, double s, LegendreWorkspace& ws);

/// Forward transform: nodal values (grid layout) -> coefficients at bandlimit L.
/// L may be below the grid's own bandlimit (truncated analysis).
Coeffs sht_analyze(const SphereGrid& g, const std::vector<double>& values, int L);

/// Inverse transform: coefficients -> nodal values on g (any grid).
std::vector<double> sht_synthesize(const SphereGrid& g, const Coeffs& a);

/// Value and tangent-frame first derivatives at one point.
struct PointSample {
    double value = 0.0;
    double dtheta = 0.0;         ///< ∂f/∂θ
    double dphi_over_sin = 0.0;  ///< (1/sinθ)∂f/∂φ
};

/// Evaluate one coefficient set at an arbitrary point (pole-safe for θ ∈ (0,π)).
PointSample synth_point(const Coeffs& a, double theta, double phi, LegendreWorkspace& ws);

/// Evaluate k coefficient sets at one point sharing the Legendre columns.
void synth_point_multi(const Coeffs* const* sets, int k, double theta, double phi,
                       LegendreWorkspace& ws, PointSample* out);

/// In-place spectral Laplace–Beltrami of the round sphere: c_lm *= -l(l+1).
Coeffs laplacian_coeffs(const Coeffs& a);

/// True when all m ≠ 0 coefficients vanish relative to the zonal scale.
bool is_zonal(const Coeffs& a, double rel_tol = 1e-13);

/// Nodal synthesis of the gradient in the orthonormal frame (∂_θ, (sinθ)^{-1}∂_φ).
/// Returns two arrays in grid layout.
void synth_gradient(const SphereGrid& g, const Coeffs& a,
                    std::vector<double>& comp_theta, std::vector<double>& comp_phi);

/// Weak divergence: coefficients d with ∫ Y_I div X dA* = -∫ <∇Y_I, X> dA*
/// evaluated by grid quadrature of the sampled components.
Coeffs weak_divergence(const SphereGrid& g, const std::vector<double>& comp_theta,
                       const std::vector<double>& comp_phi, int L);

} // namespace horizon
