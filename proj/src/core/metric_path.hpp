/// @file metric_path.hpp
/// @brief Area-preserving path from a conformal metric to the round metric.
///
/// PURPOSE: builds the family g(t) = φ_t* h(t), where h(t) = e^{2(ζ(t)w + a(t))} g*
/// interpolates between g = e^{2w}g* (t = 0) and the round metric of the same
/// area (t ≥ 1/2).  The gauge a(t) keeps total area constant; the flow φ_t of
/// X_t = ∇^{h(t)}ψ(t) with Δ_{h(t)}ψ = -2(ζ'w + a') makes the area *form*
/// pointwise constant in t.  Along the way each h(t) stays stable (λ₁ > 0),
/// and the first eigenfunctions are carried back through the flow.

#pragma once

#include <array>
#include <limits>
#include <vector>

#include "core/fields.hpp"
#include "core/stability.hpp"

namespace horizon {

/// Smooth decreasing profile ζ: [0,1] → [0,1] with ζ(0)=1, ζ ≡ 0 on [1/2,1],
/// built as 1 minus the normalized integral of the bump exp(-1/(τ(1/2-τ))).
/// The bump is flat to all orders at both ends, so any requested flatness
/// order at t = 0 is satisfied.
class PathProfile {
public:
    explicit PathProfile(int flatness_order = 1);
    int flatness_order() const { return flatness_order_; }
    double zeta(double t) const;
    double zeta_prime(double t) const;

private:
    int flatness_order_;
    double norm_;                     // ∫ bump over (0, 1/2)
    std::vector<double> panel_cum_;   // cumulative integral at uniform panel ends
};

PathProfile default_zeta(int flatness_order = 1);

/// The gauge a(t) with a(0) = 0 solving a' = -ζ' ⨍ w dA_{e^{2ζw}g*};
/// in closed form a(t) = ½ log( A(1) / A(ζ(t)) ) with A(z) = ∫ e^{2zw} dA*.
class AreaGauge {
public:
    AreaGauge(const ConformalMetric& g, const PathProfile& profile);
    double a(double t) const;
    double a_prime(double t) const;

private:
    double area_of(double z) const;      // A(z)
    double w_moment(double z) const;     // ∫ w e^{2zw} dA*
    PathProfile profile_;
    std::vector<double> w_fine_, weight_fine_;
    double logA1_;
};

AreaGauge area_gauge(const ConformalMetric& g, const PathProfile& profile);

/// Solve Δ_h ψ = ρ on a conformal sphere; ψ returned mean-zero (against dA*)
/// on the metric's fine grid, band-limited at twice the base bandlimit so the
/// strong residual of the smooth problem stays at spectral accuracy.
/// Throws input_error when ∫ ρ dA_h is not zero within 1e-9·scale.
ScalarField poisson_solve(const ConformalMetric& h, const ScalarField& rho);

/// A time-indexed tangent field stored as spectral coefficients of its three
/// ambient Cartesian components (smooth scalars on the sphere; pole-safe),
/// interpolated in time by barycentric Lagrange interpolation on the nodes.
struct TimeSampledVectorField {
    std::vector<double> times;
    int L = 0;
    std::vector<std::array<Coeffs, 3>> cart;
    std::vector<double> bary;
    /// Start of the trailing all-zero samples: the field is treated as exactly
    /// zero from here on (a frozen tail must not pick up spurious motion from
    /// polynomial interpolation through earlier nonzero samples).
    double zero_from = std::numeric_limits<double>::infinity();

    /// Append a sample given frame components on a grid; analyzed at bandlimit L.
    void add_sample(double t, const SphereGrid& g,
                    const std::vector<double>& comp_theta, const std::vector<double>& comp_phi);
    void finalize();  // compute barycentric weights and detect the zero tail
    std::array<Coeffs, 3> at_time(double t) const;
    double max_abs_at(int node) const;
};

/// State of one flow trajectory: position and the two transported frame
/// vectors (images of ê_θ, ê_φ at the seed), all in ambient coordinates.
struct FlowState {
    std::array<double, 3> p, v1, v2;
};

struct FlowMap {
    GridPtr grid;                               // seed grid
    std::vector<double> times;                  // recorded times
    std::vector<std::vector<FlowState>> states; // [time][seed node]
};

/// Integrate the flow of X from identity: classical RK4 in ambient space with
/// tangential projection/renormalization each step; Jacobian frame vectors by
/// the variational equation dv_k = <∇*X^k, v> e_k (0-homogeneous extension).
/// With zonal_replicate, only the φ = 0 meridian is integrated and the rest
/// is filled by exact rotation equivariance.
FlowMap flow_integrate(const TimeSampledVectorField& X, GridPtr seeds,
                       const std::vector<double>& record_times,
                       double max_substep = 0.01, bool zonal_replicate = false);

/// Same integrator from explicit initial states (e.g. restarting at the image
/// points of a previous flow for a reverse-composition check).
FlowMap flow_integrate(const TimeSampledVectorField& X, std::vector<FlowState> seeds,
                       GridPtr grid, const std::vector<double>& record_times,
                       double max_substep = 0.01);

/// The finished path: per time node the pulled-back metric components in the
/// start orthonormal frame, the gauge, eigenvalues, and carried eigenfunctions.
struct MetricPath {
    GridPtr grid;
    Coeffs w{0};
    PathProfile profile{1};
    std::vector<double> times, gauge_a, lambda;
    double area = 0.0, rho = 0.0;
    FlowMap flow;
    std::vector<Coeffs> u_h;                            // eigenfunction of h(t), spectral
    std::vector<std::vector<double>> u;                 // u(t)∘φ_t at base nodes
    std::vector<std::vector<std::array<double, 3>>> g;  // (g11,g12,g22) per [time][node]

    double max_area_form_dev = 0.0;  // sup_{t,x} |dA_{g(t)}/dA_{g(0)} - 1|
    double max_frozen_drift = 0.0;   // sup_{t≥1/2} adjacent-node metric difference
    double min_lambda = 0.0;
    double min_eigen_gap = 0.0;

    /// Conformal exponent of h(t): Ω = ζ(t)·w + a(t), evaluated spectrally.
    double omega_at(int k, double theta, double phi) const;
    /// Rayleigh quotient of u(t)∘φ_t against the *sampled* g(t) (diffeo-invariance check).
    double rayleigh_pullback(int k) const;
};

/// Eigenvalue/eigenfunction continuity diagnostics along the path.
struct EigenContinuity {
    double max_lambda_jump = 0.0;  // max |λ(t_{k+1}) - λ(t_k)|
    double max_u_rate = 0.0;       // max ‖u(t_{k+1}) - u(t_k)‖_∞ / Δt
    double min_gap = 0.0;          // min spectral gap along the path
};

/// Construct the full path (64 Chebyshev-clustered time nodes by default).
/// Throws verify_error if any h(t) fails the λ₁ > 0 membership test.
MetricPath build_path(const ConformalMetric& g0, const PathProfile& profile, int n_time = 64);

/// Re-solve the eigen family along an existing path and refresh λ, u; returns
/// continuity diagnostics.
EigenContinuity eigen_along_path(MetricPath& path);

/// Gauss curvature of g(t_k) per latitude ring, computed from the sampled
/// metric components alone (surface-of-revolution formula with 1D Legendre
/// spectral derivatives).  Requires a zonal path; the non-circular check that
/// the frozen tail really is the round sphere of radius ρ.
std::vector<double> zonal_curvature_from_samples(const MetricPath& path, int k);

} // namespace horizon
