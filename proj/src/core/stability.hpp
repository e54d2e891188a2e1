/// @file stability.hpp
/// @brief The stability operator L_g = -Δ_g + K_g on conformal spheres.
///
/// PURPOSE: quadratic form, first eigenpair of the generalized problem
/// (-Δ* + (1 - Δ*w)) u = λ e^{2w} u (the conformal transform of L_g u = λ u),
/// and the three positivity-membership routes: the eigenvalue itself, the
/// Q_w certificate Q_w φ = -Δ*φ - |∇*(φ-w)|² + 1 > 0 with φ = log u + w,
/// and the gradient bound sup|∇*w| < 1.  Positivity of λ₁ ("the metric is
/// stable") is what every downstream construction consumes.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/fields.hpp"

namespace horizon {

/// First eigenpair of L_g, with diagnostics.
struct EigenPair {
    double lambda = 0.0;   ///< smallest eigenvalue (units of inverse area)
    ScalarField u;         ///< eigenfunction on the metric's base grid
    Coeffs u_coeffs{0};    ///< spectral representation of u
    double residual = 0.0; ///< ||L_g u - λu||_∞ over oversampled nodes
    double gap = 0.0;      ///< λ₂ - λ₁ (near-degeneracy diagnostic)
    double min_u = 0.0;    ///< min of u over oversampled nodes (positivity check)
};

enum class CertificateKind { eigenvalue, q_certificate, gradient_bound };

/// A re-verifiable witness that a metric has λ₁(-Δ+K) > 0.
struct MembershipCertificate {
    CertificateKind kind = CertificateKind::eigenvalue;
    double lambda = 0.0;     ///< eigenvalue payload (when applicable)
    ScalarField phi;         ///< Q-certificate field φ (on the fine grid)
    double min_Q = 0.0;      ///< min over oversampled nodes of Q_w φ
    double sup_grad_w = 0.0; ///< sup over oversampled nodes of |∇*w|
};

/// ∫ |∇*f|² + (1 - Δ*w) f² dA* (conformally invariant form of ∫ |∇f|²_g + K f² dA_g).
/// Throws input_error on the zero field or a grid mismatch.
double quadratic_form(const ConformalMetric& g, const ScalarField& f);

/// Smallest eigenpair of the generalized problem, Galerkin in the harmonic
/// basis up to the metric's bandlimit (dense symmetric solve; per-m block
/// diagonalization when w is zonal).  Throws numeric_error on solver failure.
EigenPair first_eigenpair(const ConformalMetric& g);

/// Scale-aware default tolerance for membership: 1e-8 · (4π / area).
double default_membership_tol(const ConformalMetric& g);

/// λ₁ > tol?
bool is_in_M_plus(const ConformalMetric& g, double tol);
bool is_in_M_plus(const ConformalMetric& g);

/// Pointwise Q_w φ = -Δ*φ - |∇*(φ-w)|² + 1 on the common grid of w and φ.
ScalarField q_operator(const ScalarField& w, const ScalarField& phi);

/// Q_w φ evaluated on the metric's fine grid for φ given nodally there
/// (φ is analyzed at the fine bandlimit; used to verify certificates).
std::vector<double> q_operator_fine(const ConformalMetric& g, const std::vector<double>& phi_fine);

/// Solve for the eigenpair and return the witness φ = log u + w with
/// min Q_w φ > 0.  Throws verify_error when λ₁ ≤ tol or positivity fails.
MembershipCertificate certificate_from_eigenpair(const ConformalMetric& g);

/// Certificate from sup|∇*w| < 1 over oversampled nodes, if the bound holds.
std::optional<MembershipCertificate> gradient_bound_test(const ConformalMetric& g);

} // namespace horizon
