/// @file zoo.hpp
/// @brief Dense families of stable horizons with large negative curvature:
///        g = e^{2(v + αh)}g* with h = −cos(nθ)/n.
///
/// PURPOSE: C¹-openness of the stable set inside a conformal class gives a
/// margin certificate Q_w φ ≥ Q_v φ − |∇*(2φ−w−v)|·|∇*(w−v)| that avoids an
/// eigen solve per perturbation; since |∇*(αh)| ≤ α uniformly in n, one
/// amplitude certifies the whole frequency sweep.  The module builds the
/// certified metrics, computes ∫(K)₋ dA exactly for zonal data (kink-split
/// quadrature), and evaluates the closed-form lower bound μ·(½αn − Λ) with
/// μ the exact round area of {cos nθ ≥ 1/2} ∩ {π/3 ≤ θ ≤ 2π/3}.

#pragma once

#include <vector>

#include "core/fields.hpp"
#include "core/sht.hpp"

namespace horizon {

/// A base metric in the stable class plus the zonal perturbation parameters.
struct ZooSpec {
    Coeffs v{0};          ///< base log-factor; e^{2v}g* must have λ₁ > 0
    double alpha = 0.25;  ///< perturbation amplitude, in (0,1)
    int n = 8;            ///< zonal frequency of h = −cos(nθ)/n
};

/// A certified zoo metric: the conformal factor, the amplitude actually
/// used (halved from the request until the margin certificate is positive),
/// and the n-uniform certification margin.
struct ZooMetric {
    ConformalMetric g;
    ZooSpec spec;        ///< with the certified amplitude
    double margin = 0.0; ///< min Q_v φ − (|∇*(2(φ−v))| + α)·α  (n-free)
    int shrinks = 0;     ///< halvings applied to the requested amplitude
};

/// Curvature accounting for one zoo metric.
struct NegativePartReport {
    double lambda1 = 0.0;            ///< first eigenvalue of −Δ_g + K_g
    double negative_integral = 0.0;  ///< ∫ (K_g)₋ dA_g
    double positive_integral = 0.0;  ///< ∫ (K_g)₊ dA_g (difference is 4π)
    double mu = 0.0;                 ///< round area of {cos nθ ≥ 1/2} ∩ D
    double Lambda = 0.0;             ///< sup_D (1 − Δ*v − α sin(nθ)cot θ)
    double bound = 0.0;              ///< μ·(½αn − Λ); a true lower bound
                                     ///< for the integral when positive
    double c1_distance = 0.0;        ///< α(1 + 1/n) ≥ ‖αh‖_{C¹}
};

/// Zonal coefficients of −cos(nθ)/n at bandlimit L ≥ n (analysis is exact:
/// cos(nθ) is a degree-n polynomial in cos θ).
Coeffs zonal_cos_profile(int n, int L);

/// min over oversampled nodes of Q_v φ − |∇*(2φ−w−v)|·|∇*(w−v)|.
/// When φ certifies v (min Q_v φ > 0), a positive value certifies that
/// e^{2w}g* is stable — no eigen solve on w required.
double openness_margin(const Coeffs& v, const Coeffs& w, const Coeffs& phi);

/// min over oversampled nodes of Q_v φ − (|∇*(2(φ−v))| + α)·α.  This lower
/// bounds openness_margin(v, v + αh, φ) for EVERY h with |∇*h| ≤ 1, so a
/// positive value certifies the whole n sweep at once.
double openness_margin_uniform(const Coeffs& v, const Coeffs& phi,
                               double alpha);

/// Build the certified metric at bandlimit max(2n + 16, bandlimit of v).
/// Halves α (at most 20 times) until the n-uniform margin is positive;
/// throws verify_error on amplitude underflow or when v itself is unstable.
ZooMetric zoo_metric(const ZooSpec& spec);

/// λ₁, the exact curvature integrals, and the certified lower bound.
NegativePartReport negative_part_report(const ZooMetric& zm);
NegativePartReport negative_part_report(const ZooSpec& spec);

/// A certified spec within C¹ distance 2·alpha0 of v whose negative-part
/// integral meets the target c (frequency doubled until it does).
struct DensityResult {
    ZooSpec spec;
    double margin = 0.0;       ///< n-uniform margin at the selected α
    double integral = 0.0;     ///< achieved ∫(K)₋ ≥ c
    double c1_distance = 0.0;  ///< α(1 + 1/n) ≤ 2·alpha0
};
DensityResult density_demo(const Coeffs& v, double c, double alpha0);

}  // namespace horizon
