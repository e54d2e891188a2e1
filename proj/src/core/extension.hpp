/// @file extension.hpp
/// @brief Mass-m Schwarzschild extensions of stable horizons.
///
/// PURPOSE: orchestrates the full construction from a horizon metric
/// g = e^{2w}g* with λ₁(−Δ+K) > 0 and a target mass m with 16πm² > area(g):
/// (1) area-preserving path and scalar-positive collar with selected
/// (ε₀, A₀); (2) identify the frozen-tail warp constant T and round radius
/// ρ; (3) geometric search for the junction arclength s₀ so the
/// Schwarzschild curve point sits strictly below and to the right of the
/// collar curve Γ(ε) = (f_ε(T), f_ε′(T)); (4) bend the Schwarzschild
/// profile on [s₀−δ, s₀]; (5) match ε* so the collar and bent slopes align;
/// (6) glue; (7) attach the exact Schwarzschild tail.  The result carries a
/// recomputable verification report: positivity per region, boundary
/// isometry, mean-convex foliation, junction continuity, and the mass
/// inequalities (ADM = m > Hawking mass).

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "core/collar.hpp"
#include "core/fields.hpp"
#include "core/metric_path.hpp"
#include "core/profile.hpp"

namespace horizon {

struct ExtensionOptions {
    bool totally_geodesic = false;  ///< gate the second-fundamental-form check
    int n_time = 64;                ///< time nodes for the path
    double eps0_cap = 0.0;          ///< extra cap on ε₀ (0 = selection value)
    double tail_span = 0.0;         ///< tail reporting length (0 = 10·m)
};

/// One attempted (s₀, δ) configuration in the feasibility search.
struct ScheduleEntry {
    double s0 = 0.0;
    double delta = 0.0;       ///< δ accepted by the bend (0 if not reached)
    double eps_required = 0.0;///< ε needed to match slopes (0 if not reached)
    std::string outcome;      ///< "accepted" or the reason it was rejected
};

/// The built extension: collar (3-dimensional chart on S²×[0,1]), glued neck
/// profile (1-dimensional warped-product chart, global arclength), and the
/// exact Schwarzschild tail.  The charts overlap on the collar's frozen
/// region via s = T·t, where the neck reproduces the collar closed form
/// bit for bit up to the start of the gluing window.
struct ExtensionManifold {
    CollarMetric collar;   ///< final collar at ε = ε*
    Profile neck;          ///< glued profile on [T/2, tail_start]
    double tail_mass = 0.0;
    double tail_start = 0.0;  ///< global arclength where the exact tail begins
    double tail_end = 0.0;    ///< reporting end of the tail range
    double tail_shift = 0.0;  ///< tail value at s is u_m(s − tail_shift)

    double area = 0.0;  ///< area(g), preserved along the path
    double rho = 0.0;   ///< √(area/4π)
    double T = 0.0;     ///< frozen-tail warp constant (after rescale)
    double s0 = 0.0;    ///< junction arclength in Schwarzschild coordinates
    double delta = 0.0; ///< accepted bending width
    double eps_star = 0.0;  ///< matched collar parameter
    double eps0 = 0.0;      ///< selection cap used
    double A0 = 0.0;        ///< selected warp amplitude
    bool totally_geodesic = false;
    std::vector<ScheduleEntry> schedule;
};

/// All quantities recomputed from the stored samples, so corrupting a stored
/// region flips exactly the corresponding flag.
struct VerificationReport {
    double min_R_collar = 0.0;     ///< block-formula minimum over the cylinder
    double min_margin_neck = 0.0;  ///< min 1D scalar-positivity margin
    double min_R_neck = 0.0;       ///< min 1D scalar curvature on the neck
    double max_abs_R_tail = 0.0;   ///< closed-form tail flatness
    double tail_exactness = 0.0;   ///< max |neck sample − closed form| beyond s₀
    double boundary_residual = 0.0;///< t = 0 metric vs e^{2w}g*, per component
    double h0_residual = 0.0;      ///< |H| at the boundary slice
    double min_interior_H = 0.0;   ///< over collar slices t > 0 and the neck
    double second_form_residual = 0.0;  ///< ‖II‖ at t = 0 (totally geodesic)
    double junction_value_jump = 0.0;   ///< collar↔neck agreement on overlap
    double junction_slope_jump = 0.0;   ///< and in the first derivative
    double collar_neck_consistency = 0.0;  ///< 3D vs 1D curvature, frozen region
    double hawking = 0.0;
    double adm = 0.0;
    double penrose_margin = 0.0;   ///< 16π·adm² − area

    bool pass_collar_positivity = false;
    bool pass_neck_positivity = false;
    bool pass_tail = false;
    bool pass_boundary = false;
    bool pass_foliation = false;
    bool pass_penrose = false;
    bool pass() const {
        return pass_collar_positivity && pass_neck_positivity && pass_tail &&
               pass_boundary && pass_foliation && pass_penrose;
    }
};

/// Bartnik mass bracket from the bisection of successful builds.
struct BartnikEstimate {
    double lower = 0.0;  ///< the Hawking mass, exactly
    double upper = 0.0;  ///< smallest mass with a verified build
    std::vector<double> tested;
    std::vector<char> succeeded;
};

/// √(area/16π); the Hawking mass of a minimal surface of the given area.
double hawking_mass(double area);

/// Build the extension.  Throws input_error when 16πm² ≤ area (reports the
/// Penrose margin), verify_error when the horizon is not stable or the
/// feasibility search/matching fails (with the schedule in the message),
/// and propagates construction errors from the collar, bend, and glue.
ExtensionManifold build_extension(const ConformalMetric& g, double m,
                                  const ExtensionOptions& opt = {});

/// The tail is exactly Schwarzschild, so the ADM mass is its parameter.
double adm_mass(const ExtensionManifold& ext);

/// Recompute every report quantity from the stored samples.
VerificationReport verify(const ExtensionManifold& ext);

/// Bisection on m from 2·m_H toward m_H = hawking_mass(area): returns
/// (m_H, upper] with upper ≤ (1 + rel_tol)·m_H when builds keep succeeding.
BartnikEstimate bartnik_mass_estimate(const ConformalMetric& g, double rel_tol,
                                      const ExtensionOptions& opt = {});

}  // namespace horizon
