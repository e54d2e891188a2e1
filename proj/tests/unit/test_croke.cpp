/// @file test_croke.cpp
/// @brief The singular flat sphere (lattice, cone classes, distances), the
///        smoothing cap profile with its closed forms, the exact-length mesh
///        certificates, and the hoop counterexample report.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "core/croke.hpp"
#include "core/errors.hpp"
#include "test_support.hpp"

using namespace horizon;
using horizon::test::report;
using horizon::test::report_at_least;

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kSqrt3 = std::sqrt(3.0);

}  // namespace

TEST_CASE("cone surface: lattice, rotation, area, distances") {
    ConeSurface s = build_cone_surface();

    CHECK(std::abs(std::abs(s.omega1) - 2.0 * kSqrt3) <= 1e-14);
    CHECK(std::abs(std::abs(s.omega2) - 2.0 * kSqrt3) <= 1e-14);
    for (const auto& h : s.hexagon) CHECK(std::abs(std::abs(h) - 2.0) <= 1e-14);
    report("quotient area vs 2sqrt3", std::abs(s.area - 2.0 * kSqrt3), 1e-12);

    report("lattice systole vs 2sqrt3",
           std::abs(lattice_systole(s.omega1, s.omega2) - 2.0 * kSqrt3), 1e-12);
    CHECK(lattice_systole_multiplicity(s.omega1, s.omega2) == 6);
    // doubling the lattice doubles the systole (scaling sanity)
    report("doubled lattice systole vs 4sqrt3",
           std::abs(lattice_systole(2.0 * s.omega1, 2.0 * s.omega2) - 4.0 * kSqrt3),
           1e-12);

    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double d = cone_distance(s, i, j);
            if (i == j) continue;
            report("cone distance (" + std::to_string(i) + "," + std::to_string(j) +
                       ") vs 2",
                   std::abs(d - 2.0), 1e-12);
        }
}

TEST_CASE("cap profile: glue conditions, curvature sign, closed forms") {
    const double r0 = 0.02;
    CapProfile cap = make_cap_profile(r0);
    const double c = cap.radial_extent;

    // intrinsic extent from the isometric glue phi(c) = r0/3
    report("extent vs (8/19) r0", std::abs(c - 8.0 * r0 / 19.0) / c, 1e-14);
    report("phi(extent) vs r0/3", std::abs(cap.value(c) - r0 / 3.0) / (r0 / 3.0), 1e-13);
    CHECK(cap.slope(0.0) == 1.0);
    CHECK(cap.slope(c) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(cap.value(0.0) == 0.0);

    // nonnegative curvature and positive circle curvature throughout
    double min_K = 1e300, min_kg = 1e300, max_slope_dev = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double rho = c * i / 2000.0;
        min_K = std::min(min_K, cap.gauss_curvature(rho));
        if (i > 0) min_kg = std::min(min_kg, cap.geodesic_curvature(rho));
        if (rho <= cap.flat_zone_end)
            max_slope_dev = std::max(max_slope_dev, std::abs(cap.slope(rho) - 1.0));
        if (rho >= cap.cone_zone_start)
            max_slope_dev = std::max(max_slope_dev, std::abs(cap.slope(rho) - 1.0 / 3.0));
    }
    report_at_least("min gauss curvature", min_K, -1e-15);
    report_at_least("min circle geodesic curvature", min_kg, 0.5 / r0);
    report("slope flat/cone zone deviation", max_slope_dev, 1e-15);
    report("junction circle k_g vs 1/r0",
           std::abs(cap.geodesic_curvature(c) - 1.0 / r0) * r0, 1e-12);

    // total curvature 4π/3: closed form and an independent quadrature of
    // ∫K dA = −2π ∫ φ″ dρ (Simpson over the transition zone)
    report("total curvature vs 4pi/3 (closed form)",
           std::abs(cap.total_curvature() - 4.0 * kPi / 3.0), 1e-12);
    const double a = cap.flat_zone_end, b = cap.cone_zone_start;
    const int n = 4000;
    double integral = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x0 = a + (b - a) * i / n, x1 = a + (b - a) * (i + 1) / n;
        integral += (b - a) / n / 6.0 *
                    (-cap.second(x0) - 4.0 * cap.second(0.5 * (x0 + x1)) - cap.second(x1));
    }
    report("total curvature vs 4pi/3 (quadrature)",
           std::abs(2.0 * kPi * integral - 4.0 * kPi / 3.0), 1e-8);

    // the cap always loses area against the flat cone disk it replaces
    const double cone_disk = kPi * r0 * r0 / 3.0;
    report("cap area < replaced cone disk", cap.area() - cone_disk, 0.0);
    report_at_least("cap area positive", cap.area(), 0.0);

    CHECK_THROWS_AS(make_cap_profile(0.0), input_error);
    CHECK_THROWS_AS(make_cap_profile(0.5), input_error);
    CHECK_THROWS_AS(make_cap_profile(-0.1), input_error);
}

TEST_CASE("smoothed surface mesh: defects, area, seams (r0 = 0.05)") {
    const double r0 = 0.05;
    SmoothedCrokeSurface s = smooth_caps(r0, /*with_spectrum=*/false);

    CHECK(s.mesh.euler_characteristic() == 2);
    report("total defect vs 4pi", std::abs(s.total_defect - 4.0 * kPi), 1e-9);
    report_at_least("min defect (K >= 0 discretely)", s.min_defect, -1e-8);
    report("junction seam defect sup", s.max_junction_defect, 1e-9);
    for (int v = 0; v < 3; ++v)
        report("cap " + std::to_string(v) + " curvature vs 4pi/3",
               std::abs(s.cap_defects[v] - 4.0 * kPi / 3.0), 1e-6);

    report("area deficit sign (mesh <= 2sqrt3)", s.delta_area, 0.0);
    report("area deficit magnitude", std::abs(s.delta_area), 3.0 * kPi * r0 * r0);
    // mesh deficit vs the closed-form smooth deficit 3(cap area − cone disk)
    const double smooth_delta = 3.0 * (s.cap.area() - kPi * r0 * r0 / 3.0);
    report("mesh vs smooth area deficit", std::abs(s.delta_area - smooth_delta), 1e-6);
}

TEST_CASE("area deficit and certified bound are monotone in r0") {
    const double radii[4] = {0.1, 0.05, 0.02, 0.01};
    double prev_deficit = 1e300, prev_gap = 1e300;
    for (double r0 : radii) {
        SmoothedCrokeSurface s = smooth_caps(r0, /*with_spectrum=*/false);
        const double deficit = std::abs(s.delta_area);
        const double gap = 2.0 * kSqrt3 - geodesic_lower_bound(s);
        report("area |deficit| decreasing at r0=" + std::to_string(r0),
               deficit, prev_deficit * (1.0 - 1e-12));
        report("bound gap decreasing at r0=" + std::to_string(r0),
               gap, prev_gap * (1.0 - 1e-12));
        report("mesh area within paper bound at r0=" + std::to_string(r0),
               s.mesh_area, 2.0 * kSqrt3 + 0.01);
        prev_deficit = deficit;
        prev_gap = gap;
    }
}

TEST_CASE("certified bound cases and guards") {
    // degenerate but admissible radius: one-cap case still dominated
    SmoothedCrokeSurface s1 = smooth_caps(0.2, /*with_spectrum=*/false);
    report("bound at r0=0.2 vs 2sqrt3-0.4",
           std::abs(geodesic_lower_bound(s1) - (2.0 * kSqrt3 - 0.4)), 1e-12);

    // too large: the multi-cap case 4-4r0 stops dominating 2sqrt3-2r0
    SmoothedCrokeSurface s2 = smooth_caps(0.3, /*with_spectrum=*/false);
    CHECK_THROWS_AS(geodesic_lower_bound(s2), input_error);

    // report guards: sub-Hawking mass and uncertified stability
    CHECK_THROWS_AS(counterexample_report(s1, 1.0), input_error);
    CHECK_THROWS_AS(counterexample_report(s1, 0.9), input_error);
    CHECK_THROWS_AS(counterexample_report(s1, 1.02), verify_error);  // no spectrum
}

TEST_CASE("full certified counterexample at r0 = 0.02") {
    const double r0 = 0.02;
    SmoothedCrokeSurface s = smooth_caps(r0, /*with_spectrum=*/true);

    report("total defect vs 4pi", std::abs(s.total_defect - 4.0 * kPi), 1e-9);
    report_at_least("min defect", s.min_defect, -1e-8);
    report("junction seam defect sup", s.max_junction_defect, 1e-9);
    for (int v = 0; v < 3; ++v)
        report("cap " + std::to_string(v) + " curvature vs 4pi/3",
               std::abs(s.cap_defects[v] - 4.0 * kPi / 3.0), 1e-6);
    report("mesh area vs 2sqrt3 + 0.01", s.mesh_area, 2.0 * kSqrt3 + 0.01);
    report_at_least("lambda1 positive", s.lambda1, 1e-6);
    report("lambda1 sanity (sphere-like)", s.lambda1, 20.0);

    const double ell = geodesic_lower_bound(s);
    report("certified bound vs 2sqrt3 - 0.04", std::abs(ell - (2.0 * kSqrt3 - 0.04)),
           1e-12);

    CounterexampleReport rep = counterexample_report(s, 1.02);
    CHECK(rep.ratio_exceeds_pi);
    CHECK(rep.hoop_violated);
    report_at_least("systolic ratio above pi", rep.systolic_ratio, kPi + 0.2);
    report_at_least("hoop margin ell - 4pi m", rep.systole_bound - rep.hoop_bound, 0.05);
    CHECK(rep.lambda1 == s.lambda1);
    CHECK(rep.hoop_bound == doctest::Approx(4.0 * kPi * rep.mass).epsilon(1e-15));

    // the violation persists across every admissible factor up to 1.015
    for (double f : {1.001, 1.005, 1.01, 1.015})
        CHECK(counterexample_report(s, f).hoop_violated);
    // and flips once the mass crosses ell/(4pi sqrt(A/16pi)) ~ 1.038
    CounterexampleReport far = counterexample_report(s, 1.05);
    CHECK_FALSE(far.hoop_violated);
    CHECK(far.ratio_exceeds_pi);  // the ratio certificate is mass-independent
}
