/// @file test_extension.cpp
/// @brief End-to-end Schwarzschild extension of a stable horizon: the
///        feasibility search, the glued manifold's verification report,
///        Penrose-bound rejection, fault injection, and the Bartnik
///        bracket entry point.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <cstdio>
#include <string>

#include "core/errors.hpp"
#include "core/extension.hpp"
#include "core/fields.hpp"
#include "core/profile.hpp"
#include "test_support.hpp"

using namespace horizon;
using horizon::test::report;
using horizon::test::report_at_least;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::array<bool, 6> flags(const VerificationReport& r) {
    return {r.pass_collar_positivity, r.pass_neck_positivity, r.pass_tail,
            r.pass_boundary,          r.pass_foliation,       r.pass_penrose};
}

}  // namespace

TEST_CASE("hawking mass closed forms and guards") {
    CHECK(std::abs(hawking_mass(16.0 * kPi) - 1.0) <= 1e-15);
    CHECK(std::abs(hawking_mass(4.0 * kPi) - 0.5) <= 1e-15);
    double croke_area = 2.0 * std::sqrt(3.0);
    CHECK(std::abs(hawking_mass(croke_area) -
                   std::sqrt(croke_area / (16.0 * kPi))) <= 1e-15);
    CHECK_THROWS_AS(hawking_mass(0.0), input_error);
    CHECK_THROWS_AS(hawking_mass(-1.0), input_error);

    ExtensionManifold empty;
    CHECK_THROWS_AS(adm_mass(empty), input_error);
    CHECK_THROWS_AS(verify(empty), input_error);

    ConformalMetric g(Coeffs(8));
    CHECK_THROWS_AS(bartnik_mass_estimate(g, 0.0), input_error);
    CHECK_THROWS_AS(bartnik_mass_estimate(g, -0.1), input_error);
}

TEST_CASE("round horizon: rejection, build, report, fault injection") {
    ConformalMetric g(Coeffs(8));
    const double mH = hawking_mass(g.area());
    CHECK(std::abs(mH - 0.5) <= 1e-12);

    // Masses at or below the Hawking bound are rejected before any
    // construction starts, with the Penrose margin in the message.
    CHECK_THROWS_AS(build_extension(g, mH), input_error);
    CHECK_THROWS_AS(build_extension(g, 0.49), input_error);
    CHECK_THROWS_AS(build_extension(g, 0.3), input_error);
    try {
        build_extension(g, mH);
        CHECK(false);
    } catch (const input_error& e) {
        std::string msg = e.what();
        CHECK(msg.find("mass too small") != std::string::npos);
        CHECK(msg.find("Penrose margin") != std::string::npos);
    }

    ExtensionManifold ext = build_extension(g, 0.55);

    // Bookkeeping: the requested mass is carried exactly, the junction data
    // match the hand-computed feasibility walk (first probe accepted).
    CHECK(adm_mass(ext) == 0.55);
    report("area deviation from 4*pi", std::abs(ext.area - 4.0 * kPi), 1e-10);
    report("round radius deviation", std::abs(ext.rho - 1.0), 1e-10);
    CHECK(ext.T == ext.A0 / std::sqrt(ext.area));
    CHECK(ext.s0 == 0.5 * 0.55);
    CHECK(ext.delta == 0.25 * ext.s0);
    CHECK(ext.eps_star > 0.0);
    CHECK(ext.eps_star <= ext.eps0);
    REQUIRE(!ext.schedule.empty());
    CHECK(ext.schedule.back().outcome == "accepted");
    report("neck start vs half frozen tail", std::abs(ext.neck.a() - 0.5 * ext.T),
           1e-12);
    CHECK(ext.neck.b() == ext.tail_start);
    CHECK(ext.tail_end > ext.tail_start);
    CHECK(ext.tail_shift > 0.0);

    VerificationReport r = verify(ext);
    CHECK(r.pass_collar_positivity);
    CHECK(r.pass_neck_positivity);
    CHECK(r.pass_tail);
    CHECK(r.pass_boundary);
    CHECK(r.pass_foliation);
    CHECK(r.pass_penrose);
    CHECK(r.pass());

    report_at_least("collar min curvature", r.min_R_collar, 1e-3);
    report_at_least("neck min margin (band)", r.min_margin_neck, -1e-10);
    report("tail flatness", r.max_abs_R_tail, 1e-8);
    report("tail exactness", r.tail_exactness, 1e-10);
    report("boundary residual", r.boundary_residual, 1e-6);
    report("boundary mean curvature", r.h0_residual, 1e-6);
    report_at_least("interior mean curvature", r.min_interior_H, 1e-5);
    report("boundary second form", r.second_form_residual, 1e-10);
    report("junction value jump", r.junction_value_jump, 1e-12);
    report("junction slope jump", r.junction_slope_jump, 1e-12);
    report("collar/neck curvature consistency", r.collar_neck_consistency,
           1e-6);
    report("hawking mass deviation", std::abs(r.hawking - 0.5), 1e-12);
    CHECK(r.adm == 0.55);
    report("penrose margin vs closed form",
           std::abs(r.penrose_margin - (16.0 * kPi * 0.55 * 0.55 - ext.area)),
           1e-12);

    const auto base = flags(r);

    // Fault (a): a second-derivative spike inside the glue bridge.  The
    // finite-difference gate only ties f to f', so the corruption survives
    // validation and must flip exactly the neck-positivity flag.
    {
        ExtensionManifold spiked = ext;
        double zl = ext.T - 0.125 * ext.T;
        std::size_t idx = 0;
        while (idx < spiked.neck.size() && spiked.neck.s[idx] < zl) ++idx;
        REQUIRE(idx + 3 < spiked.neck.size());
        idx += 3;
        spiked.neck.fpp[idx] += 50.0;
        VerificationReport rs = verify(spiked);
        CHECK(!rs.pass_neck_positivity);
        CHECK(rs.min_margin_neck < -1.0);
        auto fs = flags(rs);
        for (int i = 0; i < 6; ++i)
            if (i != 1) CHECK(fs[i] == base[i]);
        CHECK(rs.boundary_residual == r.boundary_residual);
        CHECK(rs.tail_exactness == r.tail_exactness);
        CHECK(rs.junction_value_jump == r.junction_value_jump);
        CHECK(rs.junction_slope_jump == r.junction_slope_jump);
    }

    // Fault (b): claimed tail mass pushed below the Hawking bound.  The
    // Penrose flag flips, and the stored tail no longer matches the claimed
    // Schwarzschild curve (the exactness check is mass-linked); the regions
    // that do not reference the mass are untouched.
    {
        ExtensionManifold undermass = ext;
        undermass.tail_mass = 0.8 * r.hawking;
        VerificationReport ru = verify(undermass);
        CHECK(!ru.pass_penrose);
        CHECK(ru.penrose_margin < 0.0);
        CHECK(ru.adm < ru.hawking);
        CHECK(!ru.pass_tail);
        CHECK(ru.tail_exactness > 1e-2);
        CHECK(ru.max_abs_R_tail <= 1e-8);
        CHECK(ru.pass_collar_positivity == base[0]);
        CHECK(ru.pass_neck_positivity == base[1]);
        CHECK(ru.pass_boundary == base[3]);
        CHECK(ru.pass_foliation == base[4]);
    }

    // Fault (c): horizon area inflated past 16*pi*m^2.  Only the Penrose
    // flag references the area, so exactly that flag flips.
    {
        ExtensionManifold inflated = ext;
        double m = ext.tail_mass;
        inflated.area = 16.0 * kPi * (1.1 * m) * (1.1 * m);
        VerificationReport ri = verify(inflated);
        CHECK(!ri.pass_penrose);
        CHECK(ri.hawking > ri.adm);
        auto fi = flags(ri);
        for (int i = 0; i < 6; ++i)
            if (i != 5) CHECK(fi[i] == base[i]);
    }
}

TEST_CASE("capped collar parameter and a heavier mass") {
    ConformalMetric g(Coeffs(8));
    ExtensionOptions capped;
    capped.eps0_cap = 0.1;
    ExtensionManifold ext = build_extension(g, 0.7, capped);

    CHECK(ext.eps0 == 0.1);
    CHECK(ext.eps_star > 0.0);
    CHECK(ext.eps_star <= 0.1);
    CHECK(adm_mass(ext) == 0.7);

    // The heavier mass forces at least one rejected junction probe before
    // the slope condition admits s0 (recorded in the schedule).
    REQUIRE(ext.schedule.size() >= 2);
    CHECK(ext.schedule.front().outcome ==
          "slope at s0 above the collar segment");
    CHECK(ext.schedule.back().outcome == "accepted");
    CHECK(ext.s0 < 0.5 * 0.7);

    VerificationReport r = verify(ext);
    CHECK(r.pass());
    report_at_least("capped interior mean curvature", r.min_interior_H, 1e-5);
    report("capped tail exactness", r.tail_exactness, 1e-10);
}

TEST_CASE("bartnik estimate: single-probe bracket") {
    ConformalMetric g(Coeffs(8));
    const double mH = hawking_mass(g.area());

    // rel_tol = 1 keeps only the opening probe at 2*mH, which must verify.
    BartnikEstimate est = bartnik_mass_estimate(g, 1.0);
    CHECK(std::abs(est.lower - mH) <= 1e-12);
    CHECK(est.upper == 2.0 * mH);
    REQUIRE(est.tested.size() == 1);
    CHECK(est.tested[0] == 2.0 * mH);
    REQUIRE(est.succeeded.size() == 1);
    CHECK(est.succeeded[0] == 1);
}
