/// @file test_zoo.cpp
/// @brief Certified conformal perturbations with large negative curvature:
///        the zonal profile oracle, the openness-margin certificate, the
///        exact negative-part integrals with their closed-form lower bound,
///        and the density sweep.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <vector>

#include "core/errors.hpp"
#include "core/fields.hpp"
#include "core/stability.hpp"
#include "core/zoo.hpp"
#include "test_support.hpp"

using namespace horizon;
using horizon::test::report;
using horizon::test::report_at_least;

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

TEST_CASE("zonal profile: closed-form value, gradient, laplacian") {
    const int n = 8, L = 32;
    Coeffs h = zonal_cos_profile(n, L);
    CHECK(is_zonal(h));

    auto grid = make_grid(L + 5);
    std::vector<double> vals = sht_synthesize(*grid, h);
    std::vector<double> gt, gp;
    synth_gradient(*grid, h, gt, gp);
    std::vector<double> lap = sht_synthesize(*grid, laplacian_coeffs(h));

    double dev_v = 0.0, dev_g = 0.0, dev_l = 0.0;
    for (int i = 0; i < grid->nlat; ++i) {
        double th = grid->theta[i];
        double v_ref = -std::cos(n * th) / n;
        double g_ref = std::sin(n * th);
        double l_ref = n * std::cos(n * th) +
                       std::sin(n * th) * std::cos(th) / std::sin(th);
        for (int j = 0; j < grid->nlon; ++j) {
            int k = grid->node(i, j);
            dev_v = std::max(dev_v, std::abs(vals[k] - v_ref));
            dev_g = std::max(dev_g, std::abs(gt[k] - g_ref));
            dev_g = std::max(dev_g, std::abs(gp[k]));
            dev_l = std::max(dev_l, std::abs(lap[k] - l_ref));
        }
    }
    report("zonal profile value", dev_v, 1e-13);
    report("zonal profile gradient", dev_g, 1e-12);
    report("zonal profile laplacian", dev_l, 1e-10);

    CHECK_THROWS_AS(zonal_cos_profile(0, 8), input_error);
    CHECK_THROWS_AS(zonal_cos_profile(9, 8), input_error);
}

TEST_CASE("openness margin: closed forms and eigen cross-check") {
    Coeffs zero(0);

    // Round base with the trivial certificate: Q_0 0 = 1 everywhere.
    report("round self margin", std::abs(openness_margin(zero, zero, zero) - 1.0),
           1e-14);

    // v = phi = 0: margin = 1 - sup|grad w|^2; for w = alpha*h the uniform
    // route gives exactly 1 - alpha^2, and the exact margin lies between.
    const double alpha = 0.3;
    Coeffs h = zonal_cos_profile(4, 24);
    Coeffs w(24);
    for (std::size_t k = 0; k < w.c.size(); ++k) w.c[k] = alpha * h.c[k];
    double uniform = openness_margin_uniform(zero, zero, alpha);
    report("uniform margin closed form", std::abs(uniform - (1.0 - alpha * alpha)),
           1e-14);
    double exact = openness_margin(zero, w, zero);
    CHECK(exact >= uniform);
    report("exact vs uniform margin gap", exact - uniform, 1e-3);

    // Self-margin with a certificate from the eigenpair: equals min Q_v phi.
    Coeffs v = horizon::test::random_coeffs(8, 917u, 0.02);
    ConformalMetric gv(v);
    MembershipCertificate mc = certificate_from_eigenpair(gv);
    Coeffs phi = sh_analyze(mc.phi);
    double self = openness_margin(v, v, phi);
    CHECK(self > 0.0);
    // Coarse consistency only: the certificate field is not band-limited,
    // so differently oversampled grids see slightly different minima.
    report("self margin vs certificate minimum", std::abs(self - mc.min_Q),
           2e-2);

    CHECK_THROWS_AS(openness_margin_uniform(zero, zero, 0.0), input_error);
}

TEST_CASE("zoo metric: certification, stability, degenerate amplitude") {
    ZooSpec spec;
    spec.alpha = 0.3;
    spec.n = 8;
    ZooMetric zm = zoo_metric(spec);
    CHECK(zm.shrinks == 0);
    CHECK(zm.spec.alpha == 0.3);
    report("round-base margin", std::abs(zm.margin - (1.0 - 0.3 * 0.3)), 1e-14);
    CHECK(is_zonal(zm.g.w_coeffs()));
    CHECK(zm.g.bandlimit() == 2 * 8 + 16);
    CHECK(is_in_M_plus(zm.g));

    // The exact n-specific margin can only improve on the uniform one.
    Coeffs zero(0);
    double exact = openness_margin(spec.v, zm.g.w_coeffs(), zero);
    CHECK(exact >= zm.margin);

    // Degenerate amplitude: the base metric back, curvature all positive.
    ZooSpec flat;
    flat.alpha = 0.0;
    flat.n = 8;
    ZooMetric zf = zoo_metric(flat);
    CHECK(zf.spec.alpha == 0.0);
    report("degenerate margin", std::abs(zf.margin - 1.0), 1e-14);
    NegativePartReport rf = negative_part_report(zf);
    CHECK(rf.negative_integral == 0.0);
    report("degenerate positive integral", std::abs(rf.positive_integral - 4.0 * kPi),
           1e-10);
    CHECK(rf.c1_distance == 0.0);

    // A base factor with visible gradients forces the amplitude down.
    ZooSpec hard;
    hard.v = Coeffs(16);
    Coeffs h2 = zonal_cos_profile(2, 16);
    for (std::size_t k = 0; k < hard.v.c.size(); ++k)
        hard.v.c[k] = 0.8 * h2.c[k];
    hard.alpha = 0.95;
    hard.n = 8;
    ZooMetric zh = zoo_metric(hard);
    CHECK(zh.margin > 0.0);
    CHECK(zh.spec.alpha == 0.95 * std::ldexp(1.0, -zh.shrinks));
    CHECK(is_in_M_plus(zh.g));
    std::printf("  forced shrinks: %d (alpha %.6f, margin %.3e)\n", zh.shrinks,
                zh.spec.alpha, zh.margin);

    ZooSpec bad;
    bad.alpha = -0.1;
    CHECK_THROWS_AS(zoo_metric(bad), input_error);
    bad.alpha = 1.0;
    CHECK_THROWS_AS(zoo_metric(bad), input_error);
    bad.alpha = 0.25;
    bad.n = 0;
    CHECK_THROWS_AS(zoo_metric(bad), input_error);
}

TEST_CASE("negative part sweep: monotone, bounded below, gauss-bonnet") {
    const double alpha = 0.25;
    double prev = -1.0, first_margin = 0.0;
    bool exceeded_one = false, exceeded_ten = false;
    for (int n : {8, 16, 32, 64}) {
        ZooSpec spec;
        spec.alpha = alpha;
        spec.n = n;
        ZooMetric zm = zoo_metric(spec);
        CHECK(zm.spec.alpha == alpha);
        if (n == 8)
            first_margin = zm.margin;
        else
            CHECK(zm.margin == first_margin);  // n never enters the margin

        NegativePartReport r = negative_part_report(zm);
        std::printf(
            "  n=%2d: lambda1=%.6f  integral=%.6f  bound=%.6f  mu=%.6f  "
            "Lambda=%.6f\n",
            n, r.lambda1, r.negative_integral, r.bound, r.mu, r.Lambda);

        CHECK(r.lambda1 > 0.0);
        CHECK(r.negative_integral > prev);
        prev = r.negative_integral;
        exceeded_one = exceeded_one || r.negative_integral > 1.0;
        exceeded_ten = exceeded_ten || r.negative_integral > 10.0;

        CHECK(r.mu > 0.0);
        CHECK(r.Lambda >= 1.0 - 1e-12);
        CHECK(r.Lambda <= 1.0 + alpha / std::sqrt(3.0) + 1e-12);
        if (r.bound > 0.0) CHECK(r.negative_integral >= r.bound);

        double gb = r.positive_integral - r.negative_integral;
        report("gauss-bonnet split", std::abs(gb - 4.0 * kPi), 1e-7);

        // Dual route: clamped fine-grid quadrature of the same density.
        double clamp = zm.g.negative_curvature_integral();
        report("zonal vs clamped integral",
               std::abs(clamp - r.negative_integral),
               0.02 * std::max(1.0, r.negative_integral));

        CHECK(r.c1_distance == alpha * (1.0 + 1.0 / n));
    }
    CHECK(exceeded_one);
    CHECK(exceeded_ten);

    // n = 1: the plateau set misses D entirely, so mu = 0 and the bound
    // degenerates while the metric stays certified.
    ZooSpec low;
    low.alpha = alpha;
    low.n = 1;
    NegativePartReport r1 = negative_part_report(low);
    CHECK(r1.mu == 0.0);
    CHECK(r1.bound <= 0.0);
    CHECK(r1.lambda1 > 0.0);
}

TEST_CASE("density demo: targets met at fixed amplitude") {
    Coeffs zero(0);
    DensityResult r1 = density_demo(zero, 1.0, 0.25);
    CHECK(r1.spec.alpha == 0.25);
    CHECK(r1.integral >= 1.0);
    CHECK(r1.c1_distance == 0.25 * (1.0 + 1.0 / r1.spec.n));
    CHECK(r1.c1_distance <= 0.5);

    DensityResult r10 = density_demo(zero, 10.0, 0.25);
    CHECK(r10.spec.alpha == r1.spec.alpha);
    CHECK(r10.spec.n >= r1.spec.n);
    CHECK(r10.integral >= 10.0);
    std::printf("  c=1 -> n=%d (integral %.3f); c=10 -> n=%d (integral %.3f)\n",
                r1.spec.n, r1.integral, r10.spec.n, r10.integral);

    CHECK_THROWS_AS(density_demo(zero, 0.0, 0.25), input_error);
    CHECK_THROWS_AS(density_demo(zero, 1.0, 0.0), input_error);
    CHECK_THROWS_AS(density_demo(zero, 1.0, 1.0), input_error);
}
