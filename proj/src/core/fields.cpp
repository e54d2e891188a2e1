/// @file fields.cpp
/// @brief Field containers, round operators, and conformal-metric caches.

#include "core/fields.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace horizon {

ScalarField::ScalarField(GridPtr g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != static_cast<size_t>(grid->nodes()))
        throw input_error("ScalarField: value count does not match grid");
}

Coeffs sh_analyze(const ScalarField& f) { return sht_analyze(*f.grid, f.values, f.grid->L); }

Coeffs sh_analyze(const ScalarField& f, int L) { return sht_analyze(*f.grid, f.values, L); }

ScalarField sh_synthesize(GridPtr g, const Coeffs& a) {
    std::vector<double> v = sht_synthesize(*g, a);
    return ScalarField(std::move(g), std::move(v));
}

ScalarField laplace_round(const ScalarField& f) {
    Coeffs a = laplacian_coeffs(sh_analyze(f));
    return sh_synthesize(f.grid, a);
}

TangentField grad_round(const ScalarField& f) {
    Coeffs a = sh_analyze(f);
    TangentField X(f.grid);
    synth_gradient(*f.grid, a, X.comp_theta, X.comp_phi);
    return X;
}

ScalarField div_round(const TangentField& X) {
    Coeffs b = weak_divergence(*X.grid, X.comp_theta, X.comp_phi, X.grid->L);
    return sh_synthesize(X.grid, b);
}

double integrate_round(const ScalarField& f) {
    const SphereGrid& g = *f.grid;
    double s = 0.0;
    for (int i = 0; i < g.nlat; ++i) {
        double row = 0.0;
        const double* r = f.values.data() + static_cast<size_t>(i) * g.nlon;
        for (int j = 0; j < g.nlon; ++j) row += r[j];
        s += g.weight(i) * row;
    }
    return s;
}

ConformalMetric::ConformalMetric(const Coeffs& w_coeffs) : w_(w_coeffs) {
    base_ = make_grid(w_.L >= 1 ? w_.L : 1);
    fine_ = make_grid(2 * base_->L);
    finish();
}

ConformalMetric::ConformalMetric(GridPtr g, const std::vector<double>& w_values)
    : w_(sht_analyze(*g, w_values, g->L)), base_(std::move(g)) {
    fine_ = make_grid(2 * base_->L);
    finish();
}

void ConformalMetric::finish() {
    Coeffs wb = w_.resized(base_->L);  // pad degree-0-only inputs up to the base bandlimit
    w_base_ = sht_synthesize(*base_, wb);
    w_fine_ = sht_synthesize(*fine_, wb);
    lap_w_fine_ = sht_synthesize(*fine_, laplacian_coeffs(wb));
    e2w_fine_.resize(w_fine_.size());
    for (size_t k = 0; k < w_fine_.size(); ++k) {
        e2w_fine_[k] = std::exp(2.0 * w_fine_[k]);
        if (!std::isfinite(e2w_fine_[k])) throw numeric_error("ConformalMetric: e^{2w} overflow");
    }
    const SphereGrid& g = *fine_;
    double a = 0.0;
    for (int i = 0; i < g.nlat; ++i) {
        double row = 0.0;
        const double* r = e2w_fine_.data() + static_cast<size_t>(i) * g.nlon;
        for (int j = 0; j < g.nlon; ++j) row += r[j];
        a += g.weight(i) * row;
    }
    area_ = a;
    if (!(area_ > 0.0)) throw numeric_error("ConformalMetric: non-positive area");
}

double ConformalMetric::integrate_fine(const std::vector<double>& f_fine) const {
    const SphereGrid& g = *fine_;
    if (f_fine.size() != static_cast<size_t>(g.nodes()))
        throw input_error("integrate_fine: sample count does not match fine grid");
    double s = 0.0;
    for (int i = 0; i < g.nlat; ++i) {
        double row = 0.0;
        const double* fr = f_fine.data() + static_cast<size_t>(i) * g.nlon;
        const double* er = e2w_fine_.data() + static_cast<size_t>(i) * g.nlon;
        for (int j = 0; j < g.nlon; ++j) row += fr[j] * er[j];
        s += g.weight(i) * row;
    }
    return s;
}

double ConformalMetric::integrate(const ScalarField& f) const {
    if (f.grid != base_) throw input_error("integrate: field not on the metric's base grid");
    Coeffs a = sh_analyze(f);
    std::vector<double> ff = sht_synthesize(*fine_, a.resized(fine_->L));
    return integrate_fine(ff);
}

ScalarField ConformalMetric::gauss_curvature() const {
    Coeffs wb = w_.resized(base_->L);
    std::vector<double> lap = sht_synthesize(*base_, laplacian_coeffs(wb));
    ScalarField K(base_);
    for (size_t k = 0; k < K.size(); ++k)
        K.values[k] = std::exp(-2.0 * w_base_[k]) * (1.0 - lap[k]);
    return K;
}

std::vector<double> ConformalMetric::gauss_curvature_fine() const {
    std::vector<double> K(w_fine_.size());
    for (size_t k = 0; k < K.size(); ++k)
        K[k] = (1.0 - lap_w_fine_[k]) / e2w_fine_[k];
    return K;
}

double ConformalMetric::negative_curvature_integral() const {
    // (K)_- dA_g = max{0, Δ*w - 1} dA*: the conformal factor cancels exactly.
    const SphereGrid& g = *fine_;
    double s = 0.0;
    for (int i = 0; i < g.nlat; ++i) {
        double row = 0.0;
        const double* lr = lap_w_fine_.data() + static_cast<size_t>(i) * g.nlon;
        for (int j = 0; j < g.nlon; ++j) row += std::max(0.0, lr[j] - 1.0);
        s += g.weight(i) * row;
    }
    return s;
}

} // namespace horizon
