/// @file numerics.cpp
/// @brief Fornberg finite-difference weights, sliding-stencil derivatives, and
///        barycentric interpolation.

#include "core/numerics.hpp"

#include "core/errors.hpp"

#include <algorithm>
#include <cmath>

namespace horizon {

Eigen::MatrixXd fd_weights(double z, const std::vector<double>& nodes, int max_order) {
    const int n = static_cast<int>(nodes.size());
    if (max_order < 0) throw input_error("fd_weights: negative derivative order");
    if (n < max_order + 1) throw input_error("fd_weights: stencil smaller than order + 1");

    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, max_order + 1);
    double c1 = 1.0;
    double c4 = nodes[0] - z;
    C(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, max_order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            if (c3 == 0.0) throw input_error("fd_weights: repeated node");
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
                C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k) C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
            C(j, 0) = c4 * C(j, 0) / c3;
        }
        c1 = c2;
    }
    return C;
}

StencilDerivatives::StencilDerivatives(std::vector<double> times, int width)
    : times_(std::move(times)) {
    const int n = static_cast<int>(times_.size());
    if (n < 3) throw input_error("StencilDerivatives: need at least 3 nodes");
    width_ = std::min(std::max(width, 3), n);
    start_.resize(n);
    w_.reserve(times_.size());
    for (int k = 0; k < n; ++k) {
        int s = std::clamp(k - (width_ - 1) / 2, 0, n - width_);
        start_[k] = s;
        std::vector<double> stencil(times_.begin() + s, times_.begin() + s + width_);
        w_.push_back(fd_weights(times_[k], stencil, 2));
    }
}

double StencilDerivatives::derivative(const std::vector<double>& samples, int k, int m) const {
    if (samples.size() != times_.size()) throw input_error("StencilDerivatives: sample count mismatch");
    if (k < 0 || k >= size()) throw input_error("StencilDerivatives: node index out of range");
    if (m < 1 || m > 2) throw input_error("StencilDerivatives: derivative order must be 1 or 2");
    const Eigen::MatrixXd& W = w_[static_cast<size_t>(k)];
    double acc = 0.0;
    for (int j = 0; j < width_; ++j) acc += W(j, m) * samples[static_cast<size_t>(start_[k] + j)];
    return acc;
}

BarycentricInterpolant::BarycentricInterpolant(std::vector<double> nodes)
    : nodes_(std::move(nodes)) {
    const size_t n = nodes_.size();
    if (n < 2) throw input_error("BarycentricInterpolant: need at least 2 nodes");
    weights_.assign(n, 1.0);
    for (size_t j = 0; j < n; ++j)
        for (size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            const double d = nodes_[j] - nodes_[i];
            if (d == 0.0) throw input_error("BarycentricInterpolant: repeated node");
            weights_[j] /= d;
        }
}

double BarycentricInterpolant::eval(const std::vector<double>& samples, double t) const {
    if (samples.size() != nodes_.size()) throw input_error("BarycentricInterpolant: sample count mismatch");
    double num = 0.0, den = 0.0;
    for (size_t j = 0; j < nodes_.size(); ++j) {
        if (t == nodes_[j]) return samples[j];
        const double r = weights_[j] / (t - nodes_[j]);
        num += r * samples[j];
        den += r;
    }
    return num / den;
}

} // namespace horizon
