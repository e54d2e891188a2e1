#pragma once
/// @file numerics.hpp
/// @brief One-dimensional numerical kernels shared by the cylinder modules:
///        finite-difference weights on arbitrary nodes (Fornberg's algorithm),
///        sliding-stencil differentiation of time-sampled series, and
///        barycentric Lagrange interpolation on a fixed node set.
///
/// PURPOSE: the collar and extension modules differentiate and interpolate
/// quantities sampled on non-uniform (Chebyshev-clustered) time grids.  These
/// kernels keep that calculus in one place with the weights precomputed once
/// per node set.

#include <Eigen/Dense>
#include <vector>

namespace horizon {

/// Finite-difference weights at evaluation point z for derivative orders
/// 0..max_order on the given (distinct, otherwise arbitrary) nodes.
/// Returns an n×(max_order+1) matrix W with f^(m)(z) ≈ Σ_j W(j,m)·f(nodes[j]).
/// Throws input_error for fewer than max_order+1 nodes or repeated nodes.
Eigen::MatrixXd fd_weights(double z, const std::vector<double>& nodes, int max_order);

/// First and second derivatives of series sampled on a fixed node set, using a
/// sliding stencil of `width` nodes centred (as far as the ends allow) on the
/// evaluation node.  Width 8 gives sixth-order second derivatives on smooth
/// data; all weights are precomputed at construction.
class StencilDerivatives {
public:
    explicit StencilDerivatives(std::vector<double> times, int width = 8);

    int size() const { return static_cast<int>(times_.size()); }
    const std::vector<double>& times() const { return times_; }

    /// Derivative of order m ∈ {1,2} of the sampled series at node k.
    double derivative(const std::vector<double>& samples, int k, int m) const;

private:
    std::vector<double> times_;
    int width_ = 0;
    std::vector<int> start_;              // first stencil node per evaluation node
    std::vector<Eigen::MatrixXd> w_;      // per node: width × 3 weights
};

/// Barycentric Lagrange interpolation (second form) on a fixed node set.
/// Exact at the nodes; weights are raw products, adequate for the ≤ 200-node
/// Chebyshev-clustered sets used here.
class BarycentricInterpolant {
public:
    explicit BarycentricInterpolant(std::vector<double> nodes);

    const std::vector<double>& nodes() const { return nodes_; }

    /// Interpolate samples (one value per node) at t.
    double eval(const std::vector<double>& samples, double t) const;

private:
    std::vector<double> nodes_, weights_;
};

} // namespace horizon
