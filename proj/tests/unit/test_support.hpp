/// @file test_support.hpp
/// @brief Shared helpers for unit tests: QoI formatting and seeded random fields.

#pragma once

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "core/fields.hpp"
#include "doctest.h"

namespace horizon::test {

/// Format a quantity-of-interest line: "(val=X, thr=Y)".
inline std::string qoi(double value, double threshold) {
    std::ostringstream ss;
    ss << std::scientific << std::setprecision(3);
    ss << "(val=" << value << ", thr=" << threshold << ")";
    return ss.str();
}

/// Print one QoI line and enforce the threshold as an upper bound.
inline void report(const std::string& name, double value, double threshold) {
    std::cout << "  " << std::left << std::setw(44) << name << qoi(value, threshold) << "\n";
    CHECK(value <= threshold);
}

/// Print one QoI line and enforce the threshold as a lower bound.
inline void report_at_least(const std::string& name, double value, double threshold) {
    std::cout << "  " << std::left << std::setw(44) << name << qoi(value, threshold) << "\n";
    CHECK(value >= threshold);
}

/// Random band-limited coefficients with mild spectral decay, deterministic per seed.
inline Coeffs random_coeffs(int L, uint64_t seed, double amplitude = 0.3) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Coeffs a(L);
    for (int l = 0; l <= L; ++l) {
        double decay = std::exp(-static_cast<double>(l) / 8.0);
        for (int m = -l; m <= l; ++m) a.at(l, m) = amplitude * decay * uni(rng);
    }
    return a;
}

/// Random zonal (m = 0 only) coefficients.
inline Coeffs random_zonal_coeffs(int L, uint64_t seed, double amplitude = 0.3) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Coeffs a(L);
    for (int l = 0; l <= L; ++l) a.at(l, 0) = amplitude * std::exp(-static_cast<double>(l) / 8.0) * uni(rng);
    return a;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

inline double max_abs(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

} // namespace horizon::test
