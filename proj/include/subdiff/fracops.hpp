#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "subdiff/grids.hpp"

namespace subdiff {

/// L1 convolution weights b_j = (j+1)^{1-alpha} - j^{1-alpha}, j = 0..m-1.
///
/// The weights are positive, strictly decreasing and sum telescopically to
/// m^{1-alpha}; b_0 is exactly 1. Requires alpha in (0, 1) and m >= 1.
inline std::vector<double> l1_weights(double alpha, int m) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("l1_weights: alpha must lie in (0, 1)");
    if (m < 1) throw std::invalid_argument("l1_weights: m must be at least 1");
    std::vector<double> b(static_cast<std::size_t>(m));
    const double e = 1.0 - alpha;
    double prev = 0.0;  // j^{1-alpha} carried between iterations
    for (int j = 0; j < m; ++j) {
        const double next = std::pow(static_cast<double>(j + 1), e);
        b[static_cast<std::size_t>(j)] = next - prev;
        prev = next;
    }
    return b;
}

/// Caputo derivative of order alpha in (0, 1) by the L1 scheme on a uniform
/// grid. v holds nodal values v(t_i), i = 0..nt-1.
///
/// Returns a vector of the same length; entry m >= 1 approximates
/// D^alpha v(t_m) with truncation error O(dt^{2-alpha}) for v in C^2. The
/// derivative is not defined by the scheme at t = 0, so entry 0 is NaN and
/// must not be consumed downstream.
inline std::vector<double> caputo_l1(std::span<const double> v, const TimeGrid& grid,
                                     double alpha) {
    if (static_cast<int>(v.size()) != grid.nt)
        throw std::invalid_argument("caputo_l1: v length does not match grid");
    const std::vector<double> b = l1_weights(alpha, grid.nt - 1);
    const double scale =
        1.0 / (std::tgamma(2.0 - alpha) * std::pow(grid.dt(), alpha));
    std::vector<double> out(v.size());
    out[0] = std::numeric_limits<double>::quiet_NaN();
    for (int m = 1; m < grid.nt; ++m) {
        double acc = 0.0;
        for (int j = 0; j < m; ++j)
            acc += b[static_cast<std::size_t>(j)] * (v[static_cast<std::size_t>(m - j)] -
                                                     v[static_cast<std::size_t>(m - j - 1)]);
        out[static_cast<std::size_t>(m)] = scale * acc;
    }
    return out;
}

/// Riemann-Liouville integral J^alpha v on a uniform grid, alpha in (0, 1].
///
/// Product-trapezoidal rule: v is replaced by its piecewise-linear
/// interpolant and the kernel moment on each cell is integrated exactly, so
/// the rule is exact for piecewise-linear data and O(dt^2) for smooth v.
/// Entry 0 is exactly 0.
inline std::vector<double> rl_integral(std::span<const double> v, const TimeGrid& grid,
                                       double alpha) {
    if (!(alpha > 0.0) || !(alpha <= 1.0))
        throw std::invalid_argument("rl_integral: alpha must lie in (0, 1]");
    if (static_cast<int>(v.size()) != grid.nt)
        throw std::invalid_argument("rl_integral: v length does not match grid");
    const double dt = grid.dt();
    const double inv_gamma = 1.0 / std::tgamma(alpha);
    std::vector<double> out(v.size(), 0.0);
    // Precompute i^alpha and i^{alpha+1} once; cell j of the integral to t_m
    // only needs them at i = m - j and m - j - 1.
    std::vector<double> pa(v.size()), pa1(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        pa[i] = std::pow(static_cast<double>(i), alpha);
        pa1[i] = pa[i] * static_cast<double>(i);
    }
    const double da = std::pow(dt, alpha);
    for (int m = 1; m < grid.nt; ++m) {
        double acc = 0.0;
        for (int j = 0; j < m; ++j) {
            // kernel moments over [t_j, t_{j+1}] with s = t_m - tau
            const double A = pa[static_cast<std::size_t>(m - j)];
            const double B = pa[static_cast<std::size_t>(m - j - 1)];
            const double A1 = pa1[static_cast<std::size_t>(m - j)];
            const double B1 = pa1[static_cast<std::size_t>(m - j - 1)];
            const double m0 = (A - B) / alpha;                        // /dt^alpha
            const double m1 = (m - j) * m0 - (A1 - B1) / (alpha + 1.0);
            const double vj = v[static_cast<std::size_t>(j)];
            const double dv = v[static_cast<std::size_t>(j + 1)] - vj;
            acc += vj * m0 + dv * m1;
        }
        out[static_cast<std::size_t>(m)] = inv_gamma * da * acc;
    }
    return out;
}

} // namespace subdiff
