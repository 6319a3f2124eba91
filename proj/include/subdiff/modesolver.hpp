#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "subdiff/fields.hpp"
#include "subdiff/fracops.hpp"
#include "subdiff/tridiag.hpp"

namespace subdiff {

/// Advance one sine mode u_k by a single implicit L1 step.
///
/// The mode satisfies D^alpha u - u_xx + lambda_k u = r with homogeneous
/// Dirichlet data in x. With the L1 weights b_j and
/// sigma = 1 / (Gamma(2-alpha) dt^alpha) the discrete derivative rearranges
/// to
///
///   D^alpha u(t_m) ~ sigma * (u^m - sum_{j=1}^{m-1} (b_{j-1}-b_j) u^{m-j}
///                                  - b_{m-1} u^0),
///
/// so each step solves a constant tridiagonal system with diagonal
/// sigma + 2/dx^2 + lambda_k: strictly diagonally dominant for any step
/// sizes. The right-hand side is evaluated at the new time level, which is
/// why no source value at t = 0 is ever needed.
///
/// Reads rows 0..m-1 of field.values and returns row m (boundary entries
/// zero). rhs_m holds r(t_m, x_j) for all j; its boundary entries are
/// ignored.
inline std::vector<double> step_mode(const ModeField& field, int m,
                                     std::span<const double> rhs_m, double alpha) {
    const int nt = field.tg.nt;
    const int nx = field.sg.nx;
    if (m < 1 || m >= nt) throw std::invalid_argument("step_mode: m out of range");
    if (static_cast<int>(rhs_m.size()) != nx)
        throw std::invalid_argument("step_mode: rhs length does not match grid");

    const std::vector<double> b = l1_weights(alpha, m);
    const double dt = field.tg.dt();
    const double dx = field.sg.dx();
    const double sigma = 1.0 / (std::tgamma(2.0 - alpha) * std::pow(dt, alpha));
    const double lambda = field.lambda();

    // History term sigma * (sum_j (b_{j-1}-b_j) u^{m-j} + b_{m-1} u^0) at the
    // interior nodes, accumulated row by row so the inner loop stays dense.
    std::vector<double> hist(static_cast<std::size_t>(nx), 0.0);
    for (int j = 1; j < m; ++j) {
        const double dj = b[static_cast<std::size_t>(j - 1)] - b[static_cast<std::size_t>(j)];
        const double* row = field.values.row(static_cast<std::size_t>(m - j));
        for (int i = 1; i < nx - 1; ++i) hist[static_cast<std::size_t>(i)] += dj * row[i];
    }
    {
        const double bm = b[static_cast<std::size_t>(m - 1)];
        const double* row0 = field.values.row(0);
        for (int i = 1; i < nx - 1; ++i) hist[static_cast<std::size_t>(i)] += bm * row0[i];
    }

    const std::size_t n = static_cast<std::size_t>(nx - 2);
    TridiagonalSystem sys;
    sys.sub.assign(n - 1, -1.0 / (dx * dx));
    sys.super.assign(n - 1, -1.0 / (dx * dx));
    sys.diag.assign(n, sigma + 2.0 / (dx * dx) + lambda);
    sys.rhs.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        sys.rhs[i] = rhs_m[i + 1] + sigma * hist[i + 1];

    const std::vector<double> interior = thomas_solve(sys);
    std::vector<double> out(static_cast<std::size_t>(nx), 0.0);
    for (std::size_t i = 0; i < n; ++i) out[i + 1] = interior[i];
    return out;
}

/// Solve one sine mode over the whole time grid.
///
/// phi_k is the initial profile (its boundary entries are forced to zero);
/// rhs is an (nt x nx) table of the source, of which only rows 1..nt-1 are
/// read. Cost is O(nt^2 nx) from the L1 history.
inline ModeField solve_mode(int k, std::span<const double> phi_k, const Array2D& rhs,
                            const TimeGrid& tg, const SpaceGrid& sg, double alpha) {
    if (static_cast<int>(phi_k.size()) != sg.nx)
        throw std::invalid_argument("solve_mode: phi length does not match grid");
    if (static_cast<int>(rhs.rows()) != tg.nt || static_cast<int>(rhs.cols()) != sg.nx)
        throw std::invalid_argument("solve_mode: rhs shape does not match grids");

    ModeField field(k, tg, sg);
    for (int i = 1; i < sg.nx - 1; ++i)
        field.values(0, static_cast<std::size_t>(i)) = phi_k[static_cast<std::size_t>(i)];
    for (int m = 1; m < tg.nt; ++m) {
        const std::vector<double> row = step_mode(
            field, m, std::span<const double>(rhs.row(static_cast<std::size_t>(m)),
                                              static_cast<std::size_t>(sg.nx)),
            alpha);
        double* dst = field.values.row(static_cast<std::size_t>(m));
        for (int i = 0; i < sg.nx; ++i) dst[static_cast<std::size_t>(i)] = row[static_cast<std::size_t>(i)];
    }
    return field;
}

} // namespace subdiff
