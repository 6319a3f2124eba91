#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace subdiff {

/// Tridiagonal system A x = rhs with n = diag.size() unknowns.
/// sub[i] multiplies x_i in row i+1, super[i] multiplies x_{i+1} in row i,
/// so both off-diagonals have length n - 1 (empty for n = 1).
struct TridiagonalSystem {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;
    std::vector<double> rhs;
};

/// Solve a tridiagonal system by the Thomas algorithm (no pivoting).
///
/// Every matrix assembled by the mode solver is strictly diagonally
/// dominant, for which the elimination is stable; a vanishing pivot still
/// raises std::runtime_error rather than propagating garbage.
inline std::vector<double> thomas_solve(const TridiagonalSystem& sys) {
    const std::size_t n = sys.diag.size();
    if (n == 0) throw std::invalid_argument("thomas_solve: empty system");
    if (sys.sub.size() != n - 1 || sys.super.size() != n - 1 || sys.rhs.size() != n)
        throw std::invalid_argument("thomas_solve: inconsistent band sizes");

    std::vector<double> c(n - 1), x(n);
    double pivot = sys.diag[0];
    if (std::fabs(pivot) < 1e-300) throw std::runtime_error("thomas_solve: zero pivot at row 0");
    x[0] = sys.rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        c[i - 1] = sys.super[i - 1] / pivot;
        pivot = sys.diag[i] - sys.sub[i - 1] * c[i - 1];
        if (std::fabs(pivot) < 1e-300)
            throw std::runtime_error("thomas_solve: zero pivot at row " + std::to_string(i));
        x[i] = (sys.rhs[i] - sys.sub[i - 1] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
    return x;
}

} // namespace subdiff
