#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "subdiff/fields.hpp"
#include "subdiff/grids.hpp"

namespace subdiff {

/// Truncated sine basis {sin(k y)}_{k=1..K} on (0, pi) together with its
/// quadrature grid.
///
/// Coefficients are computed by composite Simpson, which for products of
/// basis sines on a uniform grid inherits the exact discrete orthogonality
/// of the trapezoidal sums it is built from, provided no frequency aliases
/// the grid. The constructor therefore requires ny >= 8K + 1 (odd), well
/// clear of the Nyquist limit.
class SineBasis {
public:
    SineBasis(int K, int ny) : K_(K), yg_(ny) {
        if (K < 1) throw std::invalid_argument("SineBasis: K must be at least 1");
        if (ny < 8 * K + 1)
            throw std::invalid_argument(
                "SineBasis: ny must be at least 8K + 1 for reliable quadrature");
        table_ = Array2D(static_cast<std::size_t>(K), static_cast<std::size_t>(ny));
        for (int k = 1; k <= K; ++k) {
            double* row = table_.row(static_cast<std::size_t>(k - 1));
            row[0] = 0.0;
            row[ny - 1] = 0.0;  // sin(k pi) exactly, not to round-off
            for (int i = 1; i < ny - 1; ++i) row[i] = std::sin(k * yg_.y(i));
        }
        weights_.assign(static_cast<std::size_t>(ny), 0.0);
        const double h3 = yg_.dy() / 3.0;
        weights_[0] = h3;
        weights_[static_cast<std::size_t>(ny - 1)] = h3;
        for (int i = 1; i < ny - 1; ++i)
            weights_[static_cast<std::size_t>(i)] = (i % 2 == 1) ? 4.0 * h3 : 2.0 * h3;
    }

    int K() const { return K_; }
    const YGrid& ygrid() const { return yg_; }
    double lambda(int k) const { return static_cast<double>(k) * k; }

    /// Basis values sin(k y_i), k = 1..K (row k-1).
    const Array2D& table() const { return table_; }
    /// Simpson quadrature weights on the y-grid.
    const std::vector<double>& weights() const { return weights_; }

private:
    int K_;
    YGrid yg_;
    Array2D table_;
    std::vector<double> weights_;
};

/// Sine coefficients v_k = (2/pi) int_0^pi v(y) sin(k y) dy, k = 1..K,
/// from samples of v on the basis grid.
inline std::vector<double> sine_coefficients(std::span<const double> samples,
                                             const SineBasis& basis) {
    const int ny = basis.ygrid().ny;
    if (static_cast<int>(samples.size()) != ny)
        throw std::invalid_argument("sine_coefficients: sample count does not match grid");
    std::vector<double> coeffs(static_cast<std::size_t>(basis.K()));
    const std::vector<double>& w = basis.weights();
    for (int k = 1; k <= basis.K(); ++k) {
        const double* row = basis.table().row(static_cast<std::size_t>(k - 1));
        double acc = 0.0;
        for (int i = 0; i < ny; ++i) acc += w[static_cast<std::size_t>(i)] * row[i] * samples[static_cast<std::size_t>(i)];
        coeffs[static_cast<std::size_t>(k - 1)] = 2.0 / std::numbers::pi * acc;
    }
    return coeffs;
}

/// Evaluate sum_k coeffs[k-1] sin(k y) at one point.
inline double sine_eval(std::span<const double> coeffs, double y) {
    double acc = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        acc += coeffs[k] * std::sin(static_cast<double>(k + 1) * y);
    return acc;
}

/// Samples of the truncated series on the basis grid; endpoints exactly 0.
inline std::vector<double> sine_synthesis(std::span<const double> coeffs,
                                          const SineBasis& basis) {
    const int ny = basis.ygrid().ny;
    if (static_cast<int>(coeffs.size()) > basis.K())
        throw std::invalid_argument("sine_synthesis: more coefficients than basis modes");
    std::vector<double> out(static_cast<std::size_t>(ny), 0.0);
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const double* row = basis.table().row(k);
        for (int i = 0; i < ny; ++i) out[static_cast<std::size_t>(i)] += coeffs[k] * row[i];
    }
    return out;
}

/// Trapezoidal ||v||^2_{L2(0,1)} from uniform samples.
inline double l2sq_01(std::span<const double> v, double dx) {
    if (v.size() < 2) throw std::invalid_argument("l2sq_01: need at least 2 samples");
    double acc = 0.5 * (v[0] * v[0] + v[v.size() - 1] * v[v.size() - 1]);
    for (std::size_t j = 1; j + 1 < v.size(); ++j) acc += v[j] * v[j];
    return acc * dx;
}

/// All mode trajectories of one solve plus the weight exponent epsilon.
struct SpectralState {
    double epsilon = 0.5;
    std::vector<ModeField> modes;   ///< entry k-1 is mode k

    int K() const { return static_cast<int>(modes.size()); }
};

/// Weighted spectral norm sum_k lambda_k^{5/2+eps} ||u_k(t_i, .)||^2_{L2(0,1)}
/// at one time node. This is the norm whose increments drive the stopping
/// rule of the source iteration.
inline double weighted_norm(const SpectralState& state, int ti) {
    double acc = 0.0;
    for (const ModeField& mode : state.modes) {
        const double w = std::pow(mode.lambda(), 2.5 + state.epsilon);
        const double* row = mode.values.row(static_cast<std::size_t>(ti));
        acc += w * l2sq_01(std::span<const double>(row, static_cast<std::size_t>(mode.sg.nx)),
                           mode.sg.dx());
    }
    return acc;
}

/// max over time nodes of weighted_norm.
inline double max_weighted_norm(const SpectralState& state) {
    if (state.modes.empty()) return 0.0;
    double best = 0.0;
    for (int ti = 0; ti < state.modes.front().tg.nt; ++ti)
        best = std::max(best, weighted_norm(state, ti));
    return best;
}

/// ||u(t_i, ., .)||^2_{L2((0,1)x(0,pi))} through Parseval:
/// (pi/2) sum_k ||u_k(t_i, .)||^2.
inline double parseval_l2sq(const SpectralState& state, int ti) {
    double acc = 0.0;
    for (const ModeField& mode : state.modes) {
        const double* row = mode.values.row(static_cast<std::size_t>(ti));
        acc += l2sq_01(std::span<const double>(row, static_cast<std::size_t>(mode.sg.nx)),
                       mode.sg.dx());
    }
    return std::numbers::pi / 2.0 * acc;
}

/// Coupling profile S(t_i, x) = sum_k lambda_k u_k(t_i, x) sin(k l0).
///
/// This is the series through which the recovered source feeds back into
/// every mode equation. Requires l0 in (0, pi).
inline std::vector<double> coupling_sum(const SpectralState& state, double l0, int ti) {
    if (!(l0 > 0.0) || !(l0 < std::numbers::pi))
        throw std::invalid_argument("coupling_sum: l0 must lie in (0, pi)");
    if (state.modes.empty()) return {};
    const int nx = state.modes.front().sg.nx;
    std::vector<double> out(static_cast<std::size_t>(nx), 0.0);
    for (const ModeField& mode : state.modes) {
        const double a = mode.lambda() * std::sin(mode.k * l0);
        const double* row = mode.values.row(static_cast<std::size_t>(ti));
        for (int j = 0; j < nx; ++j) out[static_cast<std::size_t>(j)] += a * row[j];
    }
    return out;
}

} // namespace subdiff
