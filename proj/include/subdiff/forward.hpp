#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "subdiff/modesolver.hpp"
#include "subdiff/problem.hpp"
#include "subdiff/spectral.hpp"
#include "subdiff/util.hpp"

namespace subdiff {

/// Sine-mode data of one problem: coefficients of f and g on the full
/// (t, x) grid, coefficients of phi in x, and the traces of f and g along
/// y = l0 that the reconstruction formula divides by.
struct DecomposedData {
    std::vector<Array2D> f_k;               ///< K tables, each nt x nx
    std::vector<Array2D> g_k;
    std::vector<std::vector<double>> phi_k; ///< K profiles of length nx
    Array2D f_trace;                        ///< f(t, x, l0), nt x nx
    Array2D g_trace;                        ///< g(t, x, l0), nt x nx
};

/// Expand f, g, phi into sine coefficients and sample the l0-traces.
///
/// Everything downstream - the forward solver, the source iteration and the
/// a priori constants - works from this table, so the samplers are evaluated
/// exactly once per grid node here.
inline DecomposedData decompose_data(const ProblemSpec& spec) {
    validate(spec);
    const int nt = spec.tg.nt, nx = spec.sg.nx, K = spec.K;
    const SineBasis basis(K, spec.resolved_ny());
    const int ny = basis.ygrid().ny;

    DecomposedData out;
    out.f_k.assign(static_cast<std::size_t>(K), Array2D(nt, nx, 0.0));
    out.g_k.assign(static_cast<std::size_t>(K), Array2D(nt, nx, 0.0));
    out.phi_k.assign(static_cast<std::size_t>(K), std::vector<double>(static_cast<std::size_t>(nx), 0.0));
    out.f_trace = Array2D(nt, nx, 0.0);
    out.g_trace = Array2D(nt, nx, 0.0);

    parallel_for(nt, [&](int i) {
        const double t = spec.tg.t(i);
        std::vector<double> fy(static_cast<std::size_t>(ny)), gy(static_cast<std::size_t>(ny));
        for (int j = 0; j < nx; ++j) {
            const double x = spec.sg.x(j);
            for (int q = 0; q < ny; ++q) {
                const double y = basis.ygrid().y(q);
                fy[static_cast<std::size_t>(q)] = spec.f(t, x, y);
                gy[static_cast<std::size_t>(q)] = spec.g(t, x, y);
            }
            const std::vector<double> fc = sine_coefficients(fy, basis);
            const std::vector<double> gc = sine_coefficients(gy, basis);
            for (int k = 0; k < K; ++k) {
                out.f_k[static_cast<std::size_t>(k)](i, static_cast<std::size_t>(j)) = fc[static_cast<std::size_t>(k)];
                out.g_k[static_cast<std::size_t>(k)](i, static_cast<std::size_t>(j)) = gc[static_cast<std::size_t>(k)];
            }
            out.f_trace(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = spec.f(t, x, spec.l0);
            out.g_trace(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = spec.g(t, x, spec.l0);
        }
    });

    std::vector<double> py(static_cast<std::size_t>(ny));
    for (int j = 0; j < nx; ++j) {
        const double x = spec.sg.x(j);
        for (int q = 0; q < ny; ++q) py[static_cast<std::size_t>(q)] = spec.phi(x, basis.ygrid().y(q));
        const std::vector<double> pc = sine_coefficients(py, basis);
        for (int k = 0; k < K; ++k) out.phi_k[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = pc[static_cast<std::size_t>(k)];
    }
    return out;
}

/// Solve the forward problem with the source h given by spec.h_true.
///
/// Each mode k solves D^alpha u_k - (u_k)_xx + lambda_k u_k = g_k + f_k h
/// independently; modes are distributed over the worker pool.
inline SpectralState solve_forward(const ProblemSpec& spec, const DecomposedData& decomp) {
    if (!spec.h_true)
        throw std::invalid_argument("solve_forward: spec.h_true sampler is required");
    const int nt = spec.tg.nt, nx = spec.sg.nx;

    Array2D h(nt, nx, 0.0);
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < nx; ++j)
            h(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                spec.h_true(spec.tg.t(i), spec.sg.x(j));

    SpectralState state;
    state.epsilon = spec.epsilon;
    state.modes.resize(static_cast<std::size_t>(spec.K));
    parallel_for(spec.K, [&](int k0) {
        const std::size_t k = static_cast<std::size_t>(k0);
        Array2D rhs(nt, nx, 0.0);
        for (int i = 1; i < nt; ++i)
            for (int j = 0; j < nx; ++j)
                rhs(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                    decomp.g_k[k](static_cast<std::size_t>(i), static_cast<std::size_t>(j)) +
                    decomp.f_k[k](static_cast<std::size_t>(i), static_cast<std::size_t>(j)) *
                        h(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        state.modes[k] = solve_mode(k0 + 1, decomp.phi_k[k], rhs, spec.tg, spec.sg, spec.alpha);
    });
    return state;
}

/// Trace of the spectral solution along y = l0: sum_k u_k(t,x) sin(k l0).
inline Array2D trace_profile(const SpectralState& state, double l0) {
    if (state.modes.empty()) throw std::invalid_argument("trace_profile: empty state");
    const int nt = state.modes.front().tg.nt;
    const int nx = state.modes.front().sg.nx;
    Array2D out(static_cast<std::size_t>(nt), static_cast<std::size_t>(nx), 0.0);
    for (const ModeField& mode : state.modes) {
        const double s = std::sin(mode.k * l0);
        for (int i = 0; i < nt; ++i) {
            const double* src = mode.values.row(static_cast<std::size_t>(i));
            double* dst = out.row(static_cast<std::size_t>(i));
            for (int j = 0; j < nx; ++j) dst[j] += s * src[j];
        }
    }
    return out;
}

/// Physical-space field u(t, x, y) on the basis grid. Large: nt * nx * ny
/// doubles. Only assembled on demand.
inline Array3D assemble_full(const SpectralState& state, const SineBasis& basis) {
    if (state.modes.empty()) throw std::invalid_argument("assemble_full: empty state");
    if (state.K() > basis.K())
        throw std::invalid_argument("assemble_full: basis has fewer modes than the state");
    const int nt = state.modes.front().tg.nt;
    const int nx = state.modes.front().sg.nx;
    const int ny = basis.ygrid().ny;
    Array3D out(static_cast<std::size_t>(nt), static_cast<std::size_t>(nx), static_cast<std::size_t>(ny), 0.0);
    for (const ModeField& mode : state.modes) {
        const double* sines = basis.table().row(static_cast<std::size_t>(mode.k - 1));
        for (int i = 0; i < nt; ++i) {
            const double* src = mode.values.row(static_cast<std::size_t>(i));
            for (int j = 0; j < nx; ++j)
                for (int q = 0; q < ny; ++q)
                    out(static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(q)) += src[j] * sines[q];
        }
    }
    return out;
}

/// Synthetic measurement: the l0-trace of the forward solution, optionally
/// with additive Gaussian noise scaled by noise_level * max |trace|.
///
/// fine_factor > 1 solves the forward problem on a grid refined in t and x
/// by that factor and restricts the trace to the requested grid, so the
/// synthetic data does not share its discretization error with a subsequent
/// inversion on the coarse grid.
inline Array2D synthesize_data(const ProblemSpec& spec, double noise_level,
                               std::uint64_t seed, int fine_factor = 1) {
    if (!(noise_level >= 0.0))
        throw std::invalid_argument("synthesize_data: noise_level must be nonnegative");
    if (fine_factor < 1)
        throw std::invalid_argument("synthesize_data: fine_factor must be at least 1");

    Array2D trace;
    if (fine_factor == 1) {
        const DecomposedData decomp = decompose_data(spec);
        trace = trace_profile(solve_forward(spec, decomp), spec.l0);
    } else {
        ProblemSpec fine = spec;
        fine.tg = TimeGrid(spec.T, (spec.tg.nt - 1) * fine_factor + 1);
        fine.sg = SpaceGrid((spec.sg.nx - 1) * fine_factor + 1);
        const DecomposedData decomp = decompose_data(fine);
        const Array2D fine_trace = trace_profile(solve_forward(fine, decomp), spec.l0);
        trace = Array2D(static_cast<std::size_t>(spec.tg.nt), static_cast<std::size_t>(spec.sg.nx), 0.0);
        for (int i = 0; i < spec.tg.nt; ++i)
            for (int j = 0; j < spec.sg.nx; ++j)
                trace(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                    fine_trace(static_cast<std::size_t>(i) * fine_factor,
                               static_cast<std::size_t>(j) * fine_factor);
    }

    if (noise_level > 0.0) {
        double amp = 0.0;
        for (double v : trace.data()) amp = std::max(amp, std::fabs(v));
        const double scale = noise_level * amp;
        const std::size_t nx = trace.cols();
        for (std::size_t i = 0; i < trace.rows(); ++i)
            for (std::size_t j = 0; j < nx; ++j)
                trace(i, j) += scale * gaussian_at(seed, i * nx + j);
    }
    return trace;
}

} // namespace subdiff
