#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "subdiff/array.hpp"
#include "subdiff/grids.hpp"

namespace subdiff {

using Sampler1 = std::function<double(double)>;
using Sampler2 = std::function<double(double, double)>;
using Sampler3 = std::function<double(double, double, double)>;

/// Full description of one inverse-source problem
///
///   D_t^alpha u - u_xx - u_yy = g(t,x,y) + f(t,x,y) h(t,x)
///
/// on (0,T) x (0,1) x (0,pi) with zero Dirichlet data, initial profile
/// phi(x,y), and the extra measurement psi(t,x) = u(t,x,l0) from which h is
/// to be recovered.
///
/// f, g, phi are required samplers. psi may come either from the analytic
/// sampler `psi` or from gridded data in `psi_data` (nt x nx); when both are
/// present the grid wins, since data is what an actual inversion consumes.
/// The *_yyy samplers and the psi-derivative samplers are optional analytic
/// overrides: when absent, third-derivative norms fall back to the spectral
/// route and the psi derivatives are formed by numerical differentiation.
struct ProblemSpec {
    double alpha = 0.5;     ///< fractional order, in (0, 1)
    double T = 1.0;         ///< time horizon
    double l0 = std::numbers::pi / 2.0;  ///< observation height in (0, pi)
    double epsilon = 0.5;   ///< weight exponent of the contraction norm
    int K = 32;             ///< sine modes kept

    TimeGrid tg;
    SpaceGrid sg;
    int ny = 0;             ///< y-grid nodes; 0 means 8K + 1

    Sampler3 f, g;
    Sampler2 phi;           ///< phi(x, y)
    Sampler2 h_true;        ///< optional, enables forward runs and error norms
    Sampler2 psi;           ///< optional analytic trace
    Array2D psi_data;       ///< optional gridded trace (nt x nx)

    Sampler2 dalpha_psi;    ///< optional: D_t^alpha psi (t, x)
    Sampler2 psi_xx;        ///< optional: psi_xx (t, x)
    Sampler3 f_yyy, g_yyy;  ///< optional third y-derivatives
    Sampler2 phi_yyy;       ///< optional, (x, y)

    int resolved_ny() const { return ny > 0 ? ny : 8 * K + 1; }
};

/// Hard parameter validation; throws std::invalid_argument on violation.
inline void validate(const ProblemSpec& spec) {
    if (!(spec.alpha > 0.0) || !(spec.alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0,1)");
    if (!(spec.T > 0.0)) throw std::invalid_argument("T must be positive");
    if (!(spec.l0 > 0.0) || !(spec.l0 < std::numbers::pi))
        throw std::invalid_argument("l0 must lie in (0,pi)");
    if (!(spec.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (spec.K < 1) throw std::invalid_argument("K must be at least 1");
    if (spec.tg.nt < 3) throw std::invalid_argument("nt must be at least 3");
    if (spec.sg.nx < 3) throw std::invalid_argument("nx must be at least 3");
    const int ny = spec.resolved_ny();
    if (ny < 8 * spec.K + 1)
        throw std::invalid_argument("ny must be at least 8K + 1");
    if (ny % 2 == 0) throw std::invalid_argument("ny must be odd");
    if (!spec.f) throw std::invalid_argument("f sampler is required");
    if (!spec.g) throw std::invalid_argument("g sampler is required");
    if (!spec.phi) throw std::invalid_argument("phi sampler is required");
}

/// Soft compatibility checks on the data: f must not vanish along y = l0,
/// and f, g, phi together with their second y-derivatives should vanish at
/// y = 0 and y = pi for the series arguments to apply. Violations are
/// reported as human-readable warnings, not errors; second derivatives are
/// probed by one-sided differences so the tolerance is loose.
inline std::vector<std::string> check_compatibility(const ProblemSpec& spec) {
    std::vector<std::string> warnings;
    const double pi = std::numbers::pi;
    const int nt = spec.tg.nt, nx = spec.sg.nx;
    const int ny = spec.resolved_ny();
    const double dy = pi / (ny - 1);

    double min_trace = std::numeric_limits<double>::max();
    double max_bnd_f = 0.0, max_bnd_g = 0.0, max_bnd_phi = 0.0;
    double max_bnd_fyy = 0.0, max_bnd_gyy = 0.0, max_bnd_phiyy = 0.0;
    auto d2_left = [dy](double v0, double v1, double v2) {
        return (v0 - 2.0 * v1 + v2) / (dy * dy);
    };
    for (int i = 0; i < nt; ++i) {
        const double t = spec.tg.t(i);
        for (int j = 0; j < nx; ++j) {
            const double x = spec.sg.x(j);
            min_trace = std::min(min_trace, std::fabs(spec.f(t, x, spec.l0)));
            for (double y0 : {0.0, pi}) {
                const double s = (y0 == 0.0) ? 1.0 : -1.0;
                max_bnd_f = std::max(max_bnd_f, std::fabs(spec.f(t, x, y0)));
                max_bnd_g = std::max(max_bnd_g, std::fabs(spec.g(t, x, y0)));
                max_bnd_fyy = std::max(
                    max_bnd_fyy,
                    std::fabs(d2_left(spec.f(t, x, y0), spec.f(t, x, y0 + s * dy),
                                      spec.f(t, x, y0 + 2.0 * s * dy))));
                max_bnd_gyy = std::max(
                    max_bnd_gyy,
                    std::fabs(d2_left(spec.g(t, x, y0), spec.g(t, x, y0 + s * dy),
                                      spec.g(t, x, y0 + 2.0 * s * dy))));
            }
        }
    }
    for (int j = 0; j < nx; ++j) {
        const double x = spec.sg.x(j);
        for (double y0 : {0.0, pi}) {
            const double s = (y0 == 0.0) ? 1.0 : -1.0;
            max_bnd_phi = std::max(max_bnd_phi, std::fabs(spec.phi(x, y0)));
            max_bnd_phiyy = std::max(
                max_bnd_phiyy,
                std::fabs(d2_left(spec.phi(x, y0), spec.phi(x, y0 + s * dy),
                                  spec.phi(x, y0 + 2.0 * s * dy))));
        }
    }

    if (min_trace < 1e-12)
        warnings.push_back("f(t,x,l0) nearly vanishes somewhere on the grid (min |f| = " +
                           std::to_string(min_trace) + "); the reconstruction divides by it");
    auto flag = [&warnings](double v, double tol, const std::string& what) {
        if (v > tol) warnings.push_back(what + " does not vanish at the y-boundary (max " +
                                        std::to_string(v) + ")");
    };
    flag(max_bnd_f, 1e-10, "f");
    flag(max_bnd_g, 1e-10, "g");
    flag(max_bnd_phi, 1e-10, "phi");
    // One-sided second differences of a C^3 function with v(y0) = v''(y0) = 0
    // are O(dy); anything past this threshold is a genuine violation.
    flag(max_bnd_fyy, 50.0 * dy, "f_yy");
    flag(max_bnd_gyy, 50.0 * dy, "g_yy");
    flag(max_bnd_phiyy, 50.0 * dy, "phi_yy");
    return warnings;
}

} // namespace subdiff
