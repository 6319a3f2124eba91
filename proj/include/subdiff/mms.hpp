#pragma once

#include <cctype>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "subdiff/forward.hpp"
#include "subdiff/inverse.hpp"
#include "subdiff/problem.hpp"

namespace subdiff {

/// A problem with a known exact solution.
///
/// The source term g absorbs whatever the chosen u* and h* leave unbalanced,
/// so the pair solves the equation identically and f stays a pure one- or
/// two-mode function whose contraction sum is available in closed form.
///
/// The fractional order is baked into the analytic samplers (the Caputo
/// power rule depends on it), so changing `spec.alpha` after construction
/// desynchronizes the data; rebuild the case instead. Grids, K, T, and
/// tolerances are free to override.
struct ManufacturedCase {
    std::string id;
    std::string description;
    ProblemSpec spec;
    Sampler3 exact_u;                                    ///< u*(t, x, y)
    Sampler2 exact_h;                                    ///< h*(t, x)
    std::function<double(int, double, double)> exact_uk; ///< k-th sine coefficient of u*
    Sampler3 residual;   ///< D^alpha u* - u*_xx - u*_yy - f h* - g, analytic
};

namespace detail {

/// Caputo derivative of 1 + t^2: the power rule gives 2 t^{2-alpha} / Gamma(3-alpha).
inline double dalpha_one_plus_t2(double t, double alpha) {
    return 2.0 * std::pow(t, 2.0 - alpha) / std::tgamma(3.0 - alpha);
}

} // namespace detail

/// Names accepted by manufactured_case.
inline std::vector<std::string> manufactured_ids() { return {"mms-0", "mms-1", "mms-2"}; }

/// Build a registered exact case for the given fractional order.
///
///   mms-1: u* = (1+t^2) sin(pi x) sin(y),                f = sin(y), l0 = pi/2
///   mms-2: u* = (1+t^2) sin(pi x)(sin(y) + sin(2y)/8),   f = sin(y), l0 = pi/3
///   mms-0: everything zero except f = sin(y), for uniqueness checks
///
/// Both nonzero cases recover h*(t,x) = (1+t) sin(pi x). mms-2 keeps l0 away
/// from pi/2 because sin(2 l0) would vanish there and the second mode would
/// drop out of the coupling sum it exists to exercise. Case ids are
/// case-insensitive; unknown ids throw std::invalid_argument.
inline ManufacturedCase manufactured_case(const std::string& id, double alpha = 0.5) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0,1)");

    std::string key = id;
    for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

    const double pi = std::numbers::pi;
    auto tau = [](double t) { return 1.0 + t * t; };
    auto dtau = [alpha](double t) { return detail::dalpha_one_plus_t2(t, alpha); };

    ManufacturedCase c;
    c.spec.alpha = alpha;
    c.spec.tg = TimeGrid(1.0, 65);
    c.spec.sg = SpaceGrid(65);
    c.spec.f = [](double, double, double y) { return std::sin(y); };
    c.spec.f_yyy = [](double, double, double y) { return -std::cos(y); };

    if (key == "mms-0") {
        c.id = "mms-0";
        c.description = "zero data, zero source; uniqueness witness";
        c.spec.g = [](double, double, double) { return 0.0; };
        c.spec.phi = [](double, double) { return 0.0; };
        c.spec.h_true = [](double, double) { return 0.0; };
        c.spec.psi = [](double, double) { return 0.0; };
        c.spec.dalpha_psi = [](double, double) { return 0.0; };
        c.spec.psi_xx = [](double, double) { return 0.0; };
        c.spec.g_yyy = [](double, double, double) { return 0.0; };
        c.spec.phi_yyy = [](double, double) { return 0.0; };
        c.exact_u = [](double, double, double) { return 0.0; };
        c.exact_h = [](double, double) { return 0.0; };
        c.exact_uk = [](int, double, double) { return 0.0; };
        c.residual = [](double, double, double) { return 0.0; };
        return c;
    }

    if (key == "mms-1") {
        c.id = "mms-1";
        c.description = "single-mode exact solution (1+t^2) sin(pi x) sin(y)";
        c.spec.l0 = pi / 2.0;
        // balance: D^a u* - u*_xx - u*_yy = [dtau + (pi^2+1) tau] sin(pi x) sin(y)
        auto G = [tau, dtau, pi](double t) {
            return dtau(t) + (pi * pi + 1.0) * tau(t) - (1.0 + t);
        };
        c.spec.g = [G, pi](double t, double x, double y) {
            return std::sin(pi * x) * std::sin(y) * G(t);
        };
        c.spec.g_yyy = [G, pi](double t, double x, double y) {
            return -std::sin(pi * x) * std::cos(y) * G(t);
        };
        c.spec.phi = [pi](double x, double y) { return std::sin(pi * x) * std::sin(y); };
        c.spec.phi_yyy = [pi](double x, double y) { return -std::sin(pi * x) * std::cos(y); };
        c.spec.h_true = [pi](double t, double x) { return (1.0 + t) * std::sin(pi * x); };
        const double s0 = std::sin(c.spec.l0);
        c.spec.psi = [tau, pi, s0](double t, double x) { return tau(t) * std::sin(pi * x) * s0; };
        c.spec.dalpha_psi = [dtau, pi, s0](double t, double x) {
            return dtau(t) * std::sin(pi * x) * s0;
        };
        c.spec.psi_xx = [tau, pi, s0](double t, double x) {
            return -pi * pi * tau(t) * std::sin(pi * x) * s0;
        };
        c.exact_u = [tau, pi](double t, double x, double y) {
            return tau(t) * std::sin(pi * x) * std::sin(y);
        };
        c.exact_h = c.spec.h_true;
        c.exact_uk = [tau, pi](int k, double t, double x) {
            return k == 1 ? tau(t) * std::sin(pi * x) : 0.0;
        };
        c.residual = [tau, dtau, G, pi](double t, double x, double y) {
            const double sx = std::sin(pi * x), sy = std::sin(y);
            const double lhs = (dtau(t) + (pi * pi + 1.0) * tau(t)) * sx * sy;
            const double rhs = sy * (1.0 + t) * sx + sx * sy * G(t);
            return lhs - rhs;
        };
        return c;
    }

    if (key == "mms-2") {
        c.id = "mms-2";
        c.description = "two-mode exact solution exercising the coupling sum";
        c.spec.l0 = pi / 3.0;
        auto Y = [](double y) { return std::sin(y) + std::sin(2.0 * y) / 8.0; };
        auto Yyy = [](double y) { return -std::sin(y) - std::sin(2.0 * y) / 2.0; };
        auto Yyyy = [](double y) { return -std::cos(y) - std::cos(2.0 * y); };
        c.spec.g = [tau, dtau, pi, Y, Yyy](double t, double x, double y) {
            return std::sin(pi * x) * ((dtau(t) + pi * pi * tau(t)) * Y(y) - tau(t) * Yyy(y) -
                                       (1.0 + t) * std::sin(y));
        };
        c.spec.g_yyy = [tau, dtau, pi, Yyyy](double t, double x, double y) {
            const double Yyy3 = std::cos(y) + 4.0 * std::cos(2.0 * y);  // (Yyy)'''
            return std::sin(pi * x) * ((dtau(t) + pi * pi * tau(t)) * Yyyy(y) -
                                       tau(t) * Yyy3 + (1.0 + t) * std::cos(y));
        };
        c.spec.phi = [pi, Y](double x, double y) { return std::sin(pi * x) * Y(y); };
        c.spec.phi_yyy = [pi, Yyyy](double x, double y) { return std::sin(pi * x) * Yyyy(y); };
        c.spec.h_true = [pi](double t, double x) { return (1.0 + t) * std::sin(pi * x); };
        const double c0 = Y(c.spec.l0);
        c.spec.psi = [tau, pi, c0](double t, double x) { return tau(t) * std::sin(pi * x) * c0; };
        c.spec.dalpha_psi = [dtau, pi, c0](double t, double x) {
            return dtau(t) * std::sin(pi * x) * c0;
        };
        c.spec.psi_xx = [tau, pi, c0](double t, double x) {
            return -pi * pi * tau(t) * std::sin(pi * x) * c0;
        };
        c.exact_u = [tau, pi, Y](double t, double x, double y) {
            return tau(t) * std::sin(pi * x) * Y(y);
        };
        c.exact_h = c.spec.h_true;
        c.exact_uk = [tau, pi](int k, double t, double x) {
            if (k == 1) return tau(t) * std::sin(pi * x);
            if (k == 2) return tau(t) * std::sin(pi * x) / 8.0;
            return 0.0;
        };
        c.residual = [tau, dtau, pi, Y, Yyy](double t, double x, double y) {
            const double sx = std::sin(pi * x);
            const double lhs = dtau(t) * sx * Y(y) + pi * pi * tau(t) * sx * Y(y) -
                               tau(t) * sx * Yyy(y);
            const double g = sx * ((dtau(t) + pi * pi * tau(t)) * Y(y) - tau(t) * Yyy(y) -
                                   (1.0 + t) * std::sin(y));
            const double rhs = std::sin(y) * (1.0 + t) * sx + g;
            return lhs - rhs;
        };
        return c;
    }

    throw std::invalid_argument("unknown manufactured case: " + id);
}

/// One refinement level of a convergence study.
struct StudyLevel {
    int nt = 0;
    int nx = 0;
    double error = 0.0;      ///< discrete L2 error (see convergence_study)
    double rel_error = 0.0;  ///< error / norm of the exact field
};

/// Matched nt/nx sequences, one entry per level, coarse to fine.
struct GridLadder {
    std::vector<int> nts;
    std::vector<int> nxs;
};

enum class StudyTarget { forward, inverse };

/// Results of running one pipeline over a grid ladder.
struct ConvergenceStudy {
    std::string case_id;
    StudyTarget target = StudyTarget::forward;
    std::vector<StudyLevel> levels;
    std::string step_kind;         ///< "dt" or "dx": the step the order is measured against
    double observed_order = 0.0;   ///< least-squares slope of log error vs log step
    bool aborted = false;          ///< inverse failed to converge at some level
};

namespace detail {

/// Least-squares slope of log(err) against log(step).
inline double loglog_slope(const std::vector<double>& steps, const std::vector<double>& errs) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const double lx = std::log(steps[i]), ly = std::log(errs[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    return denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
}

/// Discrete L2(Q) error of a forward solve against the exact coefficients:
/// Parseval in y, trapezoid in x and t.
inline void forward_error(const ManufacturedCase& mc, const ProblemSpec& spec,
                          const SpectralState& state, double& err, double& rel) {
    const int nt = spec.tg.nt, nx = spec.sg.nx;
    const double dt = spec.tg.dt(), dx = spec.sg.dx();
    std::vector<double> diff(static_cast<std::size_t>(nx)), exact(static_cast<std::size_t>(nx));
    double esq = 0.0, nsq = 0.0;
    for (int i = 0; i < nt; ++i) {
        const double wt = (i == 0 || i == nt - 1) ? 0.5 * dt : dt;
        double e_t = 0.0, n_t = 0.0;
        for (const ModeField& mode : state.modes) {
            const double* row = mode.values.row(static_cast<std::size_t>(i));
            for (int j = 0; j < nx; ++j) {
                const double ex = mc.exact_uk(mode.k, spec.tg.t(i), spec.sg.x(j));
                diff[static_cast<std::size_t>(j)] = row[j] - ex;
                exact[static_cast<std::size_t>(j)] = ex;
            }
            e_t += l2sq_01(diff, dx);
            n_t += l2sq_01(exact, dx);
        }
        esq += wt * std::numbers::pi / 2.0 * e_t;
        nsq += wt * std::numbers::pi / 2.0 * n_t;
    }
    err = std::sqrt(esq);
    rel = nsq > 0.0 ? err / std::sqrt(nsq) : err;
}

/// Discrete L2((t_1, T) x (0,1)) error of a recovered source against h*,
/// excluding the extrapolated t = 0 row where the formula is undefined.
inline void inverse_error(const ManufacturedCase& mc, const ProblemSpec& spec, const Array2D& h,
                          double& err, double& rel) {
    const int nt = spec.tg.nt, nx = spec.sg.nx;
    const double dt = spec.tg.dt(), dx = spec.sg.dx();
    std::vector<double> diff(static_cast<std::size_t>(nx)), exact(static_cast<std::size_t>(nx));
    double esq = 0.0, nsq = 0.0;
    for (int i = 1; i < nt; ++i) {
        const double wt = (i == 1 || i == nt - 1) ? 0.5 * dt : dt;
        for (int j = 0; j < nx; ++j) {
            const double ex = mc.exact_h(spec.tg.t(i), spec.sg.x(j));
            diff[static_cast<std::size_t>(j)] = h(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) - ex;
            exact[static_cast<std::size_t>(j)] = ex;
        }
        esq += wt * l2sq_01(diff, dx);
        nsq += wt * l2sq_01(exact, dx);
    }
    err = std::sqrt(esq);
    rel = nsq > 0.0 ? err / std::sqrt(nsq) : err;
}

} // namespace detail

/// Run the forward or inverse pipeline at every ladder level and fit the
/// observed order.
///
/// The order is measured against whichever step actually varies across the
/// ladder (dt when the nt column changes, else dx). A ladder needs at least
/// 3 levels, each strictly finer than the last in the varying column. An
/// inverse level that fails to converge aborts the study; the levels
/// completed so far stay in the result.
inline ConvergenceStudy convergence_study(const ManufacturedCase& mc, const GridLadder& ladder,
                                          StudyTarget target, double tol = 1e-10,
                                          int max_iter = 60) {
    if (ladder.nts.size() != ladder.nxs.size())
        throw std::invalid_argument("convergence_study: nts and nxs must have equal length");
    if (ladder.nts.size() < 3)
        throw std::invalid_argument("convergence_study: ladder needs at least 3 levels");
    const bool time_varies = ladder.nts.front() != ladder.nts.back();
    for (std::size_t l = 1; l < ladder.nts.size(); ++l) {
        const bool finer_t = ladder.nts[l] > ladder.nts[l - 1];
        const bool finer_x = ladder.nxs[l] > ladder.nxs[l - 1];
        if (!(finer_t || finer_x) || ladder.nts[l] < ladder.nts[l - 1] ||
            ladder.nxs[l] < ladder.nxs[l - 1])
            throw std::invalid_argument("convergence_study: ladder must be strictly refining");
    }

    ConvergenceStudy study;
    study.case_id = mc.id;
    study.target = target;
    study.step_kind = time_varies ? "dt" : "dx";

    std::vector<double> steps, errs;
    for (std::size_t l = 0; l < ladder.nts.size(); ++l) {
        ProblemSpec spec = mc.spec;
        spec.tg = TimeGrid(spec.T, ladder.nts[l]);
        spec.sg = SpaceGrid(ladder.nxs[l]);
        validate(spec);

        const DecomposedData decomp = decompose_data(spec);
        StudyLevel level;
        level.nt = ladder.nts[l];
        level.nx = ladder.nxs[l];

        if (target == StudyTarget::forward) {
            const SpectralState state = solve_forward(spec, decomp);
            detail::forward_error(mc, spec, state, level.error, level.rel_error);
        } else {
            Array2D psi(static_cast<std::size_t>(spec.tg.nt), static_cast<std::size_t>(spec.sg.nx));
            for (int i = 0; i < spec.tg.nt; ++i)
                for (int j = 0; j < spec.sg.nx; ++j)
                    psi(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                        spec.psi(spec.tg.t(i), spec.sg.x(j));
            const InverseSolution sol = solve_inverse(spec, decomp, psi, tol, max_iter);
            if (!sol.report.converged) {
                study.aborted = true;
                break;
            }
            detail::inverse_error(mc, spec, sol.source.h, level.error, level.rel_error);
        }

        study.levels.push_back(level);
        steps.push_back(time_varies ? spec.tg.dt() : spec.sg.dx());
        errs.push_back(std::max(level.error, 1e-300));
    }

    if (steps.size() >= 2) study.observed_order = detail::loglog_slope(steps, errs);
    return study;
}

} // namespace subdiff
