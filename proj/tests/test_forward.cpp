#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "subdiff/forward.hpp"
#include "subdiff/mms.hpp"

using namespace subdiff;

namespace {

constexpr double pi = std::numbers::pi;

double max_abs_diff(const Array2D& a, const Array2D& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        worst = std::max(worst, std::fabs(a.data()[i] - b.data()[i]));
    return worst;
}

} // namespace

TEST_CASE("single-mode data decomposes onto the first coefficient", "[forward]") {
    ManufacturedCase mc = manufactured_case("mms-1");
    mc.spec.tg = TimeGrid(1.0, 9);
    mc.spec.sg = SpaceGrid(17);
    mc.spec.K = 4;
    const DecomposedData d = decompose_data(mc.spec);

    REQUIRE(d.f_k.size() == 4);
    const double alpha = mc.spec.alpha;
    for (int i = 0; i < 9; ++i) {
        const double t = mc.spec.tg.t(i);
        const double G = 2.0 * std::pow(t, 2.0 - alpha) / std::tgamma(3.0 - alpha) +
                         (pi * pi + 1.0) * (1.0 + t * t) - (1.0 + t);
        for (int j = 0; j < 17; ++j) {
            const double sx = std::sin(pi * mc.spec.sg.x(j));
            REQUIRE(std::fabs(d.f_k[0](i, j) - 1.0) <= 1e-12);
            REQUIRE(std::fabs(d.g_k[0](i, j) - sx * G) <= 1e-11);
            for (std::size_t k = 1; k < 4; ++k) {
                REQUIRE(std::fabs(d.f_k[k](i, j)) <= 1e-12);
                REQUIRE(std::fabs(d.g_k[k](i, j)) <= 1e-11);
            }
            // traces are raw samples at y = l0 = pi/2
            REQUIRE(std::fabs(d.f_trace(i, j) - 1.0) <= 1e-15);
            REQUIRE(std::fabs(d.g_trace(i, j) - sx * G) <= 1e-12);
        }
    }
    for (int j = 0; j < 17; ++j) {
        REQUIRE(std::fabs(d.phi_k[0][j] - std::sin(pi * mc.spec.sg.x(j))) <= 1e-12);
        REQUIRE(std::fabs(d.phi_k[1][j]) <= 1e-12);
    }
}

TEST_CASE("two-mode data splits as computed by hand", "[forward]") {
    ManufacturedCase mc = manufactured_case("mms-2");
    mc.spec.tg = TimeGrid(1.0, 9);
    mc.spec.sg = SpaceGrid(17);
    mc.spec.K = 4;
    const DecomposedData d = decompose_data(mc.spec);

    const double alpha = mc.spec.alpha;
    for (int i = 0; i < 9; ++i) {
        const double t = mc.spec.tg.t(i);
        const double tau = 1.0 + t * t;
        const double A = 2.0 * std::pow(t, 2.0 - alpha) / std::tgamma(3.0 - alpha) +
                         pi * pi * tau;
        for (int j = 0; j < 17; ++j) {
            const double sx = std::sin(pi * mc.spec.sg.x(j));
            REQUIRE(std::fabs(d.g_k[0](i, j) - sx * (A + tau - (1.0 + t))) <= 1e-11);
            REQUIRE(std::fabs(d.g_k[1](i, j) - sx * (A / 8.0 + tau / 2.0)) <= 1e-11);
            REQUIRE(std::fabs(d.g_k[2](i, j)) <= 1e-11);
            REQUIRE(std::fabs(d.phi_k[1][j] - sx / 8.0) <= 1e-12);
        }
    }
}

TEST_CASE("forward trace follows the analytic measurement", "[forward]") {
    ManufacturedCase mc = manufactured_case("mms-1");
    mc.spec.tg = TimeGrid(1.0, 33);
    mc.spec.sg = SpaceGrid(33);
    mc.spec.K = 4;
    const DecomposedData d = decompose_data(mc.spec);
    const SpectralState state = solve_forward(mc.spec, d);
    const Array2D trace = trace_profile(state, mc.spec.l0);

    double worst = 0.0;
    for (int i = 0; i < 33; ++i)
        for (int j = 0; j < 33; ++j)
            worst = std::max(worst, std::fabs(trace(i, j) -
                                              mc.spec.psi(mc.spec.tg.t(i), mc.spec.sg.x(j))));
    // discretization error of the scheme itself, O(dt^{2-alpha} + dx^2)
    REQUIRE(worst <= 5e-3);
    REQUIRE(worst > 1e-8);
}

TEST_CASE("full assembly matches the mode sum and the boundary", "[forward]") {
    ManufacturedCase mc = manufactured_case("mms-1");
    mc.spec.tg = TimeGrid(1.0, 9);
    mc.spec.sg = SpaceGrid(17);
    mc.spec.K = 3;
    const DecomposedData d = decompose_data(mc.spec);
    const SpectralState state = solve_forward(mc.spec, d);
    const SineBasis basis(3, mc.spec.resolved_ny());
    const Array3D full = assemble_full(state, basis);

    const int ny = basis.ygrid().ny;
    for (int i : {1, 4, 8})
        for (int j : {3, 9}) {
            for (int q : {1, ny / 2, ny - 2}) {
                double sum = 0.0;
                for (const ModeField& mode : state.modes)
                    sum += mode.values(i, static_cast<std::size_t>(j)) *
                           std::sin(mode.k * basis.ygrid().y(q));
                REQUIRE(std::fabs(full(i, static_cast<std::size_t>(j), static_cast<std::size_t>(q)) - sum) <= 1e-14);
            }
            REQUIRE(full(i, static_cast<std::size_t>(j), 0) == 0.0);
            REQUIRE(full(i, static_cast<std::size_t>(j), static_cast<std::size_t>(ny - 1)) == 0.0);
        }

    REQUIRE_THROWS_AS(assemble_full(SpectralState{}, basis), std::invalid_argument);
    REQUIRE_THROWS_AS(assemble_full(state, SineBasis(2, 17)), std::invalid_argument);
    REQUIRE_THROWS_AS(trace_profile(SpectralState{}, 1.0), std::invalid_argument);
}

TEST_CASE("synthesis without noise is the plain trace", "[forward]") {
    ManufacturedCase mc = manufactured_case("mms-1");
    mc.spec.tg = TimeGrid(1.0, 17);
    mc.spec.sg = SpaceGrid(17);
    mc.spec.K = 3;
    const DecomposedData d = decompose_data(mc.spec);
    const Array2D trace = trace_profile(solve_forward(mc.spec, d), mc.spec.l0);
    const Array2D synth = synthesize_data(mc.spec, 0.0, 42);
    REQUIRE(max_abs_diff(trace, synth) == 0.0);
}

TEST_CASE("noise is seeded, reproducible, and bounded", "[forward]") {
    ManufacturedCase mc = manufactured_case("mms-1");
    mc.spec.tg = TimeGrid(1.0, 17);
    mc.spec.sg = SpaceGrid(17);
    mc.spec.K = 3;

    const double level = 1e-2;
    const Array2D clean = synthesize_data(mc.spec, 0.0, 7);
    const Array2D a = synthesize_data(mc.spec, level, 7);
    const Array2D b = synthesize_data(mc.spec, level, 7);
    const Array2D c = synthesize_data(mc.spec, level, 8);

    REQUIRE(max_abs_diff(a, b) == 0.0);
    REQUIRE(max_abs_diff(a, c) > 0.0);

    double amp = 0.0;
    for (double v : clean.data()) amp = std::max(amp, std::fabs(v));
    REQUIRE(max_abs_diff(a, clean) <= 6.0 * level * amp);
    REQUIRE(max_abs_diff(a, clean) > 0.1 * level * amp);

    REQUIRE_THROWS_AS(synthesize_data(mc.spec, -1e-3, 7), std::invalid_argument);
    REQUIRE_THROWS_AS(synthesize_data(mc.spec, 0.0, 7, 0), std::invalid_argument);
}

TEST_CASE("refined synthesis restricts onto the requested grid", "[forward]") {
    ManufacturedCase mc = manufactured_case("mms-1");
    mc.spec.tg = TimeGrid(1.0, 9);
    mc.spec.sg = SpaceGrid(9);
    mc.spec.K = 2;

    const Array2D coarse = synthesize_data(mc.spec, 0.0, 1);
    const Array2D fine = synthesize_data(mc.spec, 0.0, 1, 4);
    REQUIRE(fine.rows() == coarse.rows());
    REQUIRE(fine.cols() == coarse.cols());

    // the refined solve is closer to the analytic trace than the coarse one
    double worst_c = 0.0, worst_f = 0.0;
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j) {
            const double exact = mc.spec.psi(mc.spec.tg.t(i), mc.spec.sg.x(j));
            worst_c = std::max(worst_c, std::fabs(coarse(i, j) - exact));
            worst_f = std::max(worst_f, std::fabs(fine(i, j) - exact));
        }
    REQUIRE(worst_f < 0.3 * worst_c);
}

TEST_CASE("forward solve requires a source sampler", "[forward]") {
    ManufacturedCase mc = manufactured_case("mms-1");
    mc.spec.tg = TimeGrid(1.0, 9);
    mc.spec.sg = SpaceGrid(9);
    mc.spec.K = 2;
    const DecomposedData d = decompose_data(mc.spec);
    mc.spec.h_true = nullptr;
    REQUIRE_THROWS_AS(solve_forward(mc.spec, d), std::invalid_argument);
}
