/// End-to-end usage of the library: take a manufactured case, synthesize a
/// noisy measurement of u on the observation plane, recover the source
/// factor h(t,x) by Picard iteration, and report how the error tracks the
/// noise floor.

#include <cmath>
#include <cstdio>

#include "subdiff/runner.hpp"

using namespace subdiff;

namespace {

double rel_error(const ManufacturedCase& mc, const ProblemSpec& spec, const Array2D& h) {
    double num = 0.0, den = 0.0;
    for (int i = 1; i < spec.tg.nt; ++i)
        for (int j = 0; j < spec.sg.nx; ++j) {
            const double exact = mc.exact_h(spec.tg.t(i), spec.sg.x(j));
            const double diff = h(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) - exact;
            num += diff * diff;
            den += exact * exact;
        }
    return std::sqrt(num / den);
}

} // namespace

int main() {
    ManufacturedCase mc = manufactured_case("mms-1", 0.5);
    mc.spec.T = 0.01;
    mc.spec.tg = TimeGrid(0.01, 65);
    mc.spec.sg = SpaceGrid(65);
    mc.spec.K = 8;

    std::printf("inverse source recovery, case %s, alpha=%g, T=%g, grid %dx%d, K=%d\n",
                mc.id.c_str(), mc.spec.alpha, mc.spec.T, mc.spec.tg.nt, mc.spec.sg.nx, mc.spec.K);
    std::printf("%12s %12s %10s %12s\n", "noise", "h rel error", "iterations", "terminal");

    for (double noise : {0.0, 1e-9, 1e-8, 1e-7, 1e-6}) {
        ProblemSpec spec = mc.spec;
        const Array2D psi = synthesize_data(spec, noise, 42, 2);
        if (noise > 0.0) {
            // measured data only: drop the analytic shortcuts so the
            // derivative tables are built from the table itself
            spec.psi = nullptr;
            spec.dalpha_psi = nullptr;
            spec.psi_xx = nullptr;
        }
        const DecomposedData decomp = decompose_data(spec);
        const InverseSolution sol = solve_inverse(spec, decomp, psi, 1e-10, 60);
        std::printf("%12.1e %12.3e %10d %12.2e\n", noise, rel_error(mc, spec, sol.source.h),
                    sol.report.iterations, sol.report.terminal_increment);
    }

    const ContractionInfo info = contraction_check(mc.spec, decompose_data(mc.spec));
    std::printf("\ncontraction condition L = %.3g (%s)\n", info.L,
                info.L <= 1.0 ? "iteration provably contracts" : "outside the proven regime");
    std::printf("note: with measured data the fractional time derivative is taken of the\n"
                "table itself, so the error floors at the discretization level of that\n"
                "derivative; above the floor it grows in proportion to the noise\n");
    return 0;
}
