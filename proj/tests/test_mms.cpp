#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "subdiff/mms.hpp"

using namespace subdiff;

namespace {

constexpr double pi = std::numbers::pi;

} // namespace

TEST_CASE("registry lists three cases and normalizes ids", "[mms]") {
    const std::vector<std::string> ids = manufactured_ids();
    REQUIRE(ids == std::vector<std::string>{"mms-0", "mms-1", "mms-2"});

    REQUIRE(manufactured_case("MMS-1").id == "mms-1");
    REQUIRE(manufactured_case("Mms-2").id == "mms-2");
    REQUIRE_THROWS_AS(manufactured_case("mms-3"), std::invalid_argument);
    REQUIRE_THROWS_AS(manufactured_case(""), std::invalid_argument);
    REQUIRE_THROWS_AS(manufactured_case("mms-1", 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(manufactured_case("mms-1", 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(manufactured_case("mms-1", 1.5), std::invalid_argument);
}

TEST_CASE("the zero case is identically zero except for f", "[mms]") {
    const ManufacturedCase mc = manufactured_case("mms-0");
    for (double t : {0.0, 0.3, 1.0})
        for (double x : {0.1, 0.5, 0.9})
            for (double y : {0.4, pi / 2.0, 2.9}) {
                REQUIRE(mc.spec.g(t, x, y) == 0.0);
                REQUIRE(mc.spec.phi(x, y) == 0.0);
                REQUIRE(mc.spec.h_true(t, x) == 0.0);
                REQUIRE(mc.spec.psi(t, x) == 0.0);
                REQUIRE(mc.exact_u(t, x, y) == 0.0);
                REQUIRE(mc.exact_h(t, x) == 0.0);
                REQUIRE(mc.residual(t, x, y) == 0.0);
                REQUIRE(mc.spec.f(t, x, y) == std::sin(y));
            }
}

TEST_CASE("manufactured pairs satisfy the equation pointwise", "[mms]") {
    std::mt19937 gen(12345);
    std::uniform_real_distribution<double> ut(0.0, 1.0), ux(0.0, 1.0), uy(0.0, pi);

    for (const char* id : {"mms-1", "mms-2"})
        for (double alpha : {0.3, 0.5}) {
            const ManufacturedCase mc = manufactured_case(id, alpha);
            double worst = 0.0;
            for (int n = 0; n < 100; ++n) {
                const double t = ut(gen), x = ux(gen), y = uy(gen);
                worst = std::max(worst, std::fabs(mc.residual(t, x, y)));
            }
            INFO(id << " alpha=" << alpha << " worst residual " << worst);
            REQUIRE(worst <= 1e-10);
        }
}

TEST_CASE("traces, coefficients, and boundaries are consistent", "[mms]") {
    for (const char* id : {"mms-1", "mms-2"}) {
        const ManufacturedCase mc = manufactured_case(id);
        for (double t : {0.0, 0.4, 1.0})
            for (double x : {0.2, 0.5, 0.8}) {
                // psi is the trace of the exact solution at l0
                REQUIRE(std::fabs(mc.spec.psi(t, x) - mc.exact_u(t, x, mc.spec.l0)) <= 1e-14);
                // h_true and exact_h are the same sampler
                REQUIRE(mc.spec.h_true(t, x) == mc.exact_h(t, x));
                REQUIRE(std::fabs(mc.exact_h(t, x) - (1.0 + t) * std::sin(pi * x)) <= 1e-15);
                // data vanish on the y-boundary
                for (double y : {0.0, pi}) {
                    REQUIRE(std::fabs(mc.spec.f(t, x, y)) <= 1e-12);
                    REQUIRE(std::fabs(mc.spec.g(t, x, y)) <= 1e-12);
                    REQUIRE(std::fabs(mc.spec.phi(x, y)) <= 1e-12);
                }
            }
    }

    const ManufacturedCase two = manufactured_case("mms-2");
    REQUIRE(std::fabs(two.spec.l0 - pi / 3.0) <= 1e-15);
    const double tau = 1.0 + 0.4 * 0.4;
    const double sx = std::sin(pi * 0.7);
    REQUIRE(std::fabs(two.exact_uk(1, 0.4, 0.7) - tau * sx) <= 1e-15);
    REQUIRE(std::fabs(two.exact_uk(2, 0.4, 0.7) - tau * sx / 8.0) <= 1e-15);
    REQUIRE(two.exact_uk(3, 0.4, 0.7) == 0.0);

    const ManufacturedCase one = manufactured_case("mms-1");
    REQUIRE(std::fabs(one.spec.l0 - pi / 2.0) <= 1e-15);
    REQUIRE(one.exact_uk(2, 0.4, 0.7) == 0.0);
}

TEST_CASE("ladder validation rejects malformed input", "[mms]") {
    const ManufacturedCase mc = manufactured_case("mms-1");
    GridLadder bad;
    bad.nts = {9, 17, 33};
    bad.nxs = {9, 17};
    REQUIRE_THROWS_AS(convergence_study(mc, bad, StudyTarget::forward), std::invalid_argument);

    GridLadder shallow;
    shallow.nts = {9, 17};
    shallow.nxs = {9, 17};
    REQUIRE_THROWS_AS(convergence_study(mc, shallow, StudyTarget::forward), std::invalid_argument);

    GridLadder coarsening;
    coarsening.nts = {9, 17, 13};
    coarsening.nxs = {9, 9, 9};
    REQUIRE_THROWS_AS(convergence_study(mc, coarsening, StudyTarget::forward), std::invalid_argument);

    GridLadder flat;
    flat.nts = {9, 9, 9};
    flat.nxs = {17, 17, 17};
    REQUIRE_THROWS_AS(convergence_study(mc, flat, StudyTarget::forward), std::invalid_argument);
}

TEST_CASE("forward study observes the time order", "[mms]") {
    ManufacturedCase mc = manufactured_case("mms-1");
    mc.spec.K = 4;
    GridLadder ladder;
    ladder.nts = {9, 17, 33};
    ladder.nxs = {129, 129, 129};
    const ConvergenceStudy study = convergence_study(mc, ladder, StudyTarget::forward);

    REQUIRE_FALSE(study.aborted);
    REQUIRE(study.case_id == "mms-1");
    REQUIRE(study.step_kind == "dt");
    REQUIRE(study.levels.size() == 3);
    for (const StudyLevel& lv : study.levels) {
        REQUIRE(lv.error > 0.0);
        REQUIRE(lv.rel_error > 0.0);
        REQUIRE(lv.rel_error <= lv.error);  // the exact field has norm > 1
    }
    REQUIRE(study.levels[1].error < study.levels[0].error);
    REQUIRE(study.levels[2].error < study.levels[1].error);
    INFO("order " << study.observed_order);
    REQUIRE(study.observed_order >= 1.2);
    REQUIRE(study.observed_order <= 1.9);
}

TEST_CASE("zero case inverts to zero on every level", "[mms]") {
    ManufacturedCase mc = manufactured_case("mms-0");
    mc.spec.K = 4;
    GridLadder ladder;
    ladder.nts = {5, 9, 17};
    ladder.nxs = {9, 17, 33};
    const ConvergenceStudy study = convergence_study(mc, ladder, StudyTarget::inverse);

    REQUIRE_FALSE(study.aborted);
    REQUIRE(study.levels.size() == 3);
    for (const StudyLevel& lv : study.levels) {
        REQUIRE(lv.error == 0.0);
        REQUIRE(lv.rel_error == 0.0);
    }
}

TEST_CASE("non-convergent level aborts the study, keeping earlier levels", "[mms]") {
    ManufacturedCase mc = manufactured_case("mms-1");
    mc.spec.K = 4;
    GridLadder ladder;
    ladder.nts = {5, 9, 17};
    ladder.nxs = {9, 17, 33};
    const ConvergenceStudy study =
        convergence_study(mc, ladder, StudyTarget::inverse, 1e-10, /*max_iter=*/1);
    REQUIRE(study.aborted);
    REQUIRE(study.levels.empty());
}
