#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "subdiff/specfun.hpp"

using subdiff::MLParams;
using subdiff::mittag_leffler;
using subdiff::ml_bound;

namespace {

double rel_err(double got, double ref) {
    return std::fabs(got - ref) / std::fabs(ref);
}

} // namespace

TEST_CASE("series path reproduces (e^z - 1) / z for alpha = 1, mu = 2", "[specfun]") {
    // alpha = 1 with mu != 1 avoids the exp(z) shortcut, so this walks the
    // power series across the whole interval, including the cancellation-heavy
    // left half.
    for (int i = 0; i <= 50; ++i) {
        const double z = -10.0 + 20.0 * i / 50.0;
        const double ref = (z == 0.0) ? 1.0 : (std::exp(z) - 1.0) / z;
        REQUIRE(rel_err(mittag_leffler(MLParams{1.0, 2.0}, z), ref) <= 1e-12);
    }
}

TEST_CASE("half-order value at -1 matches e erfc(1)", "[specfun]") {
    const double ref = 0.42758357615580705;
    REQUIRE(rel_err(mittag_leffler(MLParams{0.5, 1.0}, -1.0), ref) <= 1e-13);
}

TEST_CASE("value at zero is 1 / Gamma(mu)", "[specfun]") {
    REQUIRE(mittag_leffler(MLParams{0.5, 1.0}, 0.0) == 1.0);
    REQUIRE(rel_err(mittag_leffler(MLParams{0.5, 0.5}, 0.0), 1.0 / std::tgamma(0.5)) <= 1e-15);
    REQUIRE(rel_err(mittag_leffler(MLParams{0.3, 2.0}, 0.0), 1.0) <= 1e-15);
}

TEST_CASE("asymptotic branch matches high-precision references", "[specfun]") {
    // References computed from the defining series in 40-digit arithmetic.
    // All |z| lie beyond the series switchover for their alpha, so these pin
    // the algebraic tail (negative axis) and the exponential branch (z > 0),
    // including the pole-skipping for rational alpha.
    struct Case { double alpha, mu, z, ref; };
    const Case cases[] = {
        {0.5, 1.0, -30.0, 0.018795888861416751},
        {0.5, 1.0, -80.0, 0.007051818957039103},
        {0.5, 0.5, -30.0, 0.00031291770525374203},
        {0.5, 0.5, -80.0, 4.4066984628045579e-5},
        {0.3, 1.0, -50.0, 0.015228201501814695},
        {0.8, 1.0, -50.0, 0.0044677761579029923},
        {0.8, 0.8, -120.0, 1.2356250967345214e-5},
        {0.4, 1.3, -60.0, 0.015440096853927675},
        {0.6, 1.0, 20.0, 1.6597045718458285e+64},
    };
    for (const Case& c : cases) {
        INFO("alpha=" << c.alpha << " mu=" << c.mu << " z=" << c.z);
        REQUIRE(rel_err(mittag_leffler(MLParams{c.alpha, c.mu}, c.z), c.ref) <= 1e-12);
    }
}

TEST_CASE("branches agree across the series switchover", "[specfun]") {
    // z = -4.5 evaluates through the series, z = -4.7 through the asymptotic
    // tail (the alpha = 0.5 radius is sqrt(21) ~ 4.58). Near the switchover
    // the series loses digits to cancellation, hence the looser tolerance.
    REQUIRE(rel_err(mittag_leffler(MLParams{0.5, 1.0}, -4.5), 0.12248480427384142) <= 1e-7);
    REQUIRE(rel_err(mittag_leffler(MLParams{0.5, 1.0}, -4.7), 0.11748964756583025) <= 1e-9);
}

TEST_CASE("positive-axis values used by the envelope bound", "[specfun]") {
    REQUIRE(rel_err(mittag_leffler(MLParams{0.5, 1.0}, 3.0), 16205.988853999587) <= 1e-12);
    REQUIRE(rel_err(mittag_leffler(MLParams{0.5, 0.5}, 3.0), 48618.530751582308) <= 1e-12);
    REQUIRE(rel_err(mittag_leffler(MLParams{0.3, 1.0}, 2.0), 79485.907625183569) <= 1e-12);
    REQUIRE(mittag_leffler(MLParams{1.0, 1.0}, 2.5) == std::exp(2.5));
}

TEST_CASE("increasing on the nonnegative axis, completely monotone below", "[specfun]") {
    for (double alpha : {0.3, 0.5, 0.8}) {
        double prev = mittag_leffler(MLParams{alpha, 1.0}, -10.0);
        for (int i = 1; i <= 100; ++i) {
            const double z = -10.0 + 13.0 * i / 100.0;
            const double v = mittag_leffler(MLParams{alpha, 1.0}, z);
            REQUIRE(v > prev);
            prev = v;
        }
        REQUIRE(mittag_leffler(MLParams{alpha, 1.0}, -10.0) > 0.0);
    }
}

TEST_CASE("envelope bound dominates the endpoint", "[specfun]") {
    const MLParams p{0.5, 1.0};
    const auto b = ml_bound(p, 3.0);
    REQUIRE(b.z_max == 3.0);
    // increasing function: the endpoint is the sampled max, inflated by 1%
    REQUIRE(rel_err(b.value, 1.01 * mittag_leffler(p, 3.0)) <= 1e-14);
    REQUIRE(b.value >= mittag_leffler(p, 3.0));
    REQUIRE(ml_bound(p, 0.0).value >= 1.0);  // E(0) = 1, inflated
}

TEST_CASE("parameter validation", "[specfun]") {
    REQUIRE_THROWS_AS(mittag_leffler(MLParams{0.0, 1.0}, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(mittag_leffler(MLParams{1.2, 1.0}, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(mittag_leffler(MLParams{-0.5, 1.0}, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(mittag_leffler(MLParams{0.5, 0.0}, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(mittag_leffler(MLParams{0.5, -1.0}, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(
        mittag_leffler(MLParams{0.5, 1.0}, std::numeric_limits<double>::infinity()),
        std::domain_error);
    REQUIRE_THROWS_AS(
        mittag_leffler(MLParams{0.5, 1.0}, std::numeric_limits<double>::quiet_NaN()),
        std::domain_error);
    REQUIRE_THROWS_AS(ml_bound(MLParams{0.5, 1.0}, -1.0), std::invalid_argument);
}
