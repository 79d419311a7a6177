#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ergopt/rng.hpp"
#include "ergopt/trig_poly.hpp"

using ergopt::Harmonic;
using ergopt::Rng;
using ergopt::TrigPoly;

namespace {

TrigPoly sample_poly() {
    return TrigPoly(0.2, {Harmonic{0.3, -0.1}, Harmonic{0.0, 0.07}, Harmonic{-0.02, 0.05}});
}

}  // namespace

TEST_CASE("evaluation matches the defining sum") {
    const TrigPoly p = sample_poly();
    Rng rng(42);
    for (int i = 0; i < 50; ++i) {
        const double x = 3.0 * rng.uniform01() - 1.0;
        const double expected = 0.2 + 0.3 * std::cos(ergopt::two_pi * x) -
                                0.1 * std::sin(ergopt::two_pi * x) +
                                0.07 * std::sin(2 * ergopt::two_pi * x) -
                                0.02 * std::cos(3 * ergopt::two_pi * x) +
                                0.05 * std::sin(3 * ergopt::two_pi * x);
        REQUIRE(p.eval(x) == Catch::Approx(expected).margin(1e-12));
    }
}

TEST_CASE("evaluation is exactly 1-periodic") {
    const TrigPoly p = sample_poly();
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const double x = rng.uniform01();
        REQUIRE(p.eval(x + 1.0) == p.eval(x));
        REQUIRE(p.eval(x - 1.0) == p.eval(x));
    }
}

TEST_CASE("derivative agrees with central finite differences") {
    const TrigPoly p = sample_poly();
    const TrigPoly dp = p.derivative();
    const double h = 1e-6;
    Rng rng(9);
    for (int i = 0; i < 50; ++i) {
        const double x = rng.uniform01();
        const double fd = (p.eval(x + h) - p.eval(x - h)) / (2 * h);
        REQUIRE(dp.eval(x) == Catch::Approx(fd).margin(1e-7));
    }
}

TEST_CASE("sup and Lipschitz bounds dominate sampled values") {
    const TrigPoly p = sample_poly();
    const double sup = p.sup_abs_bound();
    const double lip = p.lipschitz_bound();
    double seen_sup = 0.0, seen_slope = 0.0;
    for (int j = 0; j < 4096; ++j) {
        const double x = j / 4096.0;
        seen_sup = std::max(seen_sup, std::fabs(p.eval(x)));
        seen_slope = std::max(seen_slope, std::fabs(p.derivative().eval(x)));
    }
    REQUIRE(seen_sup <= sup + 1e-12);
    REQUIRE(seen_slope <= lip + 1e-12);
}

TEST_CASE("negation and constant shift") {
    const TrigPoly p = sample_poly();
    REQUIRE(p.negated().eval(0.37) == Catch::Approx(-p.eval(0.37)).margin(1e-15));
    REQUIRE(p.plus_constant(1.5).eval(0.37) ==
            Catch::Approx(p.eval(0.37) + 1.5).margin(1e-15));
}
