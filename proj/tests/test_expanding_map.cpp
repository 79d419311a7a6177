#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ergopt/expanding_map.hpp"
#include "ergopt/potential.hpp"
#include "ergopt/rng.hpp"
#include "oracle.hpp"

using ergopt::ExpandingMap;
using ergopt::Harmonic;
using ergopt::Rng;
using ergopt::TrigPoly;

namespace {

ExpandingMap doubling() { return ExpandingMap(2); }

ExpandingMap perturbed_doubling(double amp = 0.05) {
    return ExpandingMap(2, TrigPoly(0.0, {Harmonic{0.0, amp}}));
}

}  // namespace

TEST_CASE("lift evaluation") {
    const ExpandingMap lin = doubling();
    REQUIRE(lin.lift(0.3) == Catch::Approx(0.6).margin(1e-15));
    REQUIRE(lin.lift(1.3) == Catch::Approx(lin.lift(0.3) + 2.0).margin(1e-15));

    const ExpandingMap pert = perturbed_doubling();
    // 2*0.25 + 0.05*sin(pi/2)
    REQUIRE(pert.lift(0.25) == Catch::Approx(0.55).margin(1e-15));
}

TEST_CASE("lift periodicity on a fine grid") {
    const ExpandingMap pert = perturbed_doubling();
    double worst = 0.0;
    for (int j = 0; j < 10000; ++j) {
        const double x = j / 10000.0;
        worst = std::max(worst, std::fabs(pert.lift(x + 1.0) - pert.lift(x) - 2.0));
    }
    REQUIRE(worst < 1e-12);
}

TEST_CASE("constructor rejects bad input") {
    // P' amplitude 0.4*pi > 1 drives That' below 1
    REQUIRE_THROWS_WITH(ExpandingMap(2, TrigPoly(0.0, {Harmonic{0.0, 0.2}})),
                        Catch::Matchers::ContainsSubstring("lambda_min"));
    // P(0) != 0
    REQUIRE_THROWS_AS(ExpandingMap(2, TrigPoly(0.0, {Harmonic{0.01, 0.0}})),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(ExpandingMap(1), std::invalid_argument);
}

TEST_CASE("inverse branches") {
    const ExpandingMap lin = doubling();
    REQUIRE(lin.inverse_branch(0, 0.5) == Catch::Approx(0.25).margin(1e-13));
    REQUIRE(lin.inverse_branch(1, 0.5) == Catch::Approx(0.75).margin(1e-13));
    REQUIRE_THROWS_AS(lin.inverse_branch(2, 0.5), std::invalid_argument);

    const ExpandingMap pert = perturbed_doubling();
    // inverse of the lift example above, against a bisection oracle
    const double by_oracle = oracle::bisect_inverse(
        [&](double y) { return pert.lift(y); }, 2, 0.55);
    REQUIRE(pert.inverse_branch(0, 0.55) == Catch::Approx(0.25).margin(1e-12));
    REQUIRE(pert.inverse_branch(0, 0.55) == Catch::Approx(by_oracle).margin(1e-12));

    Rng rng(11);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const int i = rng.uniform_int(2);
        const double x = rng.uniform01();
        worst = std::max(worst,
                         std::fabs(pert.lift(pert.inverse_branch(i, x)) - (x + i)));
    }
    REQUIRE(worst < pert.branch_tol());
}

TEST_CASE("branch compositions") {
    const ExpandingMap lin = doubling();
    const std::vector<int> zeros{0, 0, 0};
    REQUIRE(lin.tau_word(zeros, 0.0) == Catch::Approx(0.0).margin(1e-13));
    const std::vector<int> onezero{1, 0};
    REQUIRE(lin.tau_word(onezero, 0.0) == Catch::Approx(0.25).margin(1e-13));

    const ExpandingMap tripling(3);
    const std::vector<int> w{2, 1};
    const auto expected = oracle::tau_word_linear(3, w, oracle::Rational::make(1, 2));
    REQUIRE(expected.num == 11);
    REQUIRE(expected.den == 18);
    REQUIRE(tripling.tau_word(w, 0.5) == Catch::Approx(expected.value()).margin(1e-13));

    // composition equals nested single-branch calls
    const ExpandingMap pert = perturbed_doubling();
    Rng rng(13);
    for (int t = 0; t < 100; ++t) {
        std::vector<int> word(static_cast<std::size_t>(1 + rng.uniform_int(8)));
        for (auto& d : word) d = rng.uniform_int(2);
        const double x = rng.uniform01();
        double nested = x;
        for (int d : word) nested = pert.inverse_branch(d, nested);
        REQUIRE(pert.tau_word(word, x) == nested);
    }
}

TEST_CASE("expansion constants") {
    const ExpandingMap lin = doubling();
    REQUIRE(lin.lambda0() == Catch::Approx(2.0).margin(1e-9));
    REQUIRE(lin.lambda1() == Catch::Approx(1.9).margin(1e-9));
    REQUIRE(lin.contraction_C() == Catch::Approx(1.0).margin(1e-9));

    const ExpandingMap pert = perturbed_doubling();
    const double lo = 2.0 - 0.1 * std::numbers::pi;
    REQUIRE(pert.lambda0() >= lo - 1e-9);
    REQUIRE(pert.lambda0() <= 2.0 + 1e-9);
    REQUIRE(pert.lambda1() < pert.lambda0());
    REQUIRE(pert.lambda_min() > 1.0);
}

TEST_CASE("branch derivative bound") {
    const ExpandingMap pert = perturbed_doubling();
    const double C = pert.contraction_C();
    const double lam1 = pert.lambda1();
    Rng rng(17);
    const double h = 1e-7;
    for (int t = 0; t < 1000; ++t) {
        const int n = 1 + rng.uniform_int(10);
        std::vector<int> word(static_cast<std::size_t>(n));
        for (auto& d : word) d = rng.uniform_int(2);
        const double x = rng.uniform01() * 0.9 + 0.05;
        const double der =
            (pert.tau_word(word, x + h) - pert.tau_word(word, x - h)) / (2 * h);
        REQUIRE(std::fabs(der) <= C * std::pow(lam1, -n) * (1.0 + 1e-5) + 1e-9);
    }
}

TEST_CASE("birkhoff sums") {
    const ExpandingMap lin = doubling();
    const ergopt::Potential f =
        ergopt::Potential::trig(TrigPoly(0.0, {Harmonic{1.0, 0.0}}));
    REQUIRE(ergopt::birkhoff_sum(lin, f, 1, 0.37) ==
            Catch::Approx(f.eval(0.37)).margin(1e-15));
    REQUIRE(ergopt::birkhoff_sum(lin, f, 2, 0.0) == Catch::Approx(2.0).margin(1e-12));
    REQUIRE(ergopt::birkhoff_sum(lin, f, 2, 1.0 / 3.0) ==
            Catch::Approx(-1.0).margin(1e-12));
}
