#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "ergopt/hfamily.hpp"
#include "ergopt/rng.hpp"
#include "oracle.hpp"

using namespace ergopt;

namespace {

ExpandingMap doubling() { return ExpandingMap(2); }
ExpandingMap perturbed(int d = 2) {
    return ExpandingMap(d, TrigPoly(0.0, {Harmonic{0.0, 0.05}}));
}
Potential cosine() { return Potential::trig(TrigPoly(0.0, {Harmonic{1.0, 0.0}})); }
TrigPoly cos_poly() { return TrigPoly(0.0, {Harmonic{1.0, 0.0}}); }

constexpr int kDepth = 64;

double cos2pi(double x) { return std::cos(two_pi * x); }

}  // namespace

TEST_CASE("h vanishes identically at the base point") {
    const ExpandingMap map = perturbed();
    const Potential f = cosine();
    Rng rng(3);
    for (int t = 0; t < 10; ++t) {
        std::vector<int> digits(kDepth);
        for (auto& v : digits) v = rng.uniform_int(2);
        const HValue h =
            eval_h(map, f, Complex(0.9, 0.3), DadicInt(2, digits), 0.0, 1e-8);
        REQUIRE(h.value == Complex(0.0, 0.0));
        REQUIRE(h.tail_bound < 1e-8);
    }
}

TEST_CASE("series value against the direct partial-sum oracle") {
    const ExpandingMap map = doubling();
    const Potential f = cosine();
    const DadicInt zero = DadicInt::zero(2, kDepth);

    const HValue h = eval_h(map, f, 1.0, zero, 0.5, 1e-10);
    const Complex want =
        oracle::h_partial_sum_linear(2, zero.digits(), 0.5, 1.0, cos2pi, 60);
    REQUIRE(std::abs(h.value - want) < 1e-10);
    REQUIRE(h.value.real() == Catch::Approx(-1.3946498021251648).margin(1e-9));
    REQUIRE(h.value.imag() == 0.0);
    REQUIRE(h.tail_bound < 1e-10);

    // a nonzero word too
    const DadicInt w = DadicInt::iota(5, 2, kDepth);
    const HValue h5 = eval_h(map, f, Complex(0.7, 0.2), w, 0.3, 1e-10);
    const Complex want5 = oracle::h_partial_sum_linear(2, w.digits(), 0.3,
                                                       Complex(0.7, 0.2), cos2pi, 80);
    REQUIRE(std::abs(h5.value - want5) < 1e-10);
}

TEST_CASE("coboundary potential gives word-independent h") {
    for (const Complex lambda : {Complex(1.0, 0.0), Complex(0.5, 0.0)}) {
        const ExpandingMap map = perturbed();
        const Potential f = Potential::coboundary(cos_poly(), lambda, 0.0, map);
        Rng rng(5);
        for (int t = 0; t < 5; ++t) {
            std::vector<int> digits(kDepth);
            for (auto& v : digits) v = rng.uniform_int(2);
            const double x = rng.uniform01();
            const HValue h = eval_h(map, f, lambda, DadicInt(2, digits), x, 1e-9);
            // h_w = phi - phi(0) regardless of the word
            REQUIRE(std::abs(h.value - Complex(cos2pi(x) - 1.0, 0.0)) < 5e-9);
        }
    }
}

TEST_CASE("halving the tolerance moves the value at most by the old tail") {
    const ExpandingMap map = perturbed();
    const Potential f = cosine();
    Rng rng(7);
    for (int t = 0; t < 25; ++t) {
        std::vector<int> digits(kDepth);
        for (auto& v : digits) v = rng.uniform_int(2);
        const DadicInt w(2, digits);
        const double x = rng.uniform01();
        const double tol = 1e-6;
        const HValue a = eval_h(map, f, 0.8, w, x, tol);
        const HValue b = eval_h(map, f, 0.8, w, x, tol / 2);
        REQUIRE(std::abs(a.value - b.value) <= a.tail_bound + 1e-15);
        REQUIRE(b.truncation_n >= a.truncation_n);
    }
}

TEST_CASE("truncation depth is minimal for the geometric bound") {
    const ExpandingMap map = doubling();
    const Potential f = cosine();
    const DadicInt w = DadicInt::iota(3, 2, kDepth);
    const double x = 0.7, tol = 1e-8;
    const HValue h = eval_h(map, f, 0.9, w, x, tol);
    const double r = 0.9 / map.lambda1();
    const double A = f.lipschitz_bound() * map.contraction_C();
    REQUIRE(A * std::pow(r, h.truncation_n) / (1 - r) < tol);
    REQUIRE(h.truncation_n >= 1);
    REQUIRE(A * std::pow(r, h.truncation_n - 1) / (1 - r) >= tol);
}

TEST_CASE("evaluation refuses when the word is too shallow") {
    const ExpandingMap map = doubling();
    const Potential f = cosine();
    const DadicInt shallow = DadicInt::iota(1, 2, 4);
    REQUIRE_THROWS_WITH(eval_h(map, f, 1.0, shallow, 0.5, 1e-10),
                        Catch::Matchers::ContainsSubstring("depth"));
    REQUIRE_THROWS_AS(eval_h(map, f, 2.5, DadicInt::zero(2, kDepth), 0.5, 1e-8),
                      std::invalid_argument);
}

TEST_CASE("shift identity") {
    const ExpandingMap lin = doubling();
    const Potential f = cosine();
    const auto grid = uniform_grid(64);
    REQUIRE(shift_identity_check(lin, f, 1.0, DadicInt::zero(2, kDepth), 0, grid,
                                 1e-10) == 0.0);
    REQUIRE(shift_identity_check(lin, f, 1.0, DadicInt::zero(2, kDepth), 1, grid,
                                 1e-10) <= 2e-10);

    const ExpandingMap p3 = perturbed(3);
    REQUIRE(shift_identity_check(p3, f, 0.8, DadicInt::iota(5, 3, kDepth), 2, grid,
                                 1e-10) <= 2e-10);
}

TEST_CASE("shift identity on random words") {
    const ExpandingMap map = perturbed();
    const Potential f = cosine();
    const auto grid = uniform_grid(8);
    Rng rng(31);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        std::vector<int> digits(kDepth);
        for (auto& v : digits) v = rng.uniform_int(2);
        const int m = rng.uniform_int(4);
        worst = std::max(worst, shift_identity_check(map, f, 0.9, DadicInt(2, digits),
                                                     m, grid, 1e-9));
    }
    REQUIRE(worst <= 2e-9);
}

TEST_CASE("functional equation of the zero-word series") {
    const auto grid = uniform_grid(128);
    const ExpandingMap lin = doubling();
    const Potential f = cosine();
    REQUIRE(functional_equation_check(lin, f, 1.0, grid, 2.5e-10, kDepth) <= 1e-9);
    REQUIRE(functional_equation_check(lin, f, 0.5, grid, 2.5e-10, kDepth) <= 1e-9);

    // random instances at mixed lambda, including complex
    const ExpandingMap pert = perturbed();
    Rng rng(37);
    for (int t = 0; t < 10; ++t) {
        const double ang = two_pi * rng.uniform01();
        const double mag = 0.3 + 0.9 * rng.uniform01();
        const Complex lambda(mag * std::cos(ang), mag * std::sin(ang));
        const double res =
            functional_equation_check(pert, f, lambda, uniform_grid(16), 1e-9, kDepth);
        REQUIRE(res <= (1.0 + std::abs(lambda)) * 2e-9);
    }
}

TEST_CASE("transversality scan separates the two regimes") {
    const auto grid = uniform_grid(256);
    Rng rng(41);

    SECTION("identical words deviate by zero") {
        const ExpandingMap lin = doubling();
        const DadicInt w = DadicInt::iota(3, 2, kDepth);
        const auto verdict = transversality_scan(lin, cosine(), 1.0, {w, w}, grid,
                                                 1e-8, 1e-3, 1e-9);
        REQUIRE(verdict.witness_pairs.size() == 1);
        REQUIRE(verdict.witness_pairs[0].max_dev == 0.0);
        REQUIRE_FALSE(verdict.witness_pairs[0].distinct);
        REQUIRE(verdict.outcome == Dichotomy::degenerate);
    }

    SECTION("coboundary potential is degenerate") {
        const ExpandingMap map = perturbed();
        const Potential f = Potential::coboundary(cos_poly(), 0.5, 0.3, map);
        const auto words = default_scan_words(2, kDepth, rng);
        const auto verdict =
            transversality_scan(map, f, 0.5, words, uniform_grid(64), 1e-8, 1e-3, 1e-9);
        REQUIRE(verdict.outcome == Dichotomy::degenerate);
        REQUIRE(verdict.margin < 1e-8);
    }

    SECTION("cosine on the doubling map is transversal") {
        const ExpandingMap lin = doubling();
        const auto words = default_scan_words(2, kDepth, rng);
        REQUIRE(words.size() == 12);
        const auto verdict =
            transversality_scan(lin, cosine(), 1.0, words, grid, 1e-8, 1e-3, 1e-9);
        REQUIRE(verdict.outcome == Dichotomy::transversal);
        REQUIRE(verdict.margin > 1e-3);
    }

    SECTION("threshold ordering is enforced") {
        const ExpandingMap lin = doubling();
        REQUIRE_THROWS_AS(transversality_scan(lin, cosine(), 1.0,
                                              {DadicInt::zero(2, kDepth)}, grid, 1e-3,
                                              1e-8, 1e-9),
                          std::invalid_argument);
    }
}

TEST_CASE("degenerate agreement is compatible with the group action") {
    const ExpandingMap map = doubling();
    const Potential f = Potential::coboundary(cos_poly(), 1.0, 0.0, map);
    const DadicInt i = DadicInt::iota(2, 2, kDepth);
    const DadicInt j = DadicInt::iota(9, 2, kDepth);
    const auto grid = uniform_grid(16);
    const double tol = 1e-9;
    Rng rng(43);
    for (int t = 0; t < 20; ++t) {
        std::vector<int> digits(kDepth);
        for (auto& v : digits) v = rng.uniform_int(2);
        const DadicInt k(2, digits);
        double dev = 0.0;
        for (double x : grid)
            dev = std::max(dev, std::abs(eval_h(map, f, 1.0, i.add(k), x, tol).value -
                                         eval_h(map, f, 1.0, j.add(k), x, tol).value));
        REQUIRE(dev <= 4 * tol);
    }
}

TEST_CASE("periodicity probe") {
    const auto grid = uniform_grid(64);

    SECTION("coboundary: periodic with identically zero deviation") {
        const ExpandingMap map = perturbed();
        for (const Complex lambda : {Complex(1.0, 0.0), Complex(0.5, 0.0)}) {
            const Potential f = Potential::coboundary(cos_poly(), lambda, 0.3, map);
            const auto rep = periodicity_test(map, f, lambda, grid, 1e-8, 1e-9, kDepth);
            REQUIRE(rep.periodic);
            REQUIRE(rep.max_deviation < 1e-8);
            REQUIRE(rep.deviation_constant);
            REQUIRE(std::abs(rep.deviation_mean) < 1e-8);
        }
    }

    SECTION("cosine on the doubling map: aperiodic") {
        const ExpandingMap lin = doubling();
        const auto rep = periodicity_test(lin, cosine(), 1.0, grid, 1e-8, 1e-9, kDepth);
        REQUIRE_FALSE(rep.periodic);
        // deviation at x = 0 is h_0(1); oracle value of the 60-term sum
        const Complex d0 =
            oracle::h_partial_sum_linear(2, std::vector<int>(kDepth, 0), 1.0, 1.0,
                                         cos2pi, 60);
        REQUIRE(d0.real() == Catch::Approx(-3.3946498021251648).margin(1e-9));
        REQUIRE(rep.max_deviation >= std::abs(d0) - 1e-8);
    }
}

TEST_CASE("transfer equation solver") {
    const auto grid = uniform_grid(64);

    SECTION("recovers the planted solution") {
        const ExpandingMap map = perturbed();
        const Complex lambda(0.5, 0.0);
        const Potential f = Potential::coboundary(cos_poly(), lambda, 0.3, map);
        const auto res = cohomology_solve(map, f, lambda, grid, 1e-8, 1e-9, kDepth);
        REQUIRE(res.cohomologous);
        REQUIRE(res.residual < 1e-8);
        // c = f(0) = lambda^-1 phi(0) - phi(0) + 0.3
        REQUIRE(std::abs(res.c - Complex(2.0 - 1.0 + 0.3, 0.0)) < 1e-12);
        for (std::size_t g = 0; g < grid.size(); ++g)
            REQUIRE(std::abs(res.phi[g] - Complex(cos2pi(grid[g]) - 1.0, 0.0)) < 1e-8);
    }

    SECTION("rejects the transversal instance with a certificate") {
        const ExpandingMap lin = doubling();
        const auto res = cohomology_solve(lin, cosine(), 1.0, grid, 1e-8, 1e-9, kDepth);
        REQUIRE_FALSE(res.cohomologous);
        REQUIRE(res.periodicity_deviation > 3.39);
    }

    SECTION("constants are trivially cohomologous") {
        const ExpandingMap lin = doubling();
        const auto res = cohomology_solve(lin, Potential::constant(0.7), 1.0, grid,
                                          1e-8, 1e-9, kDepth);
        REQUIRE(res.cohomologous);
        REQUIRE(res.residual < 1e-12);
        for (const Complex& v : res.phi) REQUIRE(std::abs(v) < 1e-12);
    }
}
