#ifndef ERGOPT_HFAMILY_HPP
#define ERGOPT_HFAMILY_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergopt/dadic.hpp"
#include "ergopt/expanding_map.hpp"
#include "ergopt/potential.hpp"
#include "ergopt/rng.hpp"

namespace ergopt {

/// Certified partial sum of the weighted backward-orbit series
///   h_w(x) = sum_{n>=1} lambda^n ( f(tau_{w,n}(x)) - f(tau_{w,n}(0)) ).
/// value carries the first truncation_n terms; tail_bound dominates the
/// discarded remainder via the geometric branch-contraction estimate, and
/// is below the tolerance the evaluation was requested at.
struct HValue {
    Complex value{0.0, 0.0};
    int truncation_n = 0;
    double tail_bound = 0.0;
};

namespace detail {

// Smallest n with A * r^n / (1-r) < tol.
inline int h_truncation_depth(double A, double r, double tol) {
    double bound = A / (1.0 - r);
    int n = 0;
    while (bound >= tol) {
        bound *= r;
        if (++n > 1000000)
            throw std::runtime_error("eval_h: truncation search diverged");
    }
    return n;
}

}  // namespace detail

/// Evaluate h_w(x) to within tol. Requires |lambda| < lambda1 of the map.
/// The word is consumed digit by digit; if the geometric bound needs more
/// terms than the word's depth provides, the evaluation refuses rather than
/// silently extending, since the stored digits only pin the series that far.
inline HValue eval_h(const ExpandingMap& map, const Potential& f, Complex lambda,
                     const DadicInt& word, double x, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("eval_h: tol must be > 0");
    if (word.base() != map.degree())
        throw std::invalid_argument("eval_h: word base != map degree");
    const double lam_abs = std::abs(lambda);
    const double lam1 = map.lambda1();
    if (lam_abs <= 0.0 || lam_abs >= lam1)
        throw std::invalid_argument("eval_h: need 0 < |lambda| < lambda1 = " +
                                    std::to_string(lam1));

    const double r = lam_abs / lam1;
    const double A = f.lipschitz_bound() * map.contraction_C() *
                     std::max(std::fabs(x), 1.0);
    const int n_trunc = detail::h_truncation_depth(A, r, tol);
    if (n_trunc > word.depth())
        throw std::runtime_error(
            "eval_h: tolerance unreachable at word depth K=" +
            std::to_string(word.depth()) + " (needs " + std::to_string(n_trunc) +
            " digits; use a deeper word)");

    HValue out;
    out.truncation_n = n_trunc;
    double y = x;
    double z = 0.0;
    Complex lam_pow{1.0, 0.0};
    for (int n = 1; n <= n_trunc; ++n) {
        const int digit = word.digit(n);
        y = map.inverse_branch(digit, y);
        z = map.inverse_branch(digit, z);
        lam_pow *= lambda;
        out.value += lam_pow * (f.eval_c(y) - f.eval_c(z));
    }
    out.tail_bound = A * std::pow(r, n_trunc + 1) / (1.0 - r);
    return out;
}

inline std::vector<double> uniform_grid(int n) {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        g[static_cast<std::size_t>(j)] = static_cast<double>(j) / n;
    return g;
}

/// Max residual over the grid of h_w(x+m) - h_{w + iota(m)}(x); the two
/// sides agree term by term, so anything beyond 2*tol flags a defect in
/// either the carry arithmetic or the branch chains.
inline double shift_identity_check(const ExpandingMap& map, const Potential& f,
                                   Complex lambda, const DadicInt& word, int m,
                                   const std::vector<double>& grid, double tol) {
    if (m < 0) throw std::invalid_argument("shift_identity_check: m must be >= 0");
    const DadicInt shifted =
        word.add(DadicInt::iota(static_cast<std::uint64_t>(m), word.base(),
                                word.depth()));
    double worst = 0.0;
    for (double x : grid) {
        const Complex a = eval_h(map, f, lambda, word, x + m, tol).value;
        const Complex b = eval_h(map, f, lambda, shifted, x, tol).value;
        worst = std::max(worst, std::abs(a - b));
    }
    return worst;
}

/// Max residual over the grid of h_0(That(x)) - lambda*(f0(x) + h_0(x)),
/// f0 = f - f(0). This identity holds for every potential, cohomologous
/// or not; it exercises the series against the lift directly.
inline double functional_equation_check(const ExpandingMap& map, const Potential& f,
                                        Complex lambda, const std::vector<double>& grid,
                                        double tol, int word_depth) {
    const DadicInt zero_word = DadicInt::zero(map.degree(), word_depth);
    const Complex f_at_zero = f.eval_c(0.0);
    double worst = 0.0;
    for (double x : grid) {
        const Complex lhs = eval_h(map, f, lambda, zero_word, map.lift(x), tol).value;
        const Complex h0 = eval_h(map, f, lambda, zero_word, x, tol).value;
        const Complex rhs = lambda * ((f.eval_c(x) - f_at_zero) + h0);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

enum class Dichotomy { degenerate, transversal, inconclusive };

inline const char* to_string(Dichotomy d) {
    switch (d) {
        case Dichotomy::degenerate: return "degenerate";
        case Dichotomy::transversal: return "transversal";
        case Dichotomy::inconclusive: return "inconclusive";
    }
    return "?";
}

struct PairDeviation {
    DadicInt word_i;
    DadicInt word_j;
    double max_dev = 0.0;
    double argmax_x = 0.0;
    bool distinct = true;
};

/// Outcome of a pairwise h_i vs h_j scan. degenerate: every tested pair
/// stayed below agree_tol. transversal: every distinct pair separated by
/// more than sep_margin. Anything in between is reported as inconclusive
/// instead of being forced into the dichotomy. margin is the scan's
/// distance to the relevant threshold: the smallest distinct-pair
/// deviation when transversal, the largest deviation when degenerate.
struct DichotomyVerdict {
    Dichotomy outcome = Dichotomy::inconclusive;
    std::vector<PairDeviation> witness_pairs;
    double margin = 0.0;
};

inline DichotomyVerdict transversality_scan(const ExpandingMap& map,
                                            const Potential& f, Complex lambda,
                                            const std::vector<DadicInt>& words,
                                            const std::vector<double>& grid,
                                            double agree_tol, double sep_margin,
                                            double tol) {
    if (words.size() < 2)
        throw std::invalid_argument("transversality_scan: need >= 2 words");
    if (!(agree_tol < sep_margin))
        throw std::invalid_argument("transversality_scan: agree_tol must be < sep_margin");

    // h table, one row per word.
    std::vector<std::vector<Complex>> h(words.size(),
                                        std::vector<Complex>(grid.size()));
    for (std::size_t w = 0; w < words.size(); ++w)
        for (std::size_t g = 0; g < grid.size(); ++g)
            h[w][g] = eval_h(map, f, lambda, words[w], grid[g], tol).value;

    DichotomyVerdict verdict;
    double max_all = 0.0;
    double min_distinct = std::numeric_limits<double>::infinity();
    bool any_distinct = false;
    for (std::size_t a = 0; a < words.size(); ++a) {
        for (std::size_t b = a + 1; b < words.size(); ++b) {
            PairDeviation pd{words[a], words[b], 0.0, grid.empty() ? 0.0 : grid[0],
                             words[a] != words[b]};
            for (std::size_t g = 0; g < grid.size(); ++g) {
                const double dev = std::abs(h[a][g] - h[b][g]);
                if (dev > pd.max_dev) {
                    pd.max_dev = dev;
                    pd.argmax_x = grid[g];
                }
            }
            max_all = std::max(max_all, pd.max_dev);
            if (pd.distinct) {
                any_distinct = true;
                min_distinct = std::min(min_distinct, pd.max_dev);
            }
            verdict.witness_pairs.push_back(std::move(pd));
        }
    }

    if (max_all < agree_tol) {
        verdict.outcome = Dichotomy::degenerate;
        verdict.margin = max_all;
    } else if (any_distinct && min_distinct > sep_margin) {
        verdict.outcome = Dichotomy::transversal;
        verdict.margin = min_distinct;
    } else {
        verdict.outcome = Dichotomy::inconclusive;
        verdict.margin = 0.0;
    }
    return verdict;
}

/// Default word set for scans: iota(0), ..., iota(2d-1) plus a handful of
/// random depth-K words.
inline std::vector<DadicInt> default_scan_words(int degree, int depth, Rng& rng,
                                                int n_random = 8) {
    std::vector<DadicInt> words;
    for (int m = 0; m < 2 * degree; ++m)
        words.push_back(DadicInt::iota(static_cast<std::uint64_t>(m), degree, depth));
    for (int k = 0; k < n_random; ++k) {
        std::vector<int> digits(static_cast<std::size_t>(depth));
        for (auto& v : digits) v = rng.uniform_int(degree);
        words.emplace_back(degree, std::move(digits));
    }
    return words;
}

/// Periodicity probe for h_0: the deviation function D(x) = h_0(x+1) - h_0(x)
/// on a grid, its sup, and whether D is constant across the grid (for a
/// cohomologous potential D is identically zero).
struct PeriodicityReport {
    bool periodic = false;
    double max_deviation = 0.0;
    bool deviation_constant = false;
    Complex deviation_mean{0.0, 0.0};
};

inline PeriodicityReport periodicity_test(const ExpandingMap& map, const Potential& f,
                                          Complex lambda, const std::vector<double>& grid,
                                          double agree_tol, double tol, int word_depth) {
    const DadicInt zero_word = DadicInt::zero(map.degree(), word_depth);
    PeriodicityReport rep;
    std::vector<Complex> dev(grid.size());
    Complex mean{0.0, 0.0};
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const Complex a = eval_h(map, f, lambda, zero_word, grid[g] + 1.0, tol).value;
        const Complex b = eval_h(map, f, lambda, zero_word, grid[g], tol).value;
        dev[g] = a - b;
        mean += dev[g];
        rep.max_deviation = std::max(rep.max_deviation, std::abs(dev[g]));
    }
    if (!grid.empty()) mean /= static_cast<double>(grid.size());
    rep.deviation_mean = mean;
    rep.periodic = rep.max_deviation < agree_tol;
    rep.deviation_constant = true;
    for (const Complex& v : dev)
        if (std::abs(v - mean) >= agree_tol) {
            rep.deviation_constant = false;
            break;
        }
    return rep;
}

/// Attempted transfer solution of f = lambda^-1 phi o T - phi + c.
/// When h_0 passes the periodicity test, phi := h_0 tabulated on the grid
/// and c := f(0) solve the equation; the residual re-checks it with phi
/// read as a circle function (arguments reduced mod 1). Otherwise the
/// periodicity deviation is returned as the non-cohomology certificate.
struct CohomologyResult {
    bool cohomologous = false;
    std::vector<double> grid;
    std::vector<Complex> phi;
    Complex c{0.0, 0.0};
    double residual = 0.0;
    double periodicity_deviation = 0.0;
};

inline CohomologyResult cohomology_solve(const ExpandingMap& map, const Potential& f,
                                         Complex lambda, const std::vector<double>& grid,
                                         double agree_tol, double tol, int word_depth) {
    CohomologyResult res;
    res.grid = grid;
    const PeriodicityReport rep =
        periodicity_test(map, f, lambda, grid, agree_tol, tol, word_depth);
    res.periodicity_deviation = rep.max_deviation;
    if (!rep.periodic) return res;

    const DadicInt zero_word = DadicInt::zero(map.degree(), word_depth);
    res.cohomologous = true;
    res.c = f.eval_c(0.0);
    res.phi.resize(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g)
        res.phi[g] = eval_h(map, f, lambda, zero_word, grid[g], tol).value;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double tx = map.circle(grid[g]);
        const Complex phi_tx = eval_h(map, f, lambda, zero_word, tx, tol).value;
        const Complex recon = phi_tx / lambda - res.phi[g] + res.c;
        res.residual = std::max(res.residual, std::abs(f.eval_c(grid[g]) - recon));
    }
    return res;
}

}  // namespace ergopt

#endif
