#ifndef ERGOPT_EXPANDING_MAP_HPP
#define ERGOPT_EXPANDING_MAP_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergopt/trig_poly.hpp"

namespace ergopt {

/// Expansion data for an iterated lift: the best certified rate lambda0,
/// a strictly smaller working rate lambda1, and C such that every n-fold
/// inverse-branch composition has derivative bounded by C * lambda1^-n.
struct ExpansionConstants {
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    double contraction_C = 1.0;
};

/// Orientation-preserving analytic expanding circle map of degree d >= 2,
/// represented through its lift
///   That(x) = d*x + P(x),   P a trigonometric polynomial with P(0) = 0,
/// so That(0) = 0 and That(x+1) = That(x) + d. Construction certifies
/// That' >= lambda_min > 1 on a fine grid with a second-derivative
/// Lipschitz correction, and rejects non-expanding input.
class ExpandingMap {
public:
    static constexpr double default_branch_tol = 1e-13;
    static constexpr int certification_grid = 1 << 14;

    explicit ExpandingMap(int degree, TrigPoly perturbation = TrigPoly::zero(),
                          double branch_tol = default_branch_tol,
                          int n_max = 12, double lambda1_safety = 0.95)
        : degree_(degree),
          perturbation_(std::move(perturbation)),
          dP_(perturbation_.derivative()),
          d2P_(dP_.derivative()),
          branch_tol_(branch_tol) {
        if (degree_ < 2)
            throw std::invalid_argument("ExpandingMap: degree must be >= 2");
        if (std::fabs(perturbation_.eval(0.0)) > 1e-12)
            throw std::invalid_argument(
                "ExpandingMap: perturbation must vanish at 0 (lift fixes 0)");
        if (branch_tol_ <= 0.0)
            throw std::invalid_argument("ExpandingMap: branch_tol must be > 0");

        certify_expansion();
        constants_ = compute_expansion_constants(n_max, lambda1_safety);
    }

    int degree() const { return degree_; }
    const TrigPoly& perturbation() const { return perturbation_; }
    double branch_tol() const { return branch_tol_; }

    /// Certified lower bound for That' on all of R.
    double lambda_min() const { return lambda_min_; }
    double lambda0() const { return constants_.lambda0; }
    double lambda1() const { return constants_.lambda1; }
    double contraction_C() const { return constants_.contraction_C; }
    bool is_linear() const { return perturbation_.is_constant(); }

    double lift(double x) const { return degree_ * x + perturbation_.eval(x); }
    double lift_derivative(double x) const { return degree_ + dP_.eval(x); }
    double lift_second_derivative(double x) const { return d2P_.eval(x); }

    /// The circle map itself: That(x) mod 1.
    double circle(double x) const {
        double y = lift(x);
        y -= std::floor(y);
        if (y >= 1.0) y = 0.0;
        return y;
    }

    /// Inverse branch tau_i(x) = That^-1(x + i) for a digit 0 <= i < d.
    /// Monotone bracketing plus safeguarded Newton; the accepted root y
    /// satisfies |That(y) - (x+i)| < branch_tol.
    double inverse_branch(int digit, double x) const {
        if (digit < 0 || digit >= degree_)
            throw std::invalid_argument("inverse_branch: digit out of [0, d)");
        return invert_lift(x + static_cast<double>(digit));
    }

    /// Composition tau_{i_n} o ... o tau_{i_1}, innermost digit first.
    double tau_word(std::span<const int> word, double x) const {
        double y = x;
        for (int digit : word) y = inverse_branch(digit, y);
        return y;
    }

    /// Solve That(y) = z exactly (any real z).
    double invert_lift(double z) const {
        double lo = std::floor(z / degree_);
        double hi = lo + 1.0;
        // That(k) = d*k at integers, so [lo, hi] brackets the root.
        double y = z / degree_;
        if (y < lo || y > hi) y = 0.5 * (lo + hi);
        for (int iter = 0; iter < 200; ++iter) {
            const double err = lift(y) - z;
            if (std::fabs(err) < branch_tol_) return y;
            if (err > 0.0) hi = y; else lo = y;
            const double step = err / lift_derivative(y);
            double next = y - step;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            y = next;
        }
        throw std::runtime_error(
            "invert_lift: no convergence (map violates expansion invariants?)");
    }

    /// Recompute (lambda0, lambda1, C) scanning compositions up to n_max.
    ExpansionConstants compute_expansion_constants(
        int n_max, double lambda1_safety = 0.95,
        int grid = 1 << 12) const {
        if (n_max < 1)
            throw std::invalid_argument("expansion constants: n_max must be >= 1");
        if (!(lambda1_safety > 0.0 && lambda1_safety < 1.0))
            throw std::invalid_argument("expansion constants: safety in (0,1)");

        // m[n] = min over grid of (That^n)'(x), m[0] = 1.
        std::vector<double> m(static_cast<std::size_t>(n_max) + 1, 1.0);
        {
            std::vector<double> pts(static_cast<std::size_t>(grid));
            std::vector<double> prod(static_cast<std::size_t>(grid), 1.0);
            for (int j = 0; j < grid; ++j)
                pts[static_cast<std::size_t>(j)] = static_cast<double>(j) / grid;
            for (int n = 1; n <= n_max; ++n) {
                double mn = std::numeric_limits<double>::infinity();
                for (int j = 0; j < grid; ++j) {
                    auto& x = pts[static_cast<std::size_t>(j)];
                    auto& p = prod[static_cast<std::size_t>(j)];
                    p *= lift_derivative(x);
                    x = circle(x);
                    mn = std::min(mn, p);
                }
                m[static_cast<std::size_t>(n)] = mn;
            }
        }

        ExpansionConstants ec;
        int n_star = 1;
        for (int n = 1; n <= n_max; ++n) {
            const double rate = std::pow(m[static_cast<std::size_t>(n)],
                                         1.0 / static_cast<double>(n));
            if (rate > ec.lambda0) {
                ec.lambda0 = rate;
                n_star = n;
            }
        }
        // n = 1 on the grid can land a hair under the certified floor.
        ec.lambda0 = std::max(ec.lambda0, lambda_min_);
        ec.lambda1 = lambda1_safety * ec.lambda0;

        // sup |tau'_{w,n}| == 1/m_n. Writing n = k*n_star + r, the
        // submultiplicativity m_{a+b} >= m_a m_b gives
        //   1/m_n <= lambda1^-n * max_{r < n_star} lambda1^r / m_r,
        // valid for every n once m_{n_star}^{1/n_star} >= lambda1.
        double C = 1.0;
        for (int r = 0; r < n_star; ++r)
            C = std::max(C, std::pow(ec.lambda1, r) / m[static_cast<std::size_t>(r)]);
        for (int n = 1; n <= n_max; ++n)
            C = std::max(C, std::pow(ec.lambda1, n) / m[static_cast<std::size_t>(n)]);
        ec.contraction_C = C;
        return ec;
    }

private:
    void certify_expansion() {
        const double sup_d2 = d2P_.sup_abs_bound();
        const double h = 1.0 / certification_grid;
        double min_grid = std::numeric_limits<double>::infinity();
        for (int j = 0; j < certification_grid; ++j) {
            const double v = lift_derivative(j * h);
            min_grid = std::min(min_grid, v);
        }
        lambda_min_ = min_grid - 0.5 * h * sup_d2;
        if (!(lambda_min_ > 1.0))
            throw std::invalid_argument(
                "ExpandingMap: lambda_min = " + std::to_string(lambda_min_) +
                " <= 1, map is not (certifiably) expanding");
    }

    int degree_;
    TrigPoly perturbation_;
    TrigPoly dP_;
    TrigPoly d2P_;
    double branch_tol_;
    double lambda_min_ = 0.0;
    ExpansionConstants constants_;
};

inline ExpansionConstants expansion_constants(const ExpandingMap& map, int n_max,
                                              double lambda1_safety = 0.95) {
    return map.compute_expansion_constants(n_max, lambda1_safety);
}

}  // namespace ergopt

#endif
