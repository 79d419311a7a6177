#ifndef ERGOPT_POTENTIAL_HPP
#define ERGOPT_POTENTIAL_HPP

#include <cmath>
#include <complex>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>

#include "ergopt/expanding_map.hpp"
#include "ergopt/trig_poly.hpp"

namespace ergopt {

using Complex = std::complex<double>;

/// Potential on the circle. Three base kinds:
///   trig           f = p, a trigonometric polynomial
///   coboundary     f = lambda^-1 * phi o T - phi + c   (phi trig, c real)
///   log_derivative f = sign * log That'
/// plus a derived kind that shifts another potential by a coboundary and a
/// constant, f' = f + phi o T - phi + c. Compositions with T are not trig
/// polynomials, so these are kept as composite evaluators. Evaluation is
/// complex-capable: a coboundary with non-real lambda is complex-valued and
/// usable wherever only eval_c is consumed.
class Potential {
public:
    enum class Kind { trig, coboundary, log_derivative, shifted };

    static Potential trig(TrigPoly p) {
        Potential f(Kind::trig);
        f.lipschitz_ = p.lipschitz_bound();
        f.poly_ = std::move(p);
        return f;
    }

    static Potential constant(double c) { return trig(TrigPoly(c)); }

    static Potential coboundary(TrigPoly phi, Complex lambda, double c,
                                ExpandingMap map) {
        if (lambda == Complex(0.0, 0.0))
            throw std::invalid_argument("coboundary potential: lambda must be nonzero");
        Potential f(Kind::coboundary);
        // Lip(f) <= |1/lambda| Lip(phi) sup That' + Lip(phi)
        const double sup_dT = map.degree() + map.perturbation().lipschitz_bound();
        f.lipschitz_ = phi.lipschitz_bound() * (std::abs(1.0 / lambda) * sup_dT + 1.0);
        f.poly_ = std::move(phi);
        f.lambda_ = lambda;
        f.c_ = c;
        f.map_ = std::move(map);
        return f;
    }

    static Potential log_derivative(int sign, ExpandingMap map) {
        if (sign != 1 && sign != -1)
            throw std::invalid_argument("log_derivative potential: sign must be +-1");
        Potential f(Kind::log_derivative);
        // |(log That')'| = |That''| / That' <= sup|P''| / lambda_min
        f.lipschitz_ = map.perturbation().derivative().lipschitz_bound() /
                       map.lambda_min();
        f.sign_ = sign;
        f.map_ = std::move(map);
        return f;
    }

    /// f + (phi o T - phi) + c over the given map; shifts every Birkhoff
    /// average by exactly c and leaves maximizing orbits unchanged.
    Potential with_coboundary_shift(TrigPoly phi, double c, ExpandingMap map) const {
        Potential f(Kind::shifted);
        const double sup_dT = map.degree() + map.perturbation().lipschitz_bound();
        f.lipschitz_ = lipschitz_ + phi.lipschitz_bound() * (sup_dT + 1.0);
        f.poly_ = std::move(phi);
        f.c_ = c;
        f.map_ = std::move(map);
        f.base_ = std::make_shared<Potential>(*this);
        return f;
    }

    Kind kind() const { return kind_; }
    double lipschitz_bound() const { return lipschitz_; }
    Complex lambda() const { return lambda_; }
    double shift_constant() const { return c_; }
    const TrigPoly& poly() const { return poly_; }

    bool is_real() const {
        if (kind_ == Kind::coboundary) return lambda_.imag() == 0.0;
        if (kind_ == Kind::shifted) return base_->is_real();
        return true;
    }

    Complex eval_c(double x) const {
        switch (kind_) {
            case Kind::trig:
                return Complex(poly_.eval(x), 0.0);
            case Kind::coboundary: {
                const double tx = map_->circle(x);
                return poly_.eval(tx) / lambda_ - poly_.eval(x) + c_;
            }
            case Kind::log_derivative:
                return Complex(sign_ * std::log(map_->lift_derivative(x)), 0.0);
            case Kind::shifted: {
                const double tx = map_->circle(x);
                return base_->eval_c(x) + (poly_.eval(tx) - poly_.eval(x) + c_);
            }
        }
        return {};
    }

    double eval(double x) const {
        if (!is_real())
            throw std::logic_error("Potential::eval on a complex-valued potential");
        return eval_c(x).real();
    }

    double operator()(double x) const { return eval(x); }

    Potential negated() const {
        Potential f = *this;
        switch (kind_) {
            case Kind::trig:
                f.poly_ = poly_.negated();
                break;
            case Kind::coboundary:
                f.poly_ = poly_.negated();
                f.c_ = -c_;
                break;
            case Kind::log_derivative:
                f.sign_ = -sign_;
                break;
            case Kind::shifted:
                f.base_ = std::make_shared<Potential>(base_->negated());
                f.poly_ = poly_.negated();
                f.c_ = -c_;
                break;
        }
        return f;
    }

private:
    explicit Potential(Kind k) : kind_(k) {}

    Kind kind_;
    TrigPoly poly_;                     // f itself (trig) or phi
    Complex lambda_{1.0, 0.0};          // coboundary weight
    double c_ = 0.0;                    // additive constant
    int sign_ = 1;                      // log_derivative sign
    std::optional<ExpandingMap> map_;   // kinds that compose with T
    std::shared_ptr<const Potential> base_;  // shifted
    double lipschitz_ = 0.0;
};

/// Birkhoff sum f(x) + f(Tx) + ... + f(T^{k-1} x) along the circle map.
inline double birkhoff_sum(const ExpandingMap& map, const Potential& f, int k,
                           double x) {
    if (k < 1) throw std::invalid_argument("birkhoff_sum: k must be >= 1");
    double s = 0.0;
    double y = x;
    for (int j = 0; j < k; ++j) {
        s += f.eval(y);
        y = map.circle(y);
    }
    return s;
}

inline Complex birkhoff_sum_c(const ExpandingMap& map, const Potential& f, int k,
                              double x) {
    if (k < 1) throw std::invalid_argument("birkhoff_sum: k must be >= 1");
    Complex s = 0.0;
    double y = x;
    for (int j = 0; j < k; ++j) {
        s += f.eval_c(y);
        y = map.circle(y);
    }
    return s;
}

}  // namespace ergopt

#endif
