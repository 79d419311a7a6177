#ifndef ERGOPT_TRIG_POLY_HPP
#define ERGOPT_TRIG_POLY_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace ergopt {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// One frequency of a real trigonometric polynomial:
// a*cos(2*pi*k*x) + b*sin(2*pi*k*x).
struct Harmonic {
    double cos_coef = 0.0;
    double sin_coef = 0.0;
};

/// Finite trigonometric polynomial on the circle,
///   p(x) = c + sum_{k=1..K} a_k cos(2 pi k x) + b_k sin(2 pi k x).
/// Arguments are in units of one full turn; evaluation reduces x mod 1
/// first, so p(x+1) == p(x) holds bit-for-bit.
class TrigPoly {
public:
    TrigPoly() = default;

    explicit TrigPoly(double constant, std::vector<Harmonic> harmonics = {})
        : constant_(constant), harmonics_(std::move(harmonics)) {}

    // Convenience: build from separate cos/sin coefficient lists (k = 1..).
    static TrigPoly from_coefficients(double constant,
                                      const std::vector<double>& cos_coefs,
                                      const std::vector<double>& sin_coefs) {
        std::vector<Harmonic> h(std::max(cos_coefs.size(), sin_coefs.size()));
        for (std::size_t k = 0; k < h.size(); ++k) {
            if (k < cos_coefs.size()) h[k].cos_coef = cos_coefs[k];
            if (k < sin_coefs.size()) h[k].sin_coef = sin_coefs[k];
        }
        return TrigPoly(constant, std::move(h));
    }

    static TrigPoly zero() { return TrigPoly(); }

    double constant() const { return constant_; }
    const std::vector<Harmonic>& harmonics() const { return harmonics_; }
    std::size_t max_frequency() const { return harmonics_.size(); }
    bool is_constant() const {
        for (const auto& h : harmonics_)
            if (h.cos_coef != 0.0 || h.sin_coef != 0.0) return false;
        return true;
    }

    double eval(double x) const {
        const double r = reduce(x);
        double s = constant_;
        for (std::size_t k = 0; k < harmonics_.size(); ++k) {
            const double ang = two_pi * static_cast<double>(k + 1) * r;
            s += harmonics_[k].cos_coef * std::cos(ang)
               + harmonics_[k].sin_coef * std::sin(ang);
        }
        return s;
    }

    double operator()(double x) const { return eval(x); }

    // Term-wise derivative; again a trigonometric polynomial.
    TrigPoly derivative() const {
        std::vector<Harmonic> h(harmonics_.size());
        for (std::size_t k = 0; k < harmonics_.size(); ++k) {
            const double w = two_pi * static_cast<double>(k + 1);
            h[k].cos_coef = w * harmonics_[k].sin_coef;
            h[k].sin_coef = -w * harmonics_[k].cos_coef;
        }
        return TrigPoly(0.0, std::move(h));
    }

    // sup |p| <= |c| + sum_k amplitude_k.
    double sup_abs_bound() const {
        double s = std::fabs(constant_);
        for (const auto& h : harmonics_)
            s += std::hypot(h.cos_coef, h.sin_coef);
        return s;
    }

    // Lipschitz constant bound: sup |p'|.
    double lipschitz_bound() const { return derivative().sup_abs_bound(); }

    TrigPoly negated() const {
        TrigPoly n = *this;
        n.constant_ = -n.constant_;
        for (auto& h : n.harmonics_) {
            h.cos_coef = -h.cos_coef;
            h.sin_coef = -h.sin_coef;
        }
        return n;
    }

    TrigPoly plus_constant(double c) const {
        TrigPoly n = *this;
        n.constant_ += c;
        return n;
    }

private:
    static double reduce(double x) {
        double r = x - std::floor(x);
        if (r >= 1.0) r = 0.0;  // floor rounding at the seam
        return r;
    }

    double constant_ = 0.0;
    std::vector<Harmonic> harmonics_;
};

}  // namespace ergopt

#endif
