#ifndef ERGOPT_LINEARIZE_HPP
#define ERGOPT_LINEARIZE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ergopt/dadic.hpp"
#include "ergopt/expanding_map.hpp"
#include "ergopt/hfamily.hpp"
#include "ergopt/potential.hpp"
#include "ergopt/rng.hpp"

namespace ergopt {

/// Theta at iteration depth n: That^n(x) / d^n. Successive depths differ
/// by at most sup|P| / d^{n+1}, so the sequence is Cauchy with geometric
/// tail sup|P| / (d^n (d-1)).
inline double theta_eval(const ExpandingMap& map, double x, int n) {
    if (n < 1) throw std::invalid_argument("theta_eval: n must be >= 1");
    // Theta(x+1) = Theta(x) + 1: reduce first so iterates stay bounded.
    const double shift = std::floor(x);
    double y = x - shift;
    for (int j = 0; j < n; ++j) y = map.lift(y);
    return y / std::pow(static_cast<double>(map.degree()), n) + shift;
}

/// Increasing lift of the topological conjugacy to the linear model,
/// Theta o That = d * Theta, Theta(0) = 0, Theta(x+1) = Theta(x) + 1.
/// Computed by the iterate formula at a depth where the geometric increment
/// bound is below conj_tol; a cached grid provides brackets for inversion,
/// while evaluations themselves always use exact iterates.
class Conjugacy {
public:
    explicit Conjugacy(ExpandingMap map, double conj_tol = 1e-11,
                       int cache_size = 1 << 12)
        : map_(std::move(map)), conj_tol_(conj_tol) {
        if (conj_tol_ <= 0.0)
            throw std::invalid_argument("Conjugacy: conj_tol must be > 0");
        const double sup_p = map_.perturbation().sup_abs_bound();
        const int d = map_.degree();
        depth_ = 1;
        while (sup_p / (std::pow(static_cast<double>(d), depth_) * (d - 1)) >=
               conj_tol_ / (2.0 * d))
            ++depth_;
        cache_.resize(static_cast<std::size_t>(cache_size) + 1);
        for (int j = 0; j <= cache_size; ++j)
            cache_[static_cast<std::size_t>(j)] =
                theta_eval(map_, static_cast<double>(j) / cache_size, depth_);
    }

    const ExpandingMap& map() const { return map_; }
    int depth() const { return depth_; }
    double tol() const { return conj_tol_; }

    double eval(double x) const { return theta_eval(map_, x, depth_); }

    /// Theta^{-1}(y) by bracketed Newton on the exact iterate formula;
    /// the result satisfies |Theta(result) - y| < conj_tol.
    double inverse(double y) const {
        const double shift = std::floor(y);
        const double yr = y - shift;
        // bracket from the cache (Theta is strictly increasing)
        const auto it = std::upper_bound(cache_.begin(), cache_.end(), yr);
        std::size_t hi_idx = static_cast<std::size_t>(it - cache_.begin());
        hi_idx = std::min(hi_idx, cache_.size() - 1);
        const std::size_t lo_idx = hi_idx > 0 ? hi_idx - 1 : 0;
        const int n_cells = static_cast<int>(cache_.size()) - 1;
        double lo = static_cast<double>(lo_idx) / n_cells;
        double hi = static_cast<double>(hi_idx) / n_cells;
        if (lo == hi) return lo + shift;

        double x = 0.5 * (lo + hi);
        for (int iter = 0; iter < 200; ++iter) {
            const auto [theta, dtheta] = eval_with_derivative(x);
            const double err = theta - yr;
            if (std::fabs(err) < conj_tol_) return x + shift;
            if (err > 0.0) hi = x; else lo = x;
            double next = x - err / dtheta;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            x = next;
        }
        throw std::runtime_error("Conjugacy::inverse: no convergence");
    }

    /// max over the grid of |Theta(That x) - d Theta(x)|, exact iterates.
    double conjugacy_residual(const std::vector<double>& grid) const {
        double worst = 0.0;
        for (double x : grid) {
            const double lhs = eval(map_.lift(x));
            const double rhs = map_.degree() * eval(x);
            worst = std::max(worst, std::fabs(lhs - rhs));
        }
        return worst;
    }

private:
    std::pair<double, double> eval_with_derivative(double x) const {
        double y = x;
        double der = 1.0;
        for (int j = 0; j < depth_; ++j) {
            der *= map_.lift_derivative(y);
            y = map_.lift(y);
        }
        const double dn = std::pow(static_cast<double>(map_.degree()), depth_);
        return {y / dn, der / dn};
    }

    ExpandingMap map_;
    double conj_tol_;
    int depth_ = 1;
    std::vector<double> cache_;
};

/// Inverse-limit coordinate xi_m(w, x) = (x + w_1 + w_2 d + ... + w_m d^{m-1}) / d^m.
inline double xi(const DadicInt& word, int m, double x) {
    if (m < 1 || m > word.depth())
        throw std::invalid_argument("xi: need 1 <= m <= word depth");
    const double d = static_cast<double>(word.base());
    double prefix = 0.0;
    double pw = 1.0;
    for (int j = 1; j <= m; ++j) {
        prefix += word.digit(j) * pw;
        pw *= d;
    }
    return (x + prefix) / pw;
}

/// One step of the natural-extension shift on digit sequences times [0,1):
/// (w, x) -> (k0 w, d x - k0) with k0 = floor(d x).
inline std::pair<DadicInt, double> md_apply(const DadicInt& word, double x) {
    if (x < 0.0 || x >= 1.0)
        throw std::invalid_argument("md_apply: x must lie in [0,1)");
    const int d = word.base();
    int k0 = static_cast<int>(std::floor(d * x));
    if (k0 >= d) k0 = d - 1;  // guard the x -> 1 rounding edge
    return {word.prepend(k0), d * x - k0};
}

/// A draw from the product measure: i.i.d. uniform digits times uniform x.
/// Its xi_m pushforwards are uniform on [0,1) for every m.
struct MuSample {
    DadicInt digits;
    double x = 0.0;
    std::uint64_t rng_seed = 0;
};

class MuSampler {
public:
    MuSampler(int degree, int depth, std::uint64_t seed)
        : degree_(degree), depth_(depth), seed_(seed),
          rng_(Rng::substream(seed, "mu-sampler")) {}

    MuSample draw() {
        std::vector<int> digits(static_cast<std::size_t>(depth_));
        for (auto& v : digits) v = rng_.uniform_int(degree_);
        const double x = rng_.uniform01();
        return MuSample{DadicInt(degree_, std::move(digits)), x, seed_};
    }

private:
    int degree_;
    int depth_;
    std::uint64_t seed_;
    Rng rng_;
};

/// The linear-model increment H_w(x+s) - H_w(x) with H_w = h_w o Theta^{-1};
/// both series evaluations run at tol/2.
inline Complex script_H(const Conjugacy& conj, const Potential& f, Complex lambda,
                        int s, const DadicInt& word, double x, double tol) {
    const double u = conj.inverse(x);
    const Complex a =
        eval_h(conj.map(), f, lambda, word, u + static_cast<double>(s), tol / 2).value;
    const Complex b = eval_h(conj.map(), f, lambda, word, u, tol / 2).value;
    return a - b;
}

/// Max residual over samples of scriptH^{ds} o m_d - lambda * scriptH^s.
/// word_depth must leave eval_h enough digits for its truncation.
inline double check_calHd(const Conjugacy& conj, const Potential& f, Complex lambda,
                          int s, int n_samples, std::uint64_t seed, double tol,
                          int word_depth = 64) {
    MuSampler sampler(conj.map().degree(), word_depth, seed);
    const int d = conj.map().degree();
    double worst = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const MuSample smp = sampler.draw();
        const auto [w2, x2] = md_apply(smp.digits, smp.x);
        const Complex lhs = script_H(conj, f, lambda, d * s, w2, x2, tol);
        const Complex rhs = lambda * script_H(conj, f, lambda, s, smp.digits, smp.x, tol);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

/// Monte-Carlo estimate of the Fourier coefficient
///   c^s_{m,q} = int scriptH^s * conj(E_{m,q}) dmu,  E_{m,q} = exp(2 pi i q xi_m).
struct FourierCoeff {
    int s = 0;
    int m = 0;
    int q = 0;
    Complex estimate{0.0, 0.0};
    double std_error = 0.0;
    int n_samples = 0;
};

namespace detail {

inline Complex fourier_weight(const DadicInt& word, int m, int q, double x) {
    const double coord = (m == 0) ? x : xi(word, m, x);
    const double ang = -two_pi * static_cast<double>(q) * coord;
    return Complex(std::cos(ang), std::sin(ang));
}

struct MeanAccumulator {
    Complex sum{0.0, 0.0};
    double sq = 0.0;  // sum of |z|^2
    int n = 0;

    void add(Complex z) {
        sum += z;
        sq += std::norm(z);
        ++n;
    }
    Complex mean() const { return sum / static_cast<double>(n); }
    double std_error() const {
        if (n < 2) return 0.0;
        const double var =
            std::max(0.0, (sq - std::norm(sum) / n) / static_cast<double>(n - 1));
        return std::sqrt(var / static_cast<double>(n));
    }
};

}  // namespace detail

inline FourierCoeff fourier_c(const Conjugacy& conj, const Potential& f, Complex lambda,
                              int s, int m, int q, int n_samples, std::uint64_t seed,
                              double tol, int word_depth = 64) {
    if (m < 0) throw std::invalid_argument("fourier_c: m must be >= 0");
    if (word_depth < std::max(m, 1))
        throw std::invalid_argument("fourier_c: word_depth < m");
    MuSampler sampler(conj.map().degree(), word_depth, seed);
    detail::MeanAccumulator acc;
    for (int i = 0; i < n_samples; ++i) {
        const MuSample smp = sampler.draw();
        const Complex hval = script_H(conj, f, lambda, s, smp.digits, smp.x, tol);
        acc.add(hval * detail::fourier_weight(smp.digits, m, q, smp.x));
    }
    return FourierCoeff{s, m, q, acc.mean(), acc.std_error(), n_samples};
}

/// Paired test of the coefficient recursion c^{ds}_{m+1,q} = lambda c^s_{m,q}.
/// Both estimates are driven by one sample stream, the left one through the
/// pushforward m_d (which preserves mu and turns xi_{m+1} into xi_m), so the
/// recursion is not drowned in independent Monte-Carlo noise.
struct CmRecCheck {
    FourierCoeff c_next;   // (ds, m+1, q)
    FourierCoeff c_base;   // (s, m, q)
    double discrepancy = 0.0;
    double threshold = 0.0;  // 3 * (se_next + |lambda| se_base)

    bool passes() const { return discrepancy <= threshold; }
};

inline CmRecCheck check_cmrec(const Conjugacy& conj, const Potential& f, Complex lambda,
                              int s, int m, int q, int n_samples, std::uint64_t seed,
                              double tol, int word_depth = 64) {
    const int d = conj.map().degree();
    if (word_depth < m + 1)
        throw std::invalid_argument("check_cmrec: word_depth < m+1");
    MuSampler sampler(conj.map().degree(), word_depth, seed);
    detail::MeanAccumulator next, base;
    for (int i = 0; i < n_samples; ++i) {
        const MuSample smp = sampler.draw();
        const Complex hb = script_H(conj, f, lambda, s, smp.digits, smp.x, tol);
        base.add(hb * detail::fourier_weight(smp.digits, m, q, smp.x));
        const auto [w2, x2] = md_apply(smp.digits, smp.x);
        const Complex hn = script_H(conj, f, lambda, d * s, w2, x2, tol);
        next.add(hn * detail::fourier_weight(w2, m + 1, q, x2));
    }
    CmRecCheck out;
    out.c_next = FourierCoeff{d * s, m + 1, q, next.mean(), next.std_error(), n_samples};
    out.c_base = FourierCoeff{s, m, q, base.mean(), base.std_error(), n_samples};
    out.discrepancy = std::abs(out.c_next.estimate - lambda * out.c_base.estimate);
    out.threshold = 3.0 * (out.c_next.std_error + std::abs(lambda) * out.c_base.std_error);
    return out;
}

/// Smallest m_* such that q * z_m is non-integral for every m in [m_*, K],
/// where z_m = (w_1 + w_2 d + ... + w_m d^{m-1}) / d^m. Exact digit-wise
/// integer arithmetic: q * z_m is integral iff the first m base-d digits of
/// |q| * (w_1 + ... + w_K d^{K-1}) all vanish, so m_* is the position of the
/// first nonzero digit of that product.
inline int zm_nonvanish(const DadicInt& word, long long q) {
    if (q == 0) throw std::invalid_argument("zm_nonvanish: q must be nonzero");
    if (word.is_zero())
        throw std::invalid_argument("zm_nonvanish: word is zero at its depth");
    const auto qa = static_cast<unsigned long long>(q < 0 ? -q : q);
    if (qa > (1ull << 32))
        throw std::invalid_argument("zm_nonvanish: |q| too large");
    const auto d = static_cast<unsigned long long>(word.base());
    unsigned long long carry = 0;
    for (int j = 1; j <= word.depth(); ++j) {
        const unsigned long long t =
            qa * static_cast<unsigned long long>(word.digit(j)) + carry;
        if (t % d != 0) return j;
        carry = t / d;
    }
    throw std::runtime_error(
        "zm_nonvanish: q*z_m integral through depth K=" +
        std::to_string(word.depth()) + "; use a deeper word");
}

}  // namespace ergopt

#endif
