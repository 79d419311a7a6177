#ifndef ERGOPT_TESTS_ORACLE_HPP
#define ERGOPT_TESTS_ORACLE_HPP

// Test-side reference computations, kept independent of the library's own
// evaluation paths: rational arithmetic for linear maps, plain bisection
// for branch inverses, and direct partial sums for the series.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

namespace oracle {

struct Rational {
    long long num = 0;
    long long den = 1;

    static Rational make(long long n, long long d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const long long g = std::gcd(n < 0 ? -n : n, d);
        return Rational{g ? n / g : n, g ? d / g : d};
    }
    double value() const { return static_cast<double>(num) / den; }
};

// tau_i for the linear degree-d map: (x + i) / d, exact.
inline Rational tau_linear(int d, int digit, Rational x) {
    return Rational::make(x.num + static_cast<long long>(digit) * x.den,
                          x.den * d);
}

inline Rational tau_word_linear(int d, std::span<const int> word, Rational x) {
    for (int digit : word) x = tau_linear(d, digit, x);
    return x;
}

// Plain bisection inverse of a monotone lift, 200 halvings.
template <typename Lift>
double bisect_inverse(Lift lift, int degree, double z) {
    double lo = std::floor(z / degree);
    double hi = lo + 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (lift(mid) < z)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Direct partial sum of the weighted series along a digit word (digits
// beyond the supplied span are zero). The branch step is injected so linear
// cases can use the exact formula.
template <typename Tau, typename F>
std::complex<double> h_partial_sum(Tau tau, std::span<const int> digits, double x,
                                   std::complex<double> lambda, F f, int terms) {
    std::complex<double> sum = 0.0;
    std::complex<double> lam_pow = 1.0;
    double y = x;
    double z = 0.0;
    for (int n = 1; n <= terms; ++n) {
        const int digit =
            (n - 1) < static_cast<int>(digits.size()) ? digits[n - 1] : 0;
        y = tau(digit, y);
        z = tau(digit, z);
        lam_pow *= lambda;
        sum += lam_pow * (f(y) - f(z));
    }
    return sum;
}

template <typename F>
std::complex<double> h_partial_sum_linear(int d, std::span<const int> digits, double x,
                                          std::complex<double> lambda, F f, int terms) {
    return h_partial_sum(
        [d](int digit, double v) { return (v + digit) / d; }, digits, x, lambda, f,
        terms);
}

}  // namespace oracle

#endif
