#ifndef ERGOPT_STATS_HPP
#define ERGOPT_STATS_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ergopt {

/// One-sample Kolmogorov-Smirnov statistic against Uniform[0,1).
inline double ks_uniform_statistic(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("ks_uniform_statistic: empty");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double hi = (static_cast<double>(i) + 1.0) / n - values[i];
        const double lo = values[i] - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    return d;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample_statistic: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) ++i; else ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na -
                                  static_cast<double>(j) / nb));
    }
    return d;
}

/// Critical value for the two-sample KS test at level alpha = 0.01,
/// equal sample sizes n: c(0.01) * sqrt(2/n).
inline double ks_two_sample_threshold_001(std::size_t n) {
    return 1.628 * std::sqrt(2.0 / static_cast<double>(n));
}

}  // namespace ergopt

#endif
