#ifndef ERGOPT_OPTIMIZE_HPP
#define ERGOPT_OPTIMIZE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ergopt/expanding_map.hpp"
#include "ergopt/potential.hpp"

namespace ergopt {

/// Periodic orbit located through its backward itinerary: point is the
/// fixed point of the length-p inverse-branch composition, orbit holds the
/// p forward iterates under T, average the Birkhoff mean of the potential.
struct PeriodicOrbit {
    std::vector<int> word;
    double point = 0.0;
    std::vector<double> orbit;
    double average = 0.0;
};

/// Locate the unique fixed point of tau_{w,p} (a contraction), then polish
/// against the forward map so |That^p(point) - point - m| is at machine
/// scale rather than amplified by d^p.
inline PeriodicOrbit periodic_point(const ExpandingMap& map,
                                    std::vector<int> word,
                                    double orbit_tol = 1e-12) {
    if (word.empty())
        throw std::invalid_argument("periodic_point: empty word");
    const int p = static_cast<int>(word.size());
    double y = 0.5;
    double delta = 1.0;
    const double stop = std::max(orbit_tol * 0.25, 4e-16);
    for (int iter = 0; iter < 10000 && delta > stop; ++iter) {
        const double next = map.tau_word(word, y);
        delta = std::fabs(next - y);
        y = next;
    }
    if (delta > orbit_tol)
        throw std::runtime_error(
            "periodic_point: contraction iteration stalled (invariant violation?)");

    // Newton on F(y) = That^p(y) - y - m.
    for (int polish = 0; polish < 3; ++polish) {
        double z = y, dz = 1.0;
        for (int j = 0; j < p; ++j) {
            dz *= map.lift_derivative(z);
            z = map.lift(z);
        }
        const double m = std::round(z - y);
        const double err = z - y - m;
        const double step = err / (dz - 1.0);
        if (std::fabs(step) > 0.25) break;  // polish must stay local
        y -= step;
    }

    PeriodicOrbit orb;
    orb.word = std::move(word);
    orb.point = y - std::floor(y);
    orb.orbit.resize(static_cast<std::size_t>(p));
    double x = orb.point;
    for (int j = 0; j < p; ++j) {
        orb.orbit[static_cast<std::size_t>(j)] = x;
        x = map.circle(x);
    }
    return orb;
}

namespace detail {

inline bool is_primitive_word(const std::vector<int>& w, int block = 1) {
    const int p = static_cast<int>(w.size()) / block;
    for (int q = 1; q < p; ++q) {
        if (p % q != 0) continue;
        bool repeats = true;
        for (std::size_t j = static_cast<std::size_t>(q) * block;
             j < w.size() && repeats; ++j)
            repeats = (w[j] == w[j - static_cast<std::size_t>(q) * block]);
        if (repeats) return false;
    }
    return true;
}

// Deterministic preference among near-equal averages: shorter period, then
// smaller orbit point.
inline bool orbit_preferred(const PeriodicOrbit& a, const PeriodicOrbit& b) {
    if (a.word.size() != b.word.size()) return a.word.size() < b.word.size();
    return a.point < b.point;
}

}  // namespace detail

/// Result of periodic-orbit enumeration: beta_lower is the largest Birkhoff
/// average seen (a certified lower bound for beta), argmax the witnessing
/// orbit with ties broken by (shortest period, smallest point) inside a
/// tie_eps band.
struct BetaResult {
    double beta_lower = -std::numeric_limits<double>::infinity();
    PeriodicOrbit argmax;
};

inline BetaResult beta_periodic(const ExpandingMap& map, const Potential& f,
                                int p_max, double orbit_tol = 1e-12,
                                double tie_eps = 1e-10) {
    if (p_max < 1) throw std::invalid_argument("beta_periodic: p_max must be >= 1");
    const int d = map.degree();

    // One worker per leading digit; deterministic reduction afterwards.
    auto scan_subtree = [&](int first_digit) {
        BetaResult best;
        std::vector<int> word;
        for (int p = 1; p <= p_max; ++p) {
            word.assign(static_cast<std::size_t>(p), 0);
            word[0] = first_digit;
            const std::uint64_t count = [&] {
                std::uint64_t c = 1;
                for (int j = 1; j < p; ++j) c *= static_cast<std::uint64_t>(d);
                return c;
            }();
            for (std::uint64_t idx = 0; idx < count; ++idx) {
                std::uint64_t v = idx;
                for (int j = 1; j < p; ++j) {
                    word[static_cast<std::size_t>(j)] = static_cast<int>(
                        v % static_cast<std::uint64_t>(d));
                    v /= static_cast<std::uint64_t>(d);
                }
                if (!detail::is_primitive_word(word)) continue;
                PeriodicOrbit orb = periodic_point(map, word, orbit_tol);
                double sum = 0.0;
                for (double pt : orb.orbit) sum += f.eval(pt);
                orb.average = sum / p;
                best.beta_lower = std::max(best.beta_lower, orb.average);
                if (best.argmax.word.empty() ||
                    orb.average > best.argmax.average + tie_eps ||
                    (orb.average > best.argmax.average - tie_eps &&
                     detail::orbit_preferred(orb, best.argmax)))
                    best.argmax = std::move(orb);
            }
        }
        return best;
    };

    std::vector<std::future<BetaResult>> parts;
    for (int i = 1; i < d; ++i)
        parts.push_back(std::async(std::launch::async, scan_subtree, i));
    BetaResult best = scan_subtree(0);
    for (auto& fut : parts) {
        BetaResult part = fut.get();
        best.beta_lower = std::max(best.beta_lower, part.beta_lower);
        if (part.argmax.word.empty()) continue;
        if (best.argmax.word.empty() ||
            part.argmax.average > best.argmax.average + tie_eps ||
            (part.argmax.average > best.argmax.average - tie_eps &&
             detail::orbit_preferred(part.argmax, best.argmax)))
            best.argmax = std::move(part.argmax);
    }
    return best;
}

/// inf over invariant measures, via -beta(-f).
inline double alpha_value(const ExpandingMap& map, const Potential& f, int p_max,
                          double orbit_tol = 1e-12) {
    return -beta_periodic(map, f.negated(), p_max, orbit_tol).beta_lower;
}

inline Potential lyapunov_potential(const ExpandingMap& map, int sign) {
    return Potential::log_derivative(sign, map);
}

/// Grid sub-action from the max-plus fixed-point iteration
///   (Lg)(x) = max_i [ f(tau_i x) + g(tau_i x) ],
/// renormalized by its sup each sweep. beta is the Cesaro average of the
/// last subtracted constants; defect_values holds f - g o T + g - beta on
/// the grid, whose max must end below subaction_tol for a usable sub-action.
struct SubActionGrid {
    int n_grid = 0;
    std::vector<double> g_values;
    std::vector<double> defect_values;
    double beta = 0.0;
    int iteration_count = 0;
    double defect = 0.0;      // max of defect_values
    double min_defect = 0.0;
    bool converged = false;

    double grid_point(int j) const { return static_cast<double>(j) / n_grid; }

    // gap(x) = g(Tx) - g(x) + beta - f(x) >= 0 up to the defect
    double gap(int j) const { return -defect_values[static_cast<std::size_t>(j)]; }
};

namespace detail {

inline double interp_periodic(const std::vector<double>& g, double x) {
    const int n = static_cast<int>(g.size());
    double r = x - std::floor(x);
    if (r >= 1.0) r = 0.0;
    const double pos = r * n;
    int j = static_cast<int>(pos);
    if (j >= n) j = n - 1;
    const double t = pos - j;
    const double a = g[static_cast<std::size_t>(j)];
    const double b = g[static_cast<std::size_t>((j + 1) % n)];
    return a + t * (b - a);
}

}  // namespace detail

inline SubActionGrid lax_oleinik(const ExpandingMap& map, const Potential& f,
                                 int n_grid, int max_iter = 5000,
                                 double lo_tol = 1e-10) {
    if (n_grid < (1 << 8))
        throw std::invalid_argument("lax_oleinik: n_grid must be >= 256");
    const int d = map.degree();

    // branch geometry is iteration-invariant: precompute it
    std::vector<std::vector<double>> branch_pt(
        static_cast<std::size_t>(d), std::vector<double>(static_cast<std::size_t>(n_grid)));
    std::vector<std::vector<double>> branch_f = branch_pt;
    std::vector<double> forward(static_cast<std::size_t>(n_grid));
    for (int j = 0; j < n_grid; ++j) {
        const double x = static_cast<double>(j) / n_grid;
        forward[static_cast<std::size_t>(j)] = map.circle(x);
        for (int i = 0; i < d; ++i) {
            const double y = map.inverse_branch(i, x);
            branch_pt[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = y;
            branch_f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = f.eval(y);
        }
    }

    SubActionGrid sub;
    sub.n_grid = n_grid;
    sub.g_values.assign(static_cast<std::size_t>(n_grid), 0.0);
    std::vector<double> next(static_cast<std::size_t>(n_grid));
    std::vector<double> constants;
    constants.reserve(static_cast<std::size_t>(max_iter));

    for (int iter = 0; iter < max_iter; ++iter) {
        double sup = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < n_grid; ++j) {
            double best = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < d; ++i) {
                const double v =
                    branch_f[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +
                    detail::interp_periodic(
                        sub.g_values,
                        branch_pt[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
                best = std::max(best, v);
            }
            next[static_cast<std::size_t>(j)] = best;
            sup = std::max(sup, best);
        }
        double delta = 0.0;
        for (int j = 0; j < n_grid; ++j) {
            next[static_cast<std::size_t>(j)] -= sup;
            delta = std::max(delta, std::fabs(next[static_cast<std::size_t>(j)] -
                                              sub.g_values[static_cast<std::size_t>(j)]));
        }
        sub.g_values.swap(next);
        constants.push_back(sup);
        sub.iteration_count = iter + 1;
        if (delta < lo_tol) {
            sub.converged = true;
            break;
        }
    }

    const std::size_t tail = std::min<std::size_t>(50, constants.size());
    double acc = 0.0;
    for (std::size_t i = constants.size() - tail; i < constants.size(); ++i)
        acc += constants[i];
    sub.beta = acc / static_cast<double>(tail);

    sub.defect_values.resize(static_cast<std::size_t>(n_grid));
    sub.defect = -std::numeric_limits<double>::infinity();
    sub.min_defect = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n_grid; ++j) {
        const double x = static_cast<double>(j) / n_grid;
        const double v = f.eval(x) + sub.g_values[static_cast<std::size_t>(j)] -
                         detail::interp_periodic(sub.g_values,
                                                 forward[static_cast<std::size_t>(j)]) -
                         sub.beta;
        sub.defect_values[static_cast<std::size_t>(j)] = v;
        sub.defect = std::max(sub.defect, v);
        sub.min_defect = std::min(sub.min_defect, v);
    }
    return sub;
}

/// Where the sub-action inequality is epsilon-tight: maximal runs of grid
/// points with gap <= epsilon, padded by half a cell and kept disjoint.
/// Contains the support of every maximizing measure once epsilon clears the
/// converged defect.
struct LevelSet {
    double epsilon = 0.0;
    std::vector<std::pair<double, double>> intervals;  // sorted, disjoint in [0,1)

    bool intersects(double lo, double hi) const {
        for (const auto& [a, b] : intervals)
            if (a <= hi && lo <= b) return true;
        return false;
    }

    double total_length() const {
        double s = 0.0;
        for (const auto& [a, b] : intervals) s += b - a;
        return s;
    }

    bool covers_circle() const {
        return intervals.size() == 1 && intervals[0].first <= 0.0 &&
               intervals[0].second >= 1.0;
    }
};

inline LevelSet level_set(const SubActionGrid& sub, double epsilon) {
    if (!(epsilon > sub.defect))
        throw std::invalid_argument("level_set: epsilon must exceed the defect");
    const int n = sub.n_grid;
    const double h = 1.0 / n;
    std::vector<bool> in(static_cast<std::size_t>(n));
    int n_in = 0;
    for (int j = 0; j < n; ++j) {
        in[static_cast<std::size_t>(j)] = sub.gap(j) <= epsilon;
        n_in += in[static_cast<std::size_t>(j)];
    }
    LevelSet ls;
    ls.epsilon = epsilon;
    if (n_in == n) {
        ls.intervals.emplace_back(0.0, 1.0);
        return ls;
    }
    // walk circular runs starting just after an excluded point
    int start = 0;
    while (in[static_cast<std::size_t>(start)]) ++start;
    std::vector<std::pair<double, double>> raw;
    int j = start;
    do {
        if (in[static_cast<std::size_t>(j)]) {
            int k = j;
            int len = 0;
            while (in[static_cast<std::size_t>(k)]) {
                ++len;
                k = (k + 1) % n;
            }
            const double lo = j * h - 0.5 * h;
            const double hi = (j + len - 1) * h + 0.5 * h;
            raw.emplace_back(lo, hi);
            j = k;
        } else {
            j = (j + 1) % n;
        }
    } while (j != start);
    // wrap into [0,1)
    for (auto& [lo, hi] : raw) {
        if (lo < 0.0) {
            ls.intervals.emplace_back(lo + 1.0, 1.0);
            lo = 0.0;
        }
        if (hi > 1.0) {
            ls.intervals.emplace_back(0.0, hi - 1.0);
            hi = 1.0;
        }
        if (hi > lo) ls.intervals.emplace_back(lo, hi);
    }
    std::sort(ls.intervals.begin(), ls.intervals.end());
    return ls;
}

/// Count depth-n branch cylinders all of whose forward iterates meet the
/// level set, by depth-first prepending of digits: the intermediate
/// intervals are exactly the suffix cylinders, so pruning an empty
/// intersection prunes the whole subtree. bound = log(N_n)/n dominates the
/// topological entropy of the maximal invariant set inside the level set.
struct EntropyEstimate {
    int depth = 0;
    std::uint64_t cylinder_count = 0;
    double bound = 0.0;
};

inline EntropyEstimate entropy_upper_bound(const ExpandingMap& map,
                                           const LevelSet& lset, int n) {
    if (n < 1) throw std::invalid_argument("entropy_upper_bound: n must be >= 1");
    const int d = map.degree();
    std::uint64_t count = 0;

    struct Node {
        double lo, hi;
        int depth;
    };
    std::vector<Node> stack;
    stack.push_back({0.0, 1.0, 0});
    while (!stack.empty()) {
        const Node node = stack.back();
        stack.pop_back();
        if (node.depth == n) {
            ++count;
            continue;
        }
        for (int i = 0; i < d; ++i) {
            const double lo = map.inverse_branch(i, node.lo);
            const double hi = map.inverse_branch(i, node.hi);
            if (lset.intersects(lo, hi))
                stack.push_back({lo, hi, node.depth + 1});
        }
    }

    EntropyEstimate est;
    est.depth = n;
    est.cylinder_count = count;
    est.bound = count == 0 ? 0.0 : std::log(static_cast<double>(count)) / n;
    return est;
}

/// Compare beta of the k-th iterate with k * beta: enumerate T^k-periodic
/// orbits through digit words of length k*p (primitive as block words) and
/// average the k-step Birkhoff sums over the T^k-orbit.
struct IterateCheck {
    double beta_base = 0.0;      // beta(T, f)
    double beta_iterated = 0.0;  // beta(T^k, S_k f)
    double residual = 0.0;       // |beta_iterated - k*beta_base|
};

inline IterateCheck iterate_equivalence(const ExpandingMap& map, const Potential& f,
                                        int k, int p_max, double orbit_tol = 1e-12) {
    if (k < 1) throw std::invalid_argument("iterate_equivalence: k must be >= 1");
    const int d = map.degree();
    {
        double total = 1.0;
        for (int j = 0; j < k * p_max; ++j) total *= d;
        if (total > static_cast<double>(1 << 22))
            throw std::invalid_argument(
                "iterate_equivalence: d^(k*p_max) too large; lower p_max");
    }

    IterateCheck out;
    out.beta_base = beta_periodic(map, f, p_max, orbit_tol).beta_lower;

    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> word;
    for (int p = 1; p <= p_max; ++p) {
        const int len = k * p;
        std::uint64_t count = 1;
        for (int j = 0; j < len; ++j) count *= static_cast<std::uint64_t>(d);
        word.assign(static_cast<std::size_t>(len), 0);
        for (std::uint64_t idx = 0; idx < count; ++idx) {
            std::uint64_t v = idx;
            for (int j = 0; j < len; ++j) {
                word[static_cast<std::size_t>(j)] =
                    static_cast<int>(v % static_cast<std::uint64_t>(d));
                v /= static_cast<std::uint64_t>(d);
            }
            if (!detail::is_primitive_word(word, k)) continue;
            const PeriodicOrbit orb = periodic_point(map, word, orbit_tol);
            double sum = 0.0;
            double x = orb.point;
            for (int j = 0; j < p; ++j) {
                sum += birkhoff_sum(map, f, k, x);
                for (int l = 0; l < k; ++l) x = map.circle(x);
            }
            best = std::max(best, sum / p);
        }
    }
    out.beta_iterated = best;
    out.residual = std::fabs(out.beta_iterated - k * out.beta_base);
    return out;
}

}  // namespace ergopt

#endif
