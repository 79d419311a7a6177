#ifndef ERGOPT_RNG_HPP
#define ERGOPT_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace ergopt {

/// Seeded generator with named sub-streams: every random draw in the
/// library flows from one master seed, and independent consumers derive
/// their stream as substream(seed, "name"). Doubles are built from raw
/// bits so identical seeds give identical samples everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(splitmix(seed)) {}

    static Rng substream(std::uint64_t master_seed, std::string_view name) {
        return Rng(master_seed ^ fnv1a(name));
    }

    std::uint64_t next_u64() { return gen_(); }

    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n), rejection sampled (no modulo bias).
    int uniform_int(int n) {
        const auto bound = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return static_cast<int>(v % bound);
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 14695981039346656037ull;
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 gen_;
};

}  // namespace ergopt

#endif
