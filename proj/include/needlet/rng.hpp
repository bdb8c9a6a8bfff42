#pragma once

#include <cstdint>
#include <random>

namespace needlet {

/// splitmix64 step; used to derive independent per-replication seeds from a
/// master seed so that parallel execution order never affects results.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for replication `rep` of the stream identified by `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t rep) {
    std::uint64_t s = master ^ (0x6a09e667f3bcc909ULL + rep * 0x9e3779b97f4a7c15ULL);
    splitmix64(s);
    return splitmix64(s);
}

/// Deterministic random stream. Wraps mt19937_64 but produces doubles
/// directly from the raw 64-bit output, so results do not depend on the
/// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform on [0,1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Random sign, +1 or -1.
    double sign() { return (gen_() & 1u) ? 1.0 : -1.0; }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace needlet
