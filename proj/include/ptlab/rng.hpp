#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace ptlab {

// splitmix64 step; used to derive child seeds from a root so that
// (root, stream labels) -> seed is a pure function.
inline std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0) {
    // absorb each label through a full avalanche; xoring into the raw
    // counter state would let small labels collide across nearby roots
    std::uint64_t s = root;
    s = splitmix64(s) ^ a;
    s = splitmix64(s) ^ b;
    return splitmix64(s);
}

// Deterministic Gaussian stream: mt19937_64 with an explicit Box-Muller
// transform.  std::normal_distribution is implementation-defined, which
// would break byte-identical replays across toolchains.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : eng_(seed) {}

    std::pair<double, double> normal_pair() {
        const double u1 = uniform(), u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        auto [z1, z2] = normal_pair();
        spare_ = z2;
        has_spare_ = true;
        return z1;
    }

  private:
    // uniform on (0, 1]; never 0, so log() is safe
    double uniform() { return double((eng_() >> 11) + 1) * 0x1p-53; }

    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ptlab
