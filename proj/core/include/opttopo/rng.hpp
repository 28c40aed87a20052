#ifndef OPTTOPO_RNG_HPP
#define OPTTOPO_RNG_HPP

#include <cstdint>
#include <string_view>

namespace opttopo {

/// Splittable counter-based generator (splitmix64 core). All stochastic
/// operations in the library derive independent streams from one user seed,
/// so results are reproducible across platforms and safe to parallelize
/// per stream.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    /// Derive an independent stream for a labelled purpose. The label keeps
    /// streams decorrelated even when numeric sub-seeds collide.
    SplitMix64 split(std::string_view label) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : label) {
            h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
            h *= 0x100000001b3ULL;
        }
        SplitMix64 mix(state_ ^ h);
        mix.next_u64();
        return mix;
    }

    SplitMix64 split(std::uint64_t index) const {
        SplitMix64 mix(state_ ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
        mix.next_u64();
        return mix;
    }

  private:
    std::uint64_t state_;
};

} // namespace opttopo

#endif
