#pragma once

#include <cstdint>
#include <random>

namespace ris {

// Identifies one reproducible random substream. Identical (master_seed,
// stream_id) pairs always produce identical sequences; distinct stream_ids
// give statistically independent streams, so parallel workers can each own
// one without sharing a generator.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    SeedSpec substream(std::uint64_t offset) const {
        return SeedSpec{master_seed, stream_id + offset};
    }
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}
}  // namespace detail

// mt19937_64 seeded by hashing (master_seed, stream_id). The uint64->double
// mapping is done by hand so sequences are bit-identical across standard
// library implementations.
class Rng {
  public:
    explicit Rng(SeedSpec spec)
        : engine_(detail::splitmix64(detail::splitmix64(spec.master_seed) ^
                                     detail::splitmix64(~spec.stream_id))) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace ris
