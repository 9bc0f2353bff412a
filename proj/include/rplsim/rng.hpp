// Deterministic random streams. The generator is SplitMix64, which is
// fully specified and produces identical sequences on every platform;
// std::uniform_* distributions are implementation-defined and are not
// used anywhere. Each node owns its own stream derived from the run
// seed, so adding a node never perturbs another node's draws.

#ifndef RPLSIM_RNG_HPP
#define RPLSIM_RNG_HPP

#include <cstdint>

namespace rplsim {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Derive an independent stream seed from a base seed and up to two
// salts (node id, purpose tag, replication index, ...).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt_a,
                                 std::uint64_t salt_b = 0) {
  std::uint64_t s = base;
  splitmix64(s);
  s ^= 0x7F4A7C15ULL + salt_a * 0xBF58476D1CE4E5B9ULL;
  splitmix64(s);
  s ^= salt_b * 0x94D049BB133111EBULL + 0x9E3779B9ULL;
  splitmix64(s);
  return s;
}

class RngStream {
 public:
  RngStream() : state_(0) {}
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform double in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi], inclusive. The modulo bias is far
  // below anything observable at simulation scales.
  std::int64_t next_in(std::int64_t lo, std::int64_t hi) {
    if (hi <= lo) return lo;
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

  bool bernoulli(double p) { return next_double() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace rplsim

#endif  // RPLSIM_RNG_HPP
