#pragma once

#include <cstdint>
#include <random>

namespace dts {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used as a stateless hash so
// that random values can be derived from (seed, flat index) pairs.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

// Uniform in (0, 1] from the top 53 bits.
inline double bits_to_unit_open0(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// Standard normal sample number `index` of the stream named by `seed`.
// Counter-based: two SplitMix64 hashes of (seed, index) feed the cosine branch
// of Box-Muller, so the value depends only on the pair and never on call order.
double counter_normal(std::uint64_t seed, std::uint64_t index);

// Sequential generator for sampling that is naturally ordered (index
// shuffles, random dictionary atoms). mt19937_64 output is pinned by the C++
// standard; the distributions below are hand-written because the standard
// library ones are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform() { return bits_to_unit_open0(engine_()) - 0x1.0p-53; }  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n), rejection sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace dts
