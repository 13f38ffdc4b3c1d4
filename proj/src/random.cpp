#include "dts/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace dts {

double counter_normal(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t a = mix_seed(seed, 2 * index);
  const std::uint64_t b = mix_seed(seed, 2 * index + 1);
  const double u1 = bits_to_unit_open0(a);
  const double u2 = bits_to_unit_open0(b);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

double Rng::normal() {
  const double u1 = bits_to_unit_open0(engine_());
  const double u2 = bits_to_unit_open0(engine_());
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace dts
