#ifndef REDQSIM_RNG_H
#define REDQSIM_RNG_H

#include <cstdint>
#include <random>

namespace redqsim {

// Seeded generator with a platform-independent uniform conversion.
// std::uniform_real_distribution is not specified bit-for-bit, so the
// [0, 1) draw is built from the top 53 bits of mt19937_64 directly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer; used to derive independent seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix_seed(base ^ mix_seed(index));
}

}  // namespace redqsim

#endif  // REDQSIM_RNG_H
