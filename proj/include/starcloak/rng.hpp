#ifndef STARCLOAK_RNG_HPP
#define STARCLOAK_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace starcloak {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// mt19937_64 with hand-rolled distributions. The engine itself is fully
// specified by the standard; std:: distributions are not, so event logs
// stay byte-identical only if we avoid them.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed), base_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Unbiased integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = gen_();
    } while (r >= limit);
    return r % n;
  }

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Box-Muller, no spare caching so the stream position is predictable.
  double gaussian(double mean, double dev) {
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return mean + dev * r * std::cos(2.0 * M_PI * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Independent child stream; (seed, tag) pairs give disjoint streams in
  // practice. Used to give every pruning job its own stream.
  Rng fork(std::uint64_t tag) const {
    return Rng(splitmix64(base_ ^ splitmix64(tag)));
  }

  static Rng seeded(std::uint64_t seed, std::uint64_t tag) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(tag)));
  }

 private:
  std::mt19937_64 gen_;
  std::uint64_t base_ = 0;
};

}  // namespace starcloak

#endif
