#ifndef OMDLAB_RNG_HPP
#define OMDLAB_RNG_HPP

#include <cmath>
#include <cstdint>

namespace omdlab {

// Counter-based generator (SplitMix64 finalizer in counter mode). Every draw
// is a pure function of (seed, stream, counter), so sub-streams can be read
// in any order and parallel sampling reproduces the serial sequence bit for
// bit.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t counter) const {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (counter + 1);
    z ^= 0xbf58476d1ce4e5b9ULL * (stream_ + 0x2545f4914f6cdd1dULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in (0,1): 53 mantissa bits, never exactly 0 or 1.
  double uniform01(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform01(counter);
  }

  // Box-Muller; consumes counters 2k and 2k+1.
  double normal(std::uint64_t counter) const {
    const double u1 = uniform01(2 * counter);
    const double u2 = uniform01(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace omdlab

#endif  // OMDLAB_RNG_HPP
