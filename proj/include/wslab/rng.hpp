#ifndef WSLAB_RNG_HPP
#define WSLAB_RNG_HPP

#include <cmath>
#include <cstdint>

namespace wslab {

// splitmix64 step; used both as a stream generator and as the mix function
// for deriving per-processor seeds from a master seed.  Chosen because its
// output is fully specified, so runs are reproducible across platforms.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// One-shot mix of a 64-bit value; used for order-independent checksums.
inline std::uint64_t mix64(std::uint64_t x) { return splitmix64(x); }

// Small deterministic RNG stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Derives the i-th substream of a master seed.  Each processor gets
  // substream(master, processor_id); the mix keeps streams decorrelated.
  static Rng substream(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master + (index + 1) * 0x9E3779B97F4A7C15ull;
    std::uint64_t first = splitmix64(s);
    return Rng(first);
  }

  std::uint64_t next() { return splitmix64(state_); }

  // Uniform draw from [0, n) via 128-bit multiply-shift.
  std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Uniform double in (0, 1]; never returns 0 so it is safe under log().
  double unit_open() {
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Exponential(lambda) variate.
  double exponential(double lambda) { return -std::log(unit_open()) / lambda; }

 private:
  std::uint64_t state_;
};

}  // namespace wslab

#endif  // WSLAB_RNG_HPP
