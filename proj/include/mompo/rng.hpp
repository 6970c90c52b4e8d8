#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mompo {

// Counter-free random stream: mt19937_64 plus explicit Box-Muller, so a
// stream's draw sequence depends only on its seed and call order.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : gen_(seed) {}
  virtual ~RngStream() = default;

  // Derives an independent stream from (seed, stream_id) via splitmix64.
  static RngStream fork(uint64_t seed, uint64_t stream_id);

  // Uniform in [0, 1).
  virtual double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal draw, Box-Muller without state carry-over.
  virtual double normal01() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  uint64_t raw() { return gen_(); }

 private:
  static constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::mt19937_64 gen_;
};

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline RngStream RngStream::fork(uint64_t seed, uint64_t stream_id) {
  return RngStream(splitmix64(seed ^ splitmix64(stream_id * 0x9e3779b97f4a7c15ull + 1)));
}

}  // namespace mompo
