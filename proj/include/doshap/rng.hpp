#ifndef DOSHAP_RNG_HPP
#define DOSHAP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <span>

namespace doshap {

// Counter-based splittable generator. A generator is a (key, counter) pair;
// split() derives an independent stream from a key and a stream id, so the
// same master seed yields the same draws regardless of how work is divided
// between workers.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : key_(mix(seed + kGamma)) {}

  SplitRng split(std::uint64_t stream) const {
    return SplitRng(key_ ^ mix(stream * kGamma + 0x9e3779b97f4a7c15ULL));
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in {0, ..., n-1}, unbiased (rejection sampling). n must be > 0.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = -n % n;  // 2^64 mod n
    while (true) {
      const std::uint64_t x = next_u64();
      if (x >= threshold) return x % n;
    }
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  // Standard normal via Box-Muller; one value per call, spare cached.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Index into `weights` drawn proportional to the (nonnegative) entries.
  // `total` must equal their sum and be positive.
  std::size_t next_weighted(std::span<const double> weights, double total) {
    const double target = next_double() * total;
    double acc = 0.0;
    std::size_t last = weights.size() - 1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (target < acc) return i;
      if (weights[i] > 0.0) last = i;
    }
    return last;  // round-off spill: fall back to the last positive entry
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace doshap

#endif
