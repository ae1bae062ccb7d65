#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <stdexcept>

namespace sasbayes {

// Purpose tags for deriving independent random streams.  Every consumer of
// randomness owns a stream keyed by (seed, purpose, indices...), so the draw
// sequence depends only on the logical position of the work item, never on
// thread count or scheduling order.
namespace stream_tag {
inline constexpr std::uint64_t data_point = 0xD5A7A01u;
inline constexpr std::uint64_t replica_init = 0x1D17u;
inline constexpr std::uint64_t sweep = 0x58EEBu;
inline constexpr std::uint64_t exchange = 0xE8C4ABu;
}  // namespace stream_tag

// SplitMix64 (Steele, Lea & Flood 2014).  The generator doubles as the key
// mixer: each key word is folded through the finalizer, so streams with
// different keys start at well-separated states.
class RngStream {
 public:
  explicit RngStream(std::uint64_t state) : state_(state) {}

  static RngStream keyed(std::uint64_t seed, std::initializer_list<std::uint64_t> key) {
    std::uint64_t h = mix(seed + kGamma);
    for (std::uint64_t word : key) h = mix(h ^ (word + kGamma));
    return RngStream(h);
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log() argument.
  double uniform_open01() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Standard normal via Box-Muller; the sine partner is discarded so that one
  // call always consumes exactly two uniforms.
  double normal() {
    const double u1 = uniform_open01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Poisson variate.  Sequential-search inversion is exact and fast for small
  // means; for mean >= 10 we switch to Hormann's PTRS transformed rejection
  // (W. Hormann, Insurance Math. Econom. 12, 1993), which is exact for all
  // means >= 10 and needs O(1) uniforms per variate.
  std::uint64_t poisson(double mean) {
    if (!(mean >= 0.0)) throw std::domain_error("poisson: mean must be >= 0");
    if (mean == 0.0) return 0;
    if (mean < 10.0) return poisson_inversion(mean);
    return poisson_ptrs(mean);
  }

  // Gamma(shape, scale) via Marsaglia & Tsang (2000).  Shapes below one are
  // boosted: X ~ Gamma(shape+1) gives X * U^(1/shape) ~ Gamma(shape).
  double gamma_variate(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0))
      throw std::domain_error("gamma_variate: shape and scale must be > 0");
    if (shape < 1.0) {
      const double u = uniform_open01();
      return gamma_variate(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, t;
      do {
        x = normal();
        t = 1.0 + c * x;
      } while (t <= 0.0);
      const double v = t * t * t;
      const double u = uniform_open01();
      if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return d * v * scale;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t poisson_inversion(double mean) {
    const double u = uniform01();
    double p = std::exp(-mean);
    double cum = p;
    std::uint64_t k = 0;
    while (u > cum) {
      ++k;
      p *= mean / static_cast<double>(k);
      cum += p;
      if (p == 0.0) break;  // guard against a pathological tail of rounding
    }
    return k;
  }

  std::uint64_t poisson_ptrs(double mean) {
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
      const double u = uniform01() - 0.5;
      const double v = uniform01();
      const double us = 0.5 - std::abs(u);
      const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
      if (k < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          k * log_mean - mean - std::lgamma(k + 1.0))
        return static_cast<std::uint64_t>(k);
    }
  }

  std::uint64_t state_;
};

}  // namespace sasbayes
