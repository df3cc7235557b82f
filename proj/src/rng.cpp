#include "bfdyn/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace bfdyn {

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master + 0x9E3779B97F4A7C15ULL) ^
               mix64(index + 0xD1B54A32D192ED03ULL));
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
  // Lemire's multiply-shift rejection; unbiased.
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < n) {
    const std::uint64_t t = (0 - n) % n;
    while (lo < t) {
      m = static_cast<unsigned __int128>(next_u64()) * n;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RngStream::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be positive");
  return -std::log(uniform_pos()) / rate;
}

double RngStream::normal() {
  // Box-Muller, one deviate per pair of uniforms.
  const double u1 = uniform_pos();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

std::int64_t RngStream::poisson(double mean) {
  if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be nonnegative");
  if (mean == 0.0) return 0;
  if (mean < 10.0) return poisson_inversion(mean);
  if (mean > 1e9) {
    const double k = std::nearbyint(mean + std::sqrt(mean) * normal());
    return k < 0.0 ? 0 : static_cast<std::int64_t>(k);
  }
  return poisson_ptrs(mean);
}

std::int64_t RngStream::poisson_inversion(double mean) {
  const double limit = std::exp(-mean);
  std::int64_t k = 0;
  double prod = 1.0;
  for (;;) {
    prod *= uniform01();
    if (prod <= limit) return k;
    ++k;
  }
}

std::int64_t RngStream::poisson_ptrs(double mean) {
  // Hormann's transformed rejection with squeeze (PTRS).
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mean = std::log(mean);
  for (;;) {
    const double u = uniform01() - 0.5;
    double v = uniform01();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    if (lhs <= kf * log_mean - mean - std::lgamma(kf + 1.0))
      return static_cast<std::int64_t>(kf);
  }
}

std::int64_t RngStream::binomial(std::int64_t n, double p) {
  if (n < 0) throw std::invalid_argument("binomial: n must be nonnegative");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial: p must be in [0,1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  const bool flipped = p > 0.5;
  const double q = flipped ? 1.0 - p : p;
  const double nq = static_cast<double>(n) * q;
  std::int64_t draw;
  if (nq < 30.0) {
    draw = binomial_inversion(n, q);
  } else if (nq * (1.0 - q) > 1e9) {
    const double k = std::nearbyint(nq + std::sqrt(nq * (1.0 - q)) * normal());
    draw = k < 0.0 ? 0 : (k > static_cast<double>(n) ? n : static_cast<std::int64_t>(k));
  } else {
    draw = binomial_btrs(n, q);
  }
  return flipped ? n - draw : draw;
}

std::int64_t RngStream::binomial_inversion(std::int64_t n, double p) {
  const double q = 1.0 - p;
  const double s = p / q;
  double pmf = std::exp(static_cast<double>(n) * std::log(q));
  double cdf = pmf;
  const double u = uniform01();
  std::int64_t k = 0;
  while (u > cdf && k < n) {
    ++k;
    pmf *= s * static_cast<double>(n - k + 1) / static_cast<double>(k);
    cdf += pmf;
  }
  return k;
}

std::int64_t RngStream::binomial_btrs(std::int64_t n, double p) {
  // Hormann's BTRS transformed rejection; exact for p <= 1/2, np >= 10.
  const double nd = static_cast<double>(n);
  const double q = 1.0 - p;
  const double spq = std::sqrt(nd * p * q);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = nd * p + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double lpq = std::log(p / q);
  const auto m = static_cast<std::int64_t>(std::floor((nd + 1.0) * p));
  const double h = std::lgamma(static_cast<double>(m) + 1.0) +
                   std::lgamma(nd - static_cast<double>(m) + 1.0);
  for (;;) {
    const double u = uniform01() - 0.5;
    double v = uniform01();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + c);
    if (kf < 0.0 || kf > nd) continue;
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
    v = std::log(v * alpha / (a / (us * us) + b));
    const double ub = h - std::lgamma(kf + 1.0) - std::lgamma(nd - kf + 1.0) +
                      (kf - static_cast<double>(m)) * lpq;
    if (v <= ub) return static_cast<std::int64_t>(kf);
  }
}

}  // namespace bfdyn
