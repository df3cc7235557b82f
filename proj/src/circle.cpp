#include "bfdyn/circle.hpp"

#include <stdexcept>

namespace bfdyn {

namespace {

std::int64_t wrap(std::int64_t pos, std::int64_t n) {
  pos %= n;
  return pos < 0 ? pos + n : pos;
}

void check_state(const CircleState& y) {
  if (y.n < 1) throw std::invalid_argument("circle state: n must be positive");
  if (y.pos < 0 || y.pos >= y.n)
    throw std::invalid_argument("circle state: position out of range");
}

}  // namespace

CircleState sample_uniform_circle(std::int64_t n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_uniform_circle: n must be positive");
  return {n, static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(n)))};
}

WalkSample walk_pair_detail(const CircleState& y0, double eps, RngStream& rng) {
  check_state(y0);
  if (!(eps >= 0.0)) throw std::invalid_argument("walk_pair: eps must be >= 0");
  const double n = static_cast<double>(y0.n);
  if (n * n * eps > 4.0e18)
    throw std::overflow_error("walk_pair: jump count does not fit in 64 bits");
  WalkSample sample;
  sample.steps = rng.poisson(n * n * eps);
  const std::int64_t right = rng.binomial(sample.steps, 0.5);
  sample.displacement = 2 * right - sample.steps;
  sample.state = {y0.n, wrap(y0.pos + sample.displacement % y0.n, y0.n)};
  return sample;
}

CircleState walk_pair(const CircleState& y0, double eps, RngStream& rng) {
  return walk_pair_detail(y0, eps, rng).state;
}

HitResult hitting_time_circle(const CircleState& y0, const CircleFunction& f,
                              double cutoff, RngStream& rng) {
  check_state(y0);
  if (f.cycle() != y0.n)
    throw std::invalid_argument("hitting_time_circle: cycle mismatch");
  if (!(cutoff >= 0.0))
    throw std::invalid_argument("hitting_time_circle: cutoff must be >= 0");
  const int v0 = f.eval(y0.pos);
  const double n = static_cast<double>(y0.n);
  const double rate = n * n;
  std::int64_t pos = y0.pos;
  double t = 0.0;
  for (;;) {
    t += rng.exponential(rate);
    if (t > cutoff) return HitResult::censored_at(cutoff);
    pos = wrap(pos + (rng.bernoulli(0.5) ? 1 : -1), y0.n);
    if (f.eval(pos) != v0) return HitResult::hit(t);
  }
}

}  // namespace bfdyn
