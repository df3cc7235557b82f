#pragma once

#include "bfdyn/functions.hpp"
#include "bfdyn/rng.hpp"
#include "bfdyn/types.hpp"

namespace bfdyn {

// Continuous-time simple random walk on Z_n at total jump rate n^2
// (rate n^2/2 clockwise, n^2/2 counterclockwise). The uniform measure is
// stationary. Positions are 64-bit; n up to 2^30 is supported.

CircleState sample_uniform_circle(std::int64_t n, RngStream& rng);

struct WalkSample {
  CircleState state;
  std::int64_t steps = 0;         // number of jumps taken
  std::int64_t displacement = 0;  // signed, before wrapping
};

// Two-time marginal via the compound-Poisson shortcut: the jump count over
// time eps is Poisson(n^2 eps) and each jump is +-1 with probability 1/2,
// so the displacement is sampled in O(1) instead of event by event.
WalkSample walk_pair_detail(const CircleState& y0, double eps, RngStream& rng);
CircleState walk_pair(const CircleState& y0, double eps, RngStream& rng);

// First time f changes value along the walk, censored at `cutoff`.
// Simulated event by event; the expected step count is n^2 * cutoff.
HitResult hitting_time_circle(const CircleState& y0, const CircleFunction& f,
                              double cutoff, RngStream& rng);

}  // namespace bfdyn
