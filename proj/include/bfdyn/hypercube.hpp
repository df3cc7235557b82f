#pragma once

#include "bfdyn/functions.hpp"
#include "bfdyn/rng.hpp"
#include "bfdyn/types.hpp"

namespace bfdyn {

// Continuous-time resampling dynamics on {-1,+1}^n: every coordinate carries
// an independent rate-1 clock; on a ring, the coordinate is resampled to +1
// with probability p, independently of its current value. The product
// Bernoulli(p) measure is stationary.

Configuration sample_stationary(const DynamicsParams& params, RngStream& rng);

// Two-time marginal: each coordinate is independently resampled with
// probability 1 - e^(-eps), so for a +1 coordinate
//   P[stays +1] = e^(-eps) + (1 - e^(-eps)) p,
// and symmetrically for the other three cases.
Configuration evolve_pair(const Configuration& x0, double eps,
                          const DynamicsParams& params, RngStream& rng);

// Full event record over [0, horizon]: superposed Poisson clocks at total
// rate n, each event resampling a uniformly chosen coordinate. Null
// resamples (value unchanged) are kept in the record.
Trajectory simulate_trajectory(const Configuration& x0, double horizon,
                               const DynamicsParams& params, RngStream& rng);

// Event-driven generator of the value-change process only: a +1 coordinate
// flips down at rate 1-p, a -1 coordinate flips up at rate p. Null resamples
// are thinned out at generation time. Used by hitting-time simulation.
class ChangeEventSimulator {
 public:
  explicit ChangeEventSimulator(const DynamicsParams& params);

  void reset(const Configuration& x0);

  struct Flip {
    double t = 0.0;
    std::uint32_t coord = 0;
    std::int8_t new_value = -1;
  };

  // Advances to the next value change; returns false once the next change
  // would land past t_limit (or no change can ever occur).
  bool next(double t_limit, RngStream& rng, Flip& out);

  const Configuration& config() const { return x_; }
  double time() const { return t_; }

 private:
  DynamicsParams params_;
  Configuration x_;
  std::vector<std::uint32_t> members_;  // +1 coordinates first, then -1
  std::vector<std::uint32_t> pos_;      // coordinate -> index into members_
  std::size_t ups_ = 0;
  double t_ = 0.0;
};

// First time f changes value along the path started at x0, censored at
// `cutoff`. f is re-evaluated only through its incremental tracker.
HitResult hitting_time(const Configuration& x0, const BooleanFunction& f,
                       const DynamicsParams& params, double cutoff,
                       RngStream& rng);

// ---- level process ----

// The +1 count is itself Markov: up-rate (n-level) p, down-rate level (1-p).
// These entry points simulate it without storing configurations, which keeps
// level-symmetric functions tractable at n up to ~1e7.

// Two-time step of the level process: among `level` up coordinates each
// resamples down with probability (1 - e^(-eps))(1-p); among the rest each
// resamples up with probability (1 - e^(-eps)) p.
LevelState level_step(const LevelState& state, double eps,
                      const DynamicsParams& params, RngStream& rng);

LevelState sample_stationary_level(const DynamicsParams& params, RngStream& rng);

// Event-driven hitting time on the level chain; f must be level-symmetric.
HitResult level_hitting_time(const LevelState& s0, const BooleanFunction& f,
                             const DynamicsParams& params, double cutoff,
                             RngStream& rng);

// (level - n p) / sqrt(2 n p (1-p)); requires 0 < p < 1.
double normalized_level(std::size_t level, const DynamicsParams& params);

// Normalized level read off a trajectory at t=0 and at every value-change
// event. Null resample events contribute no output point.
std::vector<std::pair<double, double>> level_trajectory(const Trajectory& traj,
                                                        const DynamicsParams& params);

}  // namespace bfdyn
