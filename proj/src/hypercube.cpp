#include "bfdyn/hypercube.hpp"

#include <cmath>
#include <stdexcept>

namespace bfdyn {

namespace {

void check_start(const Configuration& x0, const DynamicsParams& params) {
  if (x0.size() != params.n)
    throw std::invalid_argument("start configuration dimension mismatch");
}

}  // namespace

Configuration sample_stationary(const DynamicsParams& params, RngStream& rng) {
  Configuration x(params.n, -1);
  for (std::size_t i = 0; i < params.n; ++i)
    if (rng.bernoulli(params.p)) x.set(i, +1);
  return x;
}

Configuration evolve_pair(const Configuration& x0, double eps,
                          const DynamicsParams& params, RngStream& rng) {
  check_start(x0, params);
  if (!(eps >= 0.0)) throw std::invalid_argument("evolve_pair: eps must be >= 0");
  const double resample = -std::expm1(-eps);  // 1 - e^(-eps)
  Configuration x = x0;
  for (std::size_t i = 0; i < params.n; ++i)
    if (rng.bernoulli(resample)) x.set(i, rng.bernoulli(params.p) ? +1 : -1);
  return x;
}

Trajectory simulate_trajectory(const Configuration& x0, double horizon,
                               const DynamicsParams& params, RngStream& rng) {
  check_start(x0, params);
  if (!(horizon >= 0.0))
    throw std::invalid_argument("simulate_trajectory: horizon must be >= 0");
  Trajectory traj;
  traj.horizon = horizon;
  traj.start = x0;
  const double rate = static_cast<double>(params.n);
  double t = 0.0;
  for (;;) {
    t += rng.exponential(rate);
    if (t > horizon) break;
    TrajectoryEvent ev;
    ev.t = t;
    ev.coord = static_cast<std::uint32_t>(rng.uniform_below(params.n));
    ev.new_value = rng.bernoulli(params.p) ? +1 : -1;
    traj.events.push_back(ev);
  }
  return traj;
}

// ---- value-change generator ----

ChangeEventSimulator::ChangeEventSimulator(const DynamicsParams& params)
    : params_(params), members_(params.n), pos_(params.n) {}

void ChangeEventSimulator::reset(const Configuration& x0) {
  check_start(x0, params_);
  x_ = x0;
  t_ = 0.0;
  ups_ = 0;
  // Two-class partition: +1 coordinates occupy members_[0, ups_).
  for (std::size_t i = 0; i < params_.n; ++i)
    if (x0[i] > 0) {
      members_[ups_] = static_cast<std::uint32_t>(i);
      ++ups_;
    }
  std::size_t down = ups_;
  for (std::size_t i = 0; i < params_.n; ++i)
    if (x0[i] < 0) {
      members_[down] = static_cast<std::uint32_t>(i);
      ++down;
    }
  for (std::size_t idx = 0; idx < params_.n; ++idx) pos_[members_[idx]] = static_cast<std::uint32_t>(idx);
}

bool ChangeEventSimulator::next(double t_limit, RngStream& rng, Flip& out) {
  const double p = params_.p;
  const double down_rate = static_cast<double>(ups_) * (1.0 - p);
  const double up_rate = static_cast<double>(params_.n - ups_) * p;
  const double total = down_rate + up_rate;
  if (total <= 0.0) return false;  // absorbing (p at 0 or 1)
  const double t_next = t_ + rng.exponential(total);
  if (t_next > t_limit) return false;
  t_ = t_next;

  std::size_t idx;
  std::int8_t new_value;
  if (rng.uniform01() * total < down_rate) {
    idx = static_cast<std::size_t>(rng.uniform_below(ups_));
    new_value = -1;
    // Move the flipped coordinate across the partition boundary.
    const std::size_t last = ups_ - 1;
    std::swap(members_[idx], members_[last]);
    pos_[members_[idx]] = static_cast<std::uint32_t>(idx);
    pos_[members_[last]] = static_cast<std::uint32_t>(last);
    idx = last;
    --ups_;
  } else {
    idx = ups_ + static_cast<std::size_t>(rng.uniform_below(params_.n - ups_));
    new_value = +1;
    std::swap(members_[idx], members_[ups_]);
    pos_[members_[idx]] = static_cast<std::uint32_t>(idx);
    pos_[members_[ups_]] = static_cast<std::uint32_t>(ups_);
    idx = ups_;
    ++ups_;
  }
  const std::uint32_t coord = members_[idx];
  x_.set(coord, new_value);
  out.t = t_;
  out.coord = coord;
  out.new_value = new_value;
  return true;
}

HitResult hitting_time(const Configuration& x0, const BooleanFunction& f,
                       const DynamicsParams& params, double cutoff, RngStream& rng) {
  check_start(x0, params);
  if (f.dimension() != params.n)
    throw std::invalid_argument("hitting_time: function dimension mismatch");
  if (!(cutoff >= 0.0)) throw std::invalid_argument("hitting_time: cutoff must be >= 0");
  const auto tracker = f.make_tracker(x0);
  const int v0 = tracker->value();
  ChangeEventSimulator sim(params);
  sim.reset(x0);
  ChangeEventSimulator::Flip flip;
  while (sim.next(cutoff, rng, flip)) {
    tracker->apply_flip(sim.config(), flip.coord);
    if (tracker->value() != v0) return HitResult::hit(flip.t);
  }
  return HitResult::censored_at(cutoff);
}

// ---- level process ----

namespace {

void check_level_state(const LevelState& state, const DynamicsParams& params) {
  if (state.n != params.n) throw std::invalid_argument("level state dimension mismatch");
  if (state.level > state.n) throw std::invalid_argument("level exceeds dimension");
}

}  // namespace

LevelState level_step(const LevelState& state, double eps, const DynamicsParams& params,
                      RngStream& rng) {
  check_level_state(state, params);
  if (!(eps >= 0.0)) throw std::invalid_argument("level_step: eps must be >= 0");
  const double resample = -std::expm1(-eps);
  const auto downs = rng.binomial(static_cast<std::int64_t>(state.level),
                                  resample * (1.0 - params.p));
  const auto ups = rng.binomial(static_cast<std::int64_t>(state.n - state.level),
                                resample * params.p);
  return {state.n, state.level - static_cast<std::size_t>(downs) +
                       static_cast<std::size_t>(ups)};
}

LevelState sample_stationary_level(const DynamicsParams& params, RngStream& rng) {
  return {params.n,
          static_cast<std::size_t>(rng.binomial(static_cast<std::int64_t>(params.n), params.p))};
}

HitResult level_hitting_time(const LevelState& s0, const BooleanFunction& f,
                             const DynamicsParams& params, double cutoff, RngStream& rng) {
  check_level_state(s0, params);
  if (f.dimension() != params.n)
    throw std::invalid_argument("level_hitting_time: function dimension mismatch");
  if (!f.level_symmetric())
    throw std::invalid_argument("level_hitting_time: function is not level-symmetric");
  if (!(cutoff >= 0.0))
    throw std::invalid_argument("level_hitting_time: cutoff must be >= 0");
  const int v0 = f.eval_level(s0.level);
  const double p = params.p;
  std::size_t level = s0.level;
  double t = 0.0;
  for (;;) {
    const double down_rate = static_cast<double>(level) * (1.0 - p);
    const double up_rate = static_cast<double>(params.n - level) * p;
    const double total = down_rate + up_rate;
    if (total <= 0.0) return HitResult::censored_at(cutoff);
    t += rng.exponential(total);
    if (t > cutoff) return HitResult::censored_at(cutoff);
    if (rng.uniform01() * total < down_rate)
      --level;
    else
      ++level;
    if (f.eval_level(level) != v0) return HitResult::hit(t);
  }
}

double normalized_level(std::size_t level, const DynamicsParams& params) {
  if (!(params.p > 0.0 && params.p < 1.0))
    throw std::invalid_argument("normalized_level: requires 0 < p < 1");
  const double np = static_cast<double>(params.n) * params.p;
  const double scale = std::sqrt(2.0 * np * (1.0 - params.p));
  return (static_cast<double>(level) - np) / scale;
}

std::vector<std::pair<double, double>> level_trajectory(const Trajectory& traj,
                                                        const DynamicsParams& params) {
  check_start(traj.start, params);
  std::vector<std::pair<double, double>> out;
  Configuration x = traj.start;
  std::size_t level = x.level();
  out.emplace_back(0.0, normalized_level(level, params));
  for (const auto& ev : traj.events) {
    if (x[ev.coord] == ev.new_value) continue;  // null resample
    x.set(ev.coord, ev.new_value);
    if (ev.new_value > 0)
      ++level;
    else
      --level;
    out.emplace_back(ev.t, normalized_level(level, params));
  }
  return out;
}

}  // namespace bfdyn
