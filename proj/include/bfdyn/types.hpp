#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace bfdyn {

// A point of {-1,+1}^n. Values are stored as signed bytes, always -1 or +1.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::size_t n, int fill = -1) : v_(n, check_value(fill)) {}

  std::size_t size() const { return v_.size(); }
  int operator[](std::size_t i) const { return v_[i]; }
  void set(std::size_t i, int value) { v_[i] = check_value(value); }

  // Number of +1 coordinates.
  std::size_t level() const {
    std::size_t count = 0;
    for (const auto s : v_) count += (s > 0);
    return count;
  }

  bool operator==(const Configuration&) const = default;

  // Bit i of `mask` set means coordinate i is +1. Requires n <= 64.
  static Configuration from_mask(std::size_t n, std::uint64_t mask) {
    if (n > 64) throw std::invalid_argument("from_mask: n must be <= 64");
    Configuration x(n, -1);
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1u) x.set(i, +1);
    return x;
  }

  std::uint64_t to_mask() const {
    if (size() > 64) throw std::invalid_argument("to_mask: n must be <= 64");
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < size(); ++i)
      if (v_[i] > 0) mask |= (std::uint64_t{1} << i);
    return mask;
  }

 private:
  static std::int8_t check_value(int value) {
    if (value != -1 && value != +1)
      throw std::invalid_argument("Configuration values must be -1 or +1");
    return static_cast<std::int8_t>(value);
  }

  std::vector<std::int8_t> v_;
};

// Chain parameters: dimension and the per-resample probability of +1.
struct DynamicsParams {
  std::size_t n = 0;
  double p = 0.5;

  DynamicsParams(std::size_t n_, double p_) : n(n_), p(p_) {
    if (n == 0) throw std::invalid_argument("DynamicsParams: n must be positive");
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("DynamicsParams: p must be in [0,1]");
  }
};

struct TrajectoryEvent {
  double t = 0.0;
  std::uint32_t coord = 0;
  std::int8_t new_value = -1;  // resampled value; may equal the old value
};

// A realized path over [0, horizon]: start point plus the resample events in
// strictly increasing time order.
struct Trajectory {
  double horizon = 0.0;
  Configuration start;
  std::vector<TrajectoryEvent> events;
};

// Compressed state for level-symmetric functions: only the +1 count matters.
struct LevelState {
  std::size_t n = 0;
  std::size_t level = 0;
};

// Hitting-time result with an explicit censoring marker.
struct HitResult {
  double tau = 0.0;
  bool censored = false;

  static HitResult hit(double t) { return {t, false}; }
  static HitResult censored_at(double cutoff) { return {cutoff, true}; }
};

// Position on the discrete circle Z_n.
struct CircleState {
  std::int64_t n = 0;
  std::int64_t pos = 0;
};

}  // namespace bfdyn
