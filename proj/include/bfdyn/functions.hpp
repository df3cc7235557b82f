#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "bfdyn/rational.hpp"
#include "bfdyn/types.hpp"

namespace bfdyn {

// Per-simulation incremental evaluation state. A tracker is created for one
// start configuration and fed every value-changing flip in order; value()
// always equals the full evaluation on the current configuration.
class FlipTracker {
 public:
  virtual ~FlipTracker() = default;
  virtual int value() const = 0;
  // `x_after` is the configuration with the flip already applied.
  virtual void apply_flip(const Configuration& x_after, std::size_t coord) = 0;
};

// A {-1,+1}-valued function on {-1,+1}^n. Immutable after construction;
// eval() is pure and safe for concurrent use. Functions whose value depends
// on the configuration only through its +1 count report level_symmetric()
// and additionally support eval_level().
class BooleanFunction {
 public:
  virtual ~BooleanFunction() = default;

  std::size_t dimension() const { return n_; }
  bool level_symmetric() const { return level_symmetric_; }
  const std::string& descriptor() const { return descriptor_; }

  virtual int eval(const Configuration& x) const = 0;
  virtual int eval_level(std::size_t level) const;
  virtual std::unique_ptr<FlipTracker> make_tracker(const Configuration& x0) const;

 protected:
  BooleanFunction(std::size_t n, bool level_symmetric, std::string descriptor);
  void check_dimension(const Configuration& x) const;

 private:
  std::size_t n_;
  bool level_symmetric_;
  std::string descriptor_;
};

using BooleanFunctionPtr = std::shared_ptr<const BooleanFunction>;

// ---- baseline functions ----

BooleanFunctionPtr dictator(std::size_t n);
BooleanFunctionPtr parity(std::size_t n);
BooleanFunctionPtr majority(std::size_t n);  // n odd
BooleanFunctionPtr constant_function(std::size_t n, int value);
// Explicit truth table indexed by Configuration::to_mask(); n <= 24.
BooleanFunctionPtr table_function(std::size_t n, std::vector<std::int8_t> truth);

// ---- block function ----

// Consecutive blocks of nondecreasing lengths, first length 1, total <= n.
struct BlockLayout {
  std::size_t n = 0;
  std::vector<std::uint32_t> lengths;
  std::vector<std::size_t> starts;  // derived prefix offsets

  static BlockLayout make(std::size_t n, std::vector<std::uint32_t> lengths);
  // Default ladder: length l appears ceil(2^l / l^2) times, truncated to fit.
  static BlockLayout defaults(std::size_t n);
  std::size_t block_count() const { return lengths.size(); }
};

BooleanFunctionPtr block_function(BlockLayout layout);
BooleanFunctionPtr block_function(std::size_t n);  // defaults(n)

// ---- striped modification ----

// Overrides the base function on an arithmetic progression of levels chosen
// to carry minimal stationary mass, alternating -1/+1 along the progression.
class StripedFunction : public BooleanFunction {
 public:
  std::uint32_t alpha() const { return alpha_; }
  std::uint32_t offset() const { return offset_; }
  double selected_mass() const { return mass_; }
  const BooleanFunctionPtr& base() const { return base_; }

  bool on_stripes(std::size_t level) const {
    return level % alpha_ == offset_;
  }
  int stripe_value(std::size_t level) const {
    return ((level - offset_) / alpha_) % 2 == 1 ? +1 : -1;
  }

  int eval(const Configuration& x) const override;
  int eval_level(std::size_t level) const override;
  std::unique_ptr<FlipTracker> make_tracker(const Configuration& x0) const override;

  StripedFunction(BooleanFunctionPtr base, double p, std::uint32_t alpha,
                  std::uint32_t offset, double mass);

 private:
  BooleanFunctionPtr base_;
  std::uint32_t alpha_;
  std::uint32_t offset_;
  double mass_;
};

// Requires n*p*(1-p) >= 8 so that the stripe spacing is at least 2.
std::shared_ptr<const StripedFunction> striped_modification(BooleanFunctionPtr base,
                                                            double p);

// ---- pinned modification ----

// Forces the value +1 whenever the first k coordinates are all -1.
BooleanFunctionPtr pinned_modification(BooleanFunctionPtr base, std::size_t k);

// ---- circle functions ----

class CircleFunction {
 public:
  virtual ~CircleFunction() = default;
  std::int64_t cycle() const { return n_; }
  const std::string& descriptor() const { return descriptor_; }
  virtual int eval(std::int64_t pos) const = 0;

 protected:
  CircleFunction(std::int64_t n, std::string descriptor);
  void check_pos(std::int64_t pos) const;

 private:
  std::int64_t n_;
  std::string descriptor_;
};

using CircleFunctionPtr = std::shared_ptr<const CircleFunction>;

// Nested interval partition of [0,1): depth 1 is the whole circle at density
// 1/2; depth 2 splits into halves at densities 2^-2 and 1-2^-2; each further
// depth splits every interval into three, the centered child taking length
// fraction 2^-k / (1 - 2^-(k-1)) of its parent and the opposite density
// class, the side children keeping the parent's class. Densities at depth k
// are 2^-k (low class) and 1-2^-k (high class). All endpoints exact.
struct SchemeInterval {
  Rational lo;
  Rational hi;
  bool high_density = false;
};

struct IntervalScheme {
  int depth = 0;
  std::vector<SchemeInterval> intervals;

  static IntervalScheme build(int k);  // 1 <= k <= 10
  Rational density(std::size_t index) const;
};

// Discretization of an IntervalScheme onto Z_n. Positions are split at
// round(n * endpoint); within an interval of m positions and target density
// a/2^k, rank r is marked +1 iff floor(((r+1)a + 2^(k-1)) / 2^k) increases,
// i.e. a centered Bresenham spread with exactly round(m * a / 2^k) ones.
// Construction verifies every interval's realized density lies strictly
// within (target - 2^-(k+1), target + 2^-(k+1)) and throws otherwise.
class CircleSchemeFunction : public CircleFunction {
 public:
  struct IntervalReport {
    std::size_t index = 0;
    std::int64_t begin = 0;
    std::int64_t size = 0;
    std::int64_t ones = 0;
    Rational target;
    double density_gap = 0.0;  // |ones/size - target|
    bool within_band = false;
  };

  CircleSchemeFunction(std::int64_t n, int k);

  int eval(std::int64_t pos) const override;
  const IntervalScheme& scheme() const { return scheme_; }
  std::vector<IntervalReport> interval_reports() const;
  // Exact +1 count over the whole cycle.
  std::int64_t ones_total() const;

 private:
  std::int64_t interval_of(std::int64_t pos) const;
  std::int64_t ones_in(std::size_t index) const;

  IntervalScheme scheme_;
  std::vector<std::int64_t> starts_;  // size intervals+1, last == n
  std::vector<std::int64_t> numer_;   // density numerator a_i over 2^k
  int k_;
};

std::shared_ptr<const CircleSchemeFunction> circle_function(std::int64_t n, int k);
CircleFunctionPtr circle_constant(std::int64_t n, int value);
CircleFunctionPtr circle_position_parity(std::int64_t n);

// ---- hypercube lift ----

// g(x) = fc(level(x) mod cycle) on {-1,+1}^(cycle^2); cycle must be even.
BooleanFunctionPtr hypercube_lift(CircleFunctionPtr fc);

// ---- descriptors ----

class DescriptorError : public std::runtime_error {
 public:
  explicit DescriptorError(const std::string& what) : std::runtime_error(what) {}
};

struct ParsedDescriptor {
  std::string family;
  std::vector<std::pair<std::string, std::string>> args;

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;
};

ParsedDescriptor parse_descriptor(const std::string& text);

// Construct from descriptor text, e.g. "striped{base=parity,n=10001,p=0.5}".
// override_n, when nonzero, replaces the n argument (sweep support).
BooleanFunctionPtr boolean_function_from_descriptor(const std::string& text,
                                                    std::size_t override_n = 0);
CircleFunctionPtr circle_function_from_descriptor(const std::string& text,
                                                  std::int64_t override_n = 0);

// Catalog for the CLI: grammar plus one canonical example per family. Every
// example string round-trips through the parser.
std::string function_catalog_text();
std::vector<std::string> boolean_catalog_examples();
std::vector<std::string> circle_catalog_examples();

}  // namespace bfdyn
