#include "bfdyn/functions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "bfdyn/oracle.hpp"

namespace bfdyn {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

int sign_of(bool plus) { return plus ? +1 : -1; }

// Generic tracker: full re-evaluation after each flip.
class ReevalTracker : public FlipTracker {
 public:
  ReevalTracker(const BooleanFunction* f, const Configuration& x0)
      : f_(f), value_(f->eval(x0)) {}
  int value() const override { return value_; }
  void apply_flip(const Configuration& x_after, std::size_t) override {
    value_ = f_->eval(x_after);
  }

 private:
  const BooleanFunction* f_;
  int value_;
};

// Tracker for level-symmetric functions: only the +1 count is maintained.
class LevelTracker : public FlipTracker {
 public:
  LevelTracker(const BooleanFunction* f, std::size_t level)
      : f_(f), level_(static_cast<std::int64_t>(level)), value_(f->eval_level(level)) {}
  int value() const override { return value_; }
  void apply_flip(const Configuration& x_after, std::size_t coord) override {
    level_ += x_after[coord] > 0 ? 1 : -1;
    value_ = f_->eval_level(static_cast<std::size_t>(level_));
  }

 private:
  const BooleanFunction* f_;
  std::int64_t level_;
  int value_;
};

}  // namespace

// ---- base classes ----

BooleanFunction::BooleanFunction(std::size_t n, bool level_symmetric, std::string descriptor)
    : n_(n), level_symmetric_(level_symmetric), descriptor_(std::move(descriptor)) {
  if (n_ == 0) throw std::invalid_argument("BooleanFunction: dimension must be positive");
}

void BooleanFunction::check_dimension(const Configuration& x) const {
  if (x.size() != n_)
    throw std::invalid_argument("BooleanFunction: configuration dimension mismatch");
}

int BooleanFunction::eval_level(std::size_t) const {
  throw std::logic_error("eval_level: function is not level-symmetric: " + descriptor_);
}

std::unique_ptr<FlipTracker> BooleanFunction::make_tracker(const Configuration& x0) const {
  check_dimension(x0);
  if (level_symmetric_) return std::make_unique<LevelTracker>(this, x0.level());
  return std::make_unique<ReevalTracker>(this, x0);
}

CircleFunction::CircleFunction(std::int64_t n, std::string descriptor)
    : n_(n), descriptor_(std::move(descriptor)) {
  if (n_ < 1) throw std::invalid_argument("CircleFunction: cycle must be positive");
}

void CircleFunction::check_pos(std::int64_t pos) const {
  if (pos < 0 || pos >= n_)
    throw std::invalid_argument("CircleFunction: position out of range");
}

// ---- baselines ----

namespace {

class DictatorFunction : public BooleanFunction {
 public:
  explicit DictatorFunction(std::size_t n)
      : BooleanFunction(n, false, "dictator{n=" + std::to_string(n) + "}") {}
  int eval(const Configuration& x) const override {
    check_dimension(x);
    return x[0];
  }
};

class ParityFunction : public BooleanFunction {
 public:
  explicit ParityFunction(std::size_t n)
      : BooleanFunction(n, true, "parity{n=" + std::to_string(n) + "}") {}
  int eval(const Configuration& x) const override {
    check_dimension(x);
    return eval_level(x.level());
  }
  int eval_level(std::size_t level) const override {
    return sign_of((dimension() - level) % 2 == 0);
  }
};

class MajorityFunction : public BooleanFunction {
 public:
  explicit MajorityFunction(std::size_t n)
      : BooleanFunction(n, true, "majority{n=" + std::to_string(n) + "}") {
    if (n % 2 == 0) throw std::invalid_argument("majority: n must be odd");
  }
  int eval(const Configuration& x) const override {
    check_dimension(x);
    return eval_level(x.level());
  }
  int eval_level(std::size_t level) const override {
    return sign_of(2 * level > dimension());
  }
};

class ConstantFunction : public BooleanFunction {
 public:
  ConstantFunction(std::size_t n, int value)
      : BooleanFunction(n, true,
                        "constant{n=" + std::to_string(n) + ",v=" + std::to_string(value) + "}"),
        value_(value) {
    if (value != -1 && value != +1)
      throw std::invalid_argument("constant: value must be -1 or +1");
  }
  int eval(const Configuration& x) const override {
    check_dimension(x);
    return value_;
  }
  int eval_level(std::size_t) const override { return value_; }

 private:
  int value_;
};

class TableFunction : public BooleanFunction {
 public:
  TableFunction(std::size_t n, std::vector<std::int8_t> truth)
      : BooleanFunction(n, false, "table{n=" + std::to_string(n) + "}"),
        truth_(std::move(truth)) {
    if (n > 24) throw std::invalid_argument("table_function: n must be <= 24");
    if (truth_.size() != (std::size_t{1} << n))
      throw std::invalid_argument("table_function: truth table must have 2^n entries");
    for (const auto v : truth_)
      if (v != -1 && v != +1)
        throw std::invalid_argument("table_function: entries must be -1 or +1");
  }
  int eval(const Configuration& x) const override {
    check_dimension(x);
    return truth_[x.to_mask()];
  }

 private:
  std::vector<std::int8_t> truth_;
};

}  // namespace

BooleanFunctionPtr dictator(std::size_t n) { return std::make_shared<DictatorFunction>(n); }
BooleanFunctionPtr parity(std::size_t n) { return std::make_shared<ParityFunction>(n); }
BooleanFunctionPtr majority(std::size_t n) { return std::make_shared<MajorityFunction>(n); }
BooleanFunctionPtr constant_function(std::size_t n, int value) {
  return std::make_shared<ConstantFunction>(n, value);
}
BooleanFunctionPtr table_function(std::size_t n, std::vector<std::int8_t> truth) {
  return std::make_shared<TableFunction>(n, std::move(truth));
}

// ---- block function ----

BlockLayout BlockLayout::make(std::size_t n, std::vector<std::uint32_t> lengths) {
  if (n == 0) throw std::invalid_argument("BlockLayout: n must be positive");
  if (lengths.empty()) throw std::invalid_argument("BlockLayout: needs at least one block");
  if (lengths.front() != 1) throw std::invalid_argument("BlockLayout: first length must be 1");
  BlockLayout layout;
  layout.n = n;
  layout.starts.reserve(lengths.size());
  std::size_t sum = 0;
  std::uint32_t prev = 0;
  for (const auto len : lengths) {
    if (len == 0) throw std::invalid_argument("BlockLayout: zero-length block");
    if (len < prev) throw std::invalid_argument("BlockLayout: lengths must be nondecreasing");
    layout.starts.push_back(sum);
    sum += len;
    prev = len;
  }
  if (sum > n) throw std::invalid_argument("BlockLayout: blocks exceed dimension");
  layout.lengths = std::move(lengths);
  return layout;
}

BlockLayout BlockLayout::defaults(std::size_t n) {
  std::vector<std::uint32_t> lengths;
  std::size_t sum = 0;
  for (std::uint32_t len = 1; len < 63; ++len) {
    const std::uint64_t two_l = std::uint64_t{1} << len;
    const std::uint64_t mult = (two_l + std::uint64_t{len} * len - 1) / (std::uint64_t{len} * len);
    bool fits = true;
    for (std::uint64_t c = 0; c < mult; ++c) {
      if (sum + len > n) {
        fits = false;
        break;
      }
      lengths.push_back(len);
      sum += len;
    }
    if (!fits) break;
  }
  return make(n, std::move(lengths));
}

namespace {

class BlockFunction;

class BlockTracker : public FlipTracker {
 public:
  BlockTracker(const BlockLayout* layout, const std::vector<std::int32_t>* coord_block,
               const Configuration& x0)
      : layout_(layout), coord_block_(coord_block) {
    counts_.assign(layout_->block_count(), 0);
    for (std::size_t b = 0; b < layout_->block_count(); ++b) {
      std::uint32_t count = 0;
      for (std::size_t i = 0; i < layout_->lengths[b]; ++i)
        count += x0[layout_->starts[b] + i] > 0;
      counts_[b] = count;
      if (count == 0 || count == layout_->lengths[b]) constant_.insert(b);
    }
    refresh();
  }

  int value() const override { return value_; }

  void apply_flip(const Configuration& x_after, std::size_t coord) override {
    const std::int32_t b = (*coord_block_)[coord];
    if (b < 0) return;  // coordinate beyond the last block; f unaffected
    const auto ub = static_cast<std::uint32_t>(b);
    counts_[ub] += x_after[coord] > 0 ? 1 : -1;
    const bool constant = counts_[ub] == 0 || counts_[ub] == layout_->lengths[ub];
    if (constant)
      constant_.insert(ub);
    else
      constant_.erase(ub);
    refresh();
  }

 private:
  void refresh() {
    const std::uint32_t top = *constant_.rbegin();  // block 0 is always constant
    value_ = sign_of(counts_[top] != 0);
  }

  const BlockLayout* layout_;
  const std::vector<std::int32_t>* coord_block_;
  std::vector<std::uint32_t> counts_;
  std::set<std::uint32_t> constant_;
  int value_ = -1;
};

class BlockFunction : public BooleanFunction {
 public:
  explicit BlockFunction(BlockLayout layout)
      : BooleanFunction(layout.n, false, "block{n=" + std::to_string(layout.n) + "}"),
        layout_(std::move(layout)) {
    coord_block_.assign(layout_.n, -1);
    for (std::size_t b = 0; b < layout_.block_count(); ++b)
      for (std::size_t i = 0; i < layout_.lengths[b]; ++i)
        coord_block_[layout_.starts[b] + i] = static_cast<std::int32_t>(b);
  }

  // Value of the highest-index block on which x is constant; block 0 has
  // length 1, so some block always qualifies.
  int eval(const Configuration& x) const override {
    check_dimension(x);
    for (std::size_t b = layout_.block_count(); b-- > 0;) {
      const std::size_t start = layout_.starts[b];
      const int first = x[start];
      bool constant = true;
      for (std::size_t i = 1; i < layout_.lengths[b]; ++i) {
        if (x[start + i] != first) {
          constant = false;
          break;
        }
      }
      if (constant) return first;
    }
    return x[0];  // unreachable
  }

  std::unique_ptr<FlipTracker> make_tracker(const Configuration& x0) const override {
    check_dimension(x0);
    return std::make_unique<BlockTracker>(&layout_, &coord_block_, x0);
  }

  const BlockLayout& layout() const { return layout_; }

 private:
  BlockLayout layout_;
  std::vector<std::int32_t> coord_block_;
};

}  // namespace

BooleanFunctionPtr block_function(BlockLayout layout) {
  return std::make_shared<BlockFunction>(std::move(layout));
}

BooleanFunctionPtr block_function(std::size_t n) {
  return block_function(BlockLayout::defaults(n));
}

// ---- striped modification ----

namespace {

std::string base_family(const BooleanFunctionPtr& base) {
  const auto& d = base->descriptor();
  const auto brace = d.find('{');
  return brace == std::string::npos ? d : d.substr(0, brace);
}

class StripedTracker : public FlipTracker {
 public:
  StripedTracker(const StripedFunction* f, const Configuration& x0)
      : f_(f),
        level_(static_cast<std::int64_t>(x0.level())),
        base_(f->base()->make_tracker(x0)) {}

  int value() const override {
    const auto level = static_cast<std::size_t>(level_);
    return f_->on_stripes(level) ? f_->stripe_value(level) : base_->value();
  }

  void apply_flip(const Configuration& x_after, std::size_t coord) override {
    level_ += x_after[coord] > 0 ? 1 : -1;
    base_->apply_flip(x_after, coord);
  }

 private:
  const StripedFunction* f_;
  std::int64_t level_;
  std::unique_ptr<FlipTracker> base_;
};

}  // namespace

StripedFunction::StripedFunction(BooleanFunctionPtr base, double p, std::uint32_t alpha,
                                 std::uint32_t offset, double mass)
    : BooleanFunction(base->dimension(), base->level_symmetric(),
                      "striped{base=" + base_family(base) + ",n=" +
                          std::to_string(base->dimension()) + ",p=" + fmt_double(p) + "}"),
      base_(std::move(base)),
      alpha_(alpha),
      offset_(offset),
      mass_(mass) {}

int StripedFunction::eval(const Configuration& x) const {
  check_dimension(x);
  const std::size_t level = x.level();
  return on_stripes(level) ? stripe_value(level) : base_->eval(x);
}

int StripedFunction::eval_level(std::size_t level) const {
  if (on_stripes(level)) return stripe_value(level);
  return base_->eval_level(level);
}

std::unique_ptr<FlipTracker> StripedFunction::make_tracker(const Configuration& x0) const {
  check_dimension(x0);
  return std::make_unique<StripedTracker>(this, x0);
}

std::shared_ptr<const StripedFunction> striped_modification(BooleanFunctionPtr base, double p) {
  if (!base) throw std::invalid_argument("striped_modification: null base");
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("striped_modification: p must be in (0,1)");
  const auto n = base->dimension();
  const double npq = static_cast<double>(n) * p * (1.0 - p);
  if (!(npq >= 8.0))
    throw std::invalid_argument("striped_modification: requires n p (1-p) >= 8");

  const double target = 2.0 * npq;
  auto alpha = static_cast<std::uint32_t>(std::floor(std::pow(target, 0.25)));
  // Integer-exact fourth root: fix up any last-ulp error from pow().
  const auto fourth = [](std::uint64_t a) -> double {
    const double d = static_cast<double>(a);
    return d * d * d * d;
  };
  while (fourth(alpha + 1) <= target) ++alpha;
  while (alpha > 1 && fourth(alpha) > target) --alpha;

  const auto masses = binomial_residue_masses(n, p, alpha);
  std::uint32_t offset = 0;
  for (std::uint32_t a = 1; a < alpha; ++a)
    if (masses[a] < masses[offset]) offset = a;  // smallest offset wins ties
  return std::make_shared<StripedFunction>(std::move(base), p, alpha, offset, masses[offset]);
}

// ---- pinned modification ----

namespace {

class PinnedFunction : public BooleanFunction {
 public:
  PinnedFunction(BooleanFunctionPtr base, std::size_t k)
      : BooleanFunction(base->dimension(), false,
                        "pinned{base=" + base_family(base) + ",n=" +
                            std::to_string(base->dimension()) + ",k=" + std::to_string(k) + "}"),
        base_(std::move(base)),
        k_(k) {}

  int eval(const Configuration& x) const override {
    check_dimension(x);
    for (std::size_t i = 0; i < k_; ++i)
      if (x[i] > 0) return base_->eval(x);
    return +1;
  }

  std::unique_ptr<FlipTracker> make_tracker(const Configuration& x0) const override;

  const BooleanFunctionPtr& base() const { return base_; }
  std::size_t pinned_count() const { return k_; }

 private:
  BooleanFunctionPtr base_;
  std::size_t k_;
};

class PinnedTracker : public FlipTracker {
 public:
  PinnedTracker(const PinnedFunction* f, const Configuration& x0)
      : f_(f), base_(f->base()->make_tracker(x0)) {
    for (std::size_t i = 0; i < f_->pinned_count(); ++i) minus_ += x0[i] < 0;
  }
  int value() const override {
    return minus_ == f_->pinned_count() ? +1 : base_->value();
  }
  void apply_flip(const Configuration& x_after, std::size_t coord) override {
    if (coord < f_->pinned_count()) minus_ += x_after[coord] < 0 ? 1 : -1;
    base_->apply_flip(x_after, coord);
  }

 private:
  const PinnedFunction* f_;
  std::unique_ptr<FlipTracker> base_;
  std::size_t minus_ = 0;
};

std::unique_ptr<FlipTracker> PinnedFunction::make_tracker(const Configuration& x0) const {
  check_dimension(x0);
  return std::make_unique<PinnedTracker>(this, x0);
}

}  // namespace

BooleanFunctionPtr pinned_modification(BooleanFunctionPtr base, std::size_t k) {
  if (!base) throw std::invalid_argument("pinned_modification: null base");
  if (k == 0 || k > base->dimension())
    throw std::invalid_argument("pinned_modification: k must be in [1, n]");
  return std::make_shared<PinnedFunction>(std::move(base), k);
}

// ---- interval scheme ----

IntervalScheme IntervalScheme::build(int k) {
  if (k < 1 || k > 10)
    throw std::invalid_argument("IntervalScheme: depth must be in [1, 10]");
  IntervalScheme s;
  s.depth = k;
  if (k == 1) {
    s.intervals = {{Rational(0, 1), Rational(1, 1), false}};
    return s;
  }
  s.intervals = {{Rational(0, 1), Rational(1, 2), false},
                 {Rational(1, 2), Rational(1, 1), true}};
  for (int j = 3; j <= k; ++j) {
    // Centered child takes fraction 2^-j / (1 - 2^-(j-1)) = 1 / (2 (2^(j-1) - 1)).
    const Rational frac(1, 2 * ((std::int64_t{1} << (j - 1)) - 1));
    std::vector<SchemeInterval> next;
    next.reserve(s.intervals.size() * 3);
    for (const auto& iv : s.intervals) {
      const Rational len = iv.hi - iv.lo;
      const Rational clen = len * frac;
      const Rational side = (len - clen) * Rational(1, 2);
      const Rational a = iv.lo + side;
      const Rational b = a + clen;
      next.push_back({iv.lo, a, iv.high_density});
      next.push_back({a, b, !iv.high_density});
      next.push_back({b, iv.hi, iv.high_density});
    }
    s.intervals = std::move(next);
  }
  return s;
}

Rational IntervalScheme::density(std::size_t index) const {
  const std::int64_t denom = std::int64_t{1} << depth;
  return intervals.at(index).high_density ? Rational(denom - 1, denom) : Rational(1, denom);
}

// ---- circle scheme function ----

CircleSchemeFunction::CircleSchemeFunction(std::int64_t n, int k)
    : CircleFunction(n, "circle{n=" + std::to_string(n) + ",k=" + std::to_string(k) + "}"),
      scheme_(IntervalScheme::build(k)),
      k_(k) {
  if (n > (std::int64_t{1} << 30))
    throw std::invalid_argument("circle_function: cycle must be <= 2^30");
  const std::size_t count = scheme_.intervals.size();
  starts_.resize(count + 1);
  numer_.resize(count);
  const std::int64_t denom = std::int64_t{1} << k_;
  for (std::size_t i = 0; i < count; ++i) {
    const Rational& lo = scheme_.intervals[i].lo;
    // round-half-up(n * lo)
    const __int128 t =
        (static_cast<__int128>(2) * n * lo.num + lo.den) / (static_cast<__int128>(2) * lo.den);
    starts_[i] = static_cast<std::int64_t>(t);
    numer_[i] = scheme_.intervals[i].high_density ? denom - 1 : 1;
  }
  starts_[count] = n;

  for (std::size_t i = 0; i < count; ++i) {
    const std::int64_t m = starts_[i + 1] - starts_[i];
    if (m <= 0)
      throw std::runtime_error("circle_function: interval " + std::to_string(i) +
                               " receives no positions at n=" + std::to_string(n) +
                               "; increase n");
    const std::int64_t c = ones_in(i);
    // |c/m - a/2^k| < 2^-(k+1)  <=>  |2^(k+1) c - 2 a m| < m
    __int128 gap = static_cast<__int128>(c) * (2 * denom) -
                   static_cast<__int128>(2) * numer_[i] * m;
    if (gap < 0) gap = -gap;
    if (!(gap < m)) {
      const double realized = static_cast<double>(c) / static_cast<double>(m);
      throw std::runtime_error(
          "circle_function: interval " + std::to_string(i) + " realizes density " +
          fmt_double(realized) + " outside the target band around " +
          fmt_double(static_cast<double>(numer_[i]) / static_cast<double>(denom)) +
          " at n=" + std::to_string(n) + "; increase n");
    }
  }
}

std::int64_t CircleSchemeFunction::ones_in(std::size_t index) const {
  const std::int64_t m = starts_[index + 1] - starts_[index];
  const std::int64_t half = std::int64_t{1} << (k_ - 1);
  return static_cast<std::int64_t>(
      (static_cast<__int128>(m) * numer_[index] + half) >> k_);
}

std::int64_t CircleSchemeFunction::interval_of(std::int64_t pos) const {
  const auto it = std::upper_bound(starts_.begin(), starts_.end(), pos);
  return static_cast<std::int64_t>(it - starts_.begin()) - 1;
}

int CircleSchemeFunction::eval(std::int64_t pos) const {
  check_pos(pos);
  const std::int64_t idx = interval_of(pos);
  const std::int64_t r = pos - starts_[idx];
  const std::int64_t a = numer_[idx];
  const std::int64_t half = std::int64_t{1} << (k_ - 1);
  // Centered Bresenham spread: marked iff the running rounded count advances.
  const std::int64_t before = (r * a + half) >> k_;
  const std::int64_t after = ((r + 1) * a + half) >> k_;
  return sign_of(after > before);
}

std::vector<CircleSchemeFunction::IntervalReport> CircleSchemeFunction::interval_reports() const {
  std::vector<IntervalReport> reports;
  const std::int64_t denom = std::int64_t{1} << k_;
  for (std::size_t i = 0; i < scheme_.intervals.size(); ++i) {
    IntervalReport r;
    r.index = i;
    r.begin = starts_[i];
    r.size = starts_[i + 1] - starts_[i];
    r.ones = ones_in(i);
    r.target = scheme_.density(i);
    const double realized = static_cast<double>(r.ones) / static_cast<double>(r.size);
    r.density_gap = std::fabs(realized - r.target.to_double());
    __int128 gap = static_cast<__int128>(r.ones) * (2 * denom) -
                   static_cast<__int128>(2) * numer_[i] * r.size;
    if (gap < 0) gap = -gap;
    r.within_band = gap < r.size;
    reports.push_back(r);
  }
  return reports;
}

std::int64_t CircleSchemeFunction::ones_total() const {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < scheme_.intervals.size(); ++i) total += ones_in(i);
  return total;
}

std::shared_ptr<const CircleSchemeFunction> circle_function(std::int64_t n, int k) {
  return std::make_shared<CircleSchemeFunction>(n, k);
}

namespace {

class CircleConstant : public CircleFunction {
 public:
  CircleConstant(std::int64_t n, int value)
      : CircleFunction(n, "circle_constant{n=" + std::to_string(n) +
                              ",v=" + std::to_string(value) + "}"),
        value_(value) {
    if (value != -1 && value != +1)
      throw std::invalid_argument("circle_constant: value must be -1 or +1");
  }
  int eval(std::int64_t pos) const override {
    check_pos(pos);
    return value_;
  }

 private:
  int value_;
};

class CirclePositionParity : public CircleFunction {
 public:
  explicit CirclePositionParity(std::int64_t n)
      : CircleFunction(n, "circle_position_parity{n=" + std::to_string(n) + "}") {}
  int eval(std::int64_t pos) const override {
    check_pos(pos);
    return sign_of(pos % 2 == 1);
  }
};

}  // namespace

CircleFunctionPtr circle_constant(std::int64_t n, int value) {
  return std::make_shared<CircleConstant>(n, value);
}

CircleFunctionPtr circle_position_parity(std::int64_t n) {
  return std::make_shared<CirclePositionParity>(n);
}

// ---- hypercube lift ----

namespace {

class LiftFunction : public BooleanFunction {
 public:
  explicit LiftFunction(CircleFunctionPtr fc)
      : BooleanFunction(checked_dim(fc), true, make_descriptor(fc)), fc_(std::move(fc)) {}

  int eval(const Configuration& x) const override {
    check_dimension(x);
    return eval_level(x.level());
  }

  int eval_level(std::size_t level) const override {
    return fc_->eval(static_cast<std::int64_t>(
        level % static_cast<std::size_t>(fc_->cycle())));
  }

 private:
  static std::size_t checked_dim(const CircleFunctionPtr& fc) {
    if (!fc) throw std::invalid_argument("hypercube_lift: null circle function");
    const std::int64_t cycle = fc->cycle();
    if (cycle < 2 || cycle % 2 != 0)
      throw std::invalid_argument("hypercube_lift: cycle must be even and >= 2");
    return static_cast<std::size_t>(cycle) * static_cast<std::size_t>(cycle);
  }

  static std::string make_descriptor(const CircleFunctionPtr& fc) {
    const auto pd = parse_descriptor(fc->descriptor());
    if (pd.family == "circle")
      return "lift{n=" + pd.get("n") + ",k=" + pd.get("k") + "}";
    return "lift{base=" + fc->descriptor() + "}";
  }

  CircleFunctionPtr fc_;
};

}  // namespace

BooleanFunctionPtr hypercube_lift(CircleFunctionPtr fc) {
  // Checked here: the constructor's initializers evaluate in unspecified
  // order, so checked_dim alone cannot protect make_descriptor.
  if (!fc) throw std::invalid_argument("hypercube_lift: null circle function");
  return std::make_shared<LiftFunction>(std::move(fc));
}

// ---- descriptors ----

bool ParsedDescriptor::has(const std::string& key) const {
  for (const auto& [k, v] : args)
    if (k == key) return true;
  return false;
}

std::string ParsedDescriptor::get(const std::string& key) const {
  for (const auto& [k, v] : args)
    if (k == key) return v;
  throw DescriptorError("descriptor " + family + ": missing argument '" + key + "'");
}

namespace {

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::size_t parse_size_arg(const ParsedDescriptor& pd, const std::string& key) {
  const std::string v = pd.get(key);
  std::size_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || out == 0)
    throw DescriptorError("descriptor " + pd.family + ": argument '" + key +
                          "' must be a positive integer, got '" + v + "'");
  return out;
}

double parse_double_arg(const ParsedDescriptor& pd, const std::string& key) {
  const std::string v = pd.get(key);
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw DescriptorError("descriptor " + pd.family + ": argument '" + key +
                          "' must be a number, got '" + v + "'");
  return out;
}

int parse_sign_arg(const ParsedDescriptor& pd, const std::string& key) {
  const std::string v = pd.get(key);
  if (v == "1" || v == "+1") return +1;
  if (v == "-1") return -1;
  throw DescriptorError("descriptor " + pd.family + ": argument '" + key +
                        "' must be +1 or -1, got '" + v + "'");
}

void require_keys(const ParsedDescriptor& pd, const std::vector<std::string>& keys) {
  for (const auto& key : keys)
    if (!pd.has(key))
      throw DescriptorError("descriptor " + pd.family + ": missing argument '" + key + "'");
  for (const auto& [k, v] : pd.args)
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      throw DescriptorError("descriptor " + pd.family + ": unknown argument '" + k + "'");
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t prev = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t cur = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, prev + (a[i - 1] != b[j - 1])});
      prev = cur;
    }
  }
  return row[b.size()];
}

const std::vector<std::string> kBooleanFamilies = {
    "dictator", "parity", "majority", "constant", "block", "striped", "pinned", "lift"};
const std::vector<std::string> kCircleFamilies = {"circle"};

[[noreturn]] void unknown_family(const std::string& family,
                                 const std::vector<std::string>& known) {
  std::string msg = "unknown function '" + family + "'; known:";
  for (const auto& k : known) msg += " " + k;
  std::string best;
  std::size_t best_dist = 3;
  for (const auto& k : known) {
    const auto d = edit_distance(family, k);
    if (d < best_dist) {
      best_dist = d;
      best = k;
    }
  }
  if (!best.empty()) msg += "; did you mean '" + best + "'?";
  throw DescriptorError(msg);
}

BooleanFunctionPtr base_from_family(const std::string& family, std::size_t n) {
  if (family == "dictator") return dictator(n);
  if (family == "parity") return parity(n);
  if (family == "majority") return majority(n);
  if (family == "block") return block_function(n);
  throw DescriptorError("descriptor base '" + family +
                        "' must be one of dictator, parity, majority, block");
}

}  // namespace

ParsedDescriptor parse_descriptor(const std::string& text) {
  const std::string s = strip(text);
  ParsedDescriptor pd;
  std::size_t i = 0;
  while (i < s.size() && ident_char(s[i])) ++i;
  if (i == 0) throw DescriptorError("descriptor must start with a function name: '" + s + "'");
  pd.family = s.substr(0, i);
  if (i >= s.size() || s[i] != '{')
    throw DescriptorError("descriptor " + pd.family + ": expected '{'");
  ++i;
  if (i < s.size() && s[i] == '}') {
    ++i;
  } else {
    for (;;) {
      const std::size_t eq = s.find('=', i);
      if (eq == std::string::npos)
        throw DescriptorError("descriptor " + pd.family + ": expected key=value");
      const std::string key = strip(s.substr(i, eq - i));
      if (key.empty())
        throw DescriptorError("descriptor " + pd.family + ": empty argument name");
      std::size_t end = eq + 1;
      while (end < s.size() && s[end] != ',' && s[end] != '}') ++end;
      if (end >= s.size())
        throw DescriptorError("descriptor " + pd.family + ": expected '}'");
      const std::string value = strip(s.substr(eq + 1, end - eq - 1));
      if (value.empty())
        throw DescriptorError("descriptor " + pd.family + ": empty value for '" + key + "'");
      if (pd.has(key))
        throw DescriptorError("descriptor " + pd.family + ": duplicate argument '" + key + "'");
      pd.args.emplace_back(key, value);
      i = end + 1;
      if (s[end] == '}') break;
    }
  }
  if (i != s.size())
    throw DescriptorError("descriptor " + pd.family + ": trailing characters after '}'");
  return pd;
}

BooleanFunctionPtr boolean_function_from_descriptor(const std::string& text,
                                                    std::size_t override_n) {
  ParsedDescriptor pd = parse_descriptor(text);
  const auto n_arg = [&](const std::string& key) {
    return override_n ? override_n : parse_size_arg(pd, key);
  };
  if (pd.family == "dictator") {
    require_keys(pd, {"n"});
    return dictator(n_arg("n"));
  }
  if (pd.family == "parity") {
    require_keys(pd, {"n"});
    return parity(n_arg("n"));
  }
  if (pd.family == "majority") {
    require_keys(pd, {"n"});
    return majority(n_arg("n"));
  }
  if (pd.family == "constant") {
    require_keys(pd, {"n", "v"});
    return constant_function(n_arg("n"), parse_sign_arg(pd, "v"));
  }
  if (pd.family == "block") {
    require_keys(pd, {"n"});
    return block_function(n_arg("n"));
  }
  if (pd.family == "striped") {
    require_keys(pd, {"base", "n", "p"});
    return striped_modification(base_from_family(pd.get("base"), n_arg("n")),
                                parse_double_arg(pd, "p"));
  }
  if (pd.family == "pinned") {
    require_keys(pd, {"base", "n", "k"});
    return pinned_modification(base_from_family(pd.get("base"), n_arg("n")),
                               parse_size_arg(pd, "k"));
  }
  if (pd.family == "lift") {
    require_keys(pd, {"n", "k"});
    const std::size_t cycle = n_arg("n");
    return hypercube_lift(circle_function(static_cast<std::int64_t>(cycle),
                                          static_cast<int>(parse_size_arg(pd, "k"))));
  }
  if (pd.family == "circle")
    throw DescriptorError("circle{...} lives on the circle chain; use chain = circle");
  unknown_family(pd.family, kBooleanFamilies);
}

CircleFunctionPtr circle_function_from_descriptor(const std::string& text,
                                                  std::int64_t override_n) {
  ParsedDescriptor pd = parse_descriptor(text);
  if (pd.family == "circle") {
    require_keys(pd, {"n", "k"});
    const std::int64_t n =
        override_n ? override_n : static_cast<std::int64_t>(parse_size_arg(pd, "n"));
    return circle_function(n, static_cast<int>(parse_size_arg(pd, "k")));
  }
  unknown_family(pd.family, kCircleFamilies);
}

std::vector<std::string> boolean_catalog_examples() {
  return {
      "dictator{n=100}",
      "parity{n=10}",
      "majority{n=101}",
      "constant{n=16,v=1}",
      "block{n=1000}",
      "striped{base=parity,n=10000,p=0.5}",
      "pinned{base=parity,n=10,k=2}",
      "lift{n=64,k=3}",
  };
}

std::vector<std::string> circle_catalog_examples() { return {"circle{n=4096,k=3}"}; }

std::string function_catalog_text() {
  std::ostringstream out;
  out << "Function descriptors: family{key=value,...}\n"
      << "\n"
      << "hypercube chain:\n"
      << "  dictator{n=N}                 first-coordinate projection\n"
      << "  parity{n=N}                   product of all coordinates\n"
      << "  majority{n=N}                 sign of the coordinate sum (N odd)\n"
      << "  constant{n=N,v=+1|-1}         constant function\n"
      << "  block{n=N}                    value of the highest all-equal block\n"
      << "                                (block lengths: l repeated ceil(2^l/l^2) times)\n"
      << "  striped{base=F,n=N,p=P}       base overridden on the min-mass level\n"
      << "                                progression, alternating -1/+1\n"
      << "  pinned{base=F,n=N,k=K}        +1 forced when the first K coordinates are -1\n"
      << "  lift{n=C,k=K}                 circle{n=C,k=K} read off level(x) mod C,\n"
      << "                                on dimension C^2 (C even)\n"
      << "  (base F: one of dictator, parity, majority, block)\n"
      << "\n"
      << "circle chain:\n"
      << "  circle{n=N,k=K}               nested-interval marking of Z_N, depth K\n"
      << "\n"
      << "examples:\n";
  for (const auto& e : boolean_catalog_examples()) out << "  " << e << "\n";
  for (const auto& e : circle_catalog_examples()) out << "  " << e << "\n";
  return out.str();
}

}  // namespace bfdyn
