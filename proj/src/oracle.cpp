#include "bfdyn/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bfdyn {

namespace {

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

std::vector<std::int8_t> truth_table(const BooleanFunction& f, std::size_t max_n) {
  const std::size_t n = f.dimension();
  if (n > max_n)
    throw std::invalid_argument("oracle: dimension too large for enumeration");
  std::vector<std::int8_t> tab(std::size_t{1} << n);
  for (std::uint64_t mask = 0; mask < tab.size(); ++mask)
    tab[mask] = static_cast<std::int8_t>(f.eval(Configuration::from_mask(n, mask)));
  return tab;
}

std::vector<double> pow_table(double base, std::size_t count) {
  std::vector<double> t(count + 1);
  t[0] = 1.0;
  for (std::size_t k = 1; k <= count; ++k) t[k] = t[k - 1] * base;
  return t;
}

// pmf[j] = P[Poisson(mu) = j] for j = 0..jmax.
std::vector<double> poisson_pmf_table(double mu, std::size_t jmax) {
  std::vector<double> pmf(jmax + 1);
  pmf[0] = std::exp(-mu);
  for (std::size_t j = 1; j <= jmax; ++j)
    pmf[j] = pmf[j - 1] * mu / static_cast<double>(j);
  return pmf;
}

std::size_t uniformization_terms(double mu) {
  return static_cast<std::size_t>(mu + 10.0 * std::sqrt(mu + 1.0)) + 60;
}

}  // namespace

// ---- Fourier-Walsh ----

Spectrum walsh_spectrum(const BooleanFunction& f) {
  const std::size_t n = f.dimension();
  if (n > 20) throw std::invalid_argument("walsh_spectrum: n must be <= 20");
  const std::size_t size = std::size_t{1} << n;
  Spectrum s;
  s.n = n;
  s.coef.resize(size);
  for (std::uint64_t mask = 0; mask < size; ++mask)
    s.coef[mask] = f.eval(Configuration::from_mask(n, mask));
  // In-place Walsh-Hadamard transform.
  for (std::size_t len = 1; len < size; len <<= 1)
    for (std::size_t i = 0; i < size; i += len << 1)
      for (std::size_t j = i; j < i + len; ++j) {
        const double a = s.coef[j];
        const double b = s.coef[j + len];
        s.coef[j] = a + b;
        s.coef[j + len] = a - b;
      }
  // Characters are products of +-1 coordinates, mask bit set meaning +1, so
  // each transform entry picks up (-1)^|S| relative to the bit convention.
  const double scale = 1.0 / static_cast<double>(size);
  for (std::size_t mask = 0; mask < size; ++mask) {
    const double sign = (std::popcount(mask) & 1u) ? -1.0 : 1.0;
    s.coef[mask] *= sign * scale;
  }
  return s;
}

double parseval_gap(const Spectrum& s) {
  KahanSum sum;
  for (const double c : s.coef) sum.add(c * c);
  return std::fabs(sum.sum - 1.0);
}

double exact_covariance(const Spectrum& s, double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("exact_covariance: eps must be >= 0");
  KahanSum sum;
  for (std::size_t mask = 1; mask < s.coef.size(); ++mask)
    sum.add(s.coef[mask] * s.coef[mask] *
            std::exp(-eps * static_cast<double>(std::popcount(mask))));
  return sum.sum;
}

double exact_covariance_bruteforce(const BooleanFunction& f, double eps) {
  const std::size_t n = f.dimension();
  if (n > 10)
    throw std::invalid_argument("exact_covariance_bruteforce: n must be <= 10");
  if (!(eps >= 0.0))
    throw std::invalid_argument("exact_covariance_bruteforce: eps must be >= 0");
  const auto tab = truth_table(f, 10);
  const std::size_t size = tab.size();

  double mean = 0.0;
  for (const auto v : tab) mean += v;
  mean /= static_cast<double>(size);

  // E[f(X_0) f(X_eps)] by summing over the start point, the set M of
  // resampled coordinates and all 2^|M| resampled values; p = 1/2.
  const double r = -std::expm1(-eps);
  const auto r_pow = pow_table(r, n);
  const auto s_pow = pow_table(1.0 - r, n);
  KahanSum product;
  for (std::uint64_t m = 0; m < size; ++m) {
    std::int64_t inner = 0;
    for (std::uint64_t x = 0; x < size; ++x) {
      const std::uint64_t base = x & ~m;
      std::int64_t sub_sum = 0;
      std::uint64_t v = m;
      for (;;) {
        sub_sum += tab[base | v];
        if (v == 0) break;
        v = (v - 1) & m;
      }
      inner += tab[x] * sub_sum;
    }
    const auto k = static_cast<std::size_t>(std::popcount(m));
    const double weight =
        r_pow[k] * s_pow[n - k] /
        (static_cast<double>(size) * static_cast<double>(std::uint64_t{1} << k));
    product.add(static_cast<double>(inner) * weight);
  }
  return product.sum - mean * mean;
}

// ---- exact two-time and hitting quantities ----

double exact_instability(const BooleanFunction& f, const DynamicsParams& params,
                         double eps) {
  const std::size_t n = params.n;
  if (f.dimension() != n)
    throw std::invalid_argument("exact_instability: dimension mismatch");
  if (n > 12) throw std::invalid_argument("exact_instability: n must be <= 12");
  if (!(eps >= 0.0)) throw std::invalid_argument("exact_instability: eps must be >= 0");
  const auto tab = truth_table(f, 12);
  const std::size_t size = tab.size();

  const double p = params.p;
  const double r = -std::expm1(-eps);
  const double q11 = 1.0 - r * (1.0 - p);  // +1 stays +1
  const double q1m = r * (1.0 - p);
  const double qm1 = r * p;
  const double qmm = 1.0 - r * p;
  const auto t11 = pow_table(q11, n);
  const auto t1m = pow_table(q1m, n);
  const auto tm1 = pow_table(qm1, n);
  const auto tmm = pow_table(qmm, n);
  const auto pp = pow_table(p, n);
  const auto pm = pow_table(1.0 - p, n);

  KahanSum total;
  for (std::uint64_t x = 0; x < size; ++x) {
    const auto px = static_cast<std::size_t>(std::popcount(x));
    const double pi_x = pp[px] * pm[n - px];
    for (std::uint64_t y = 0; y < size; ++y) {
      if (tab[x] == tab[y]) continue;
      const auto a = static_cast<std::size_t>(std::popcount(x & y));
      const auto py = static_cast<std::size_t>(std::popcount(y));
      const std::size_t b = px - a;
      const std::size_t c = py - a;
      const std::size_t d = n - px - c;
      total.add(pi_x * t11[a] * t1m[b] * tm1[c] * tmm[d]);
    }
  }
  return total.sum;
}

double exact_mean(const BooleanFunction& f, const DynamicsParams& params) {
  const std::size_t n = params.n;
  if (f.dimension() != n) throw std::invalid_argument("exact_mean: dimension mismatch");
  if (n > 20) throw std::invalid_argument("exact_mean: n must be <= 20");
  const auto pp = pow_table(params.p, n);
  const auto pm = pow_table(1.0 - params.p, n);
  KahanSum total;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    const auto k = static_cast<std::size_t>(std::popcount(mask));
    total.add(pp[k] * pm[n - k] * f.eval(Configuration::from_mask(n, mask)));
  }
  return total.sum;
}

namespace {

// Stationary binomial pmf with the degenerate p handled exactly.
double level_pmf(std::size_t n, double p, std::size_t level, double lg_n1) {
  if (p == 0.0) return level == 0 ? 1.0 : 0.0;
  if (p == 1.0) return level == n ? 1.0 : 0.0;
  const auto l = static_cast<double>(level);
  const auto nn = static_cast<double>(n);
  return std::exp(lg_n1 - std::lgamma(l + 1.0) - std::lgamma(nn - l + 1.0) +
                  l * std::log(p) + (nn - l) * std::log1p(-p));
}

}  // namespace

double exact_closeness(const BooleanFunction& f, const BooleanFunction& g,
                       const DynamicsParams& params) {
  const std::size_t n = params.n;
  if (f.dimension() != n || g.dimension() != n)
    throw std::invalid_argument("exact_closeness: dimension mismatch");
  if (f.level_symmetric() && g.level_symmetric()) {
    if (n > 10'000'000)
      throw std::invalid_argument("exact_closeness: n must be <= 1e7");
    const double lg_n1 = std::lgamma(static_cast<double>(n) + 1.0);
    KahanSum total;
    for (std::size_t level = 0; level <= n; ++level)
      if (f.eval_level(level) != g.eval_level(level))
        total.add(level_pmf(n, params.p, level, lg_n1));
    return total.sum;
  }
  if (n > 20) throw std::invalid_argument("exact_closeness: n must be <= 20");
  const auto pp = pow_table(params.p, n);
  const auto pm = pow_table(1.0 - params.p, n);
  KahanSum total;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    const auto x = Configuration::from_mask(n, mask);
    if (f.eval(x) != g.eval(x)) {
      const auto k = static_cast<std::size_t>(std::popcount(mask));
      total.add(pp[k] * pm[n - k]);
    }
  }
  return total.sum;
}

ExactTail exact_hitting_tail(const BooleanFunction& f, const DynamicsParams& params,
                             double delta) {
  const std::size_t n = params.n;
  if (f.dimension() != n)
    throw std::invalid_argument("exact_hitting_tail: dimension mismatch");
  if (n > 12) throw std::invalid_argument("exact_hitting_tail: n must be <= 12");
  if (!(delta >= 0.0 && delta <= 60.0))
    throw std::invalid_argument("exact_hitting_tail: delta must be in [0, 60]");
  const auto tab = truth_table(f, 12);
  const std::size_t size = tab.size();
  const double p = params.p;
  const auto pp = pow_table(p, n);
  const auto pm = pow_table(1.0 - p, n);

  const double mu = static_cast<double>(n) * delta;
  const std::size_t jmax = uniformization_terms(mu);
  const auto pmf = poisson_pmf_table(mu, jmax);

  // Uniformized jump kernel: pick a coordinate (1/n each), resample it. The
  // survival probability from x is sum_j pmf[j] (Q^j 1)(x) with Q killed on
  // the opposite sign class.
  double survive = 0.0;
  std::vector<double> v(size), w(size);
  for (const int sign : {+1, -1}) {
    for (std::size_t x = 0; x < size; ++x) v[x] = tab[x] == sign ? 1.0 : 0.0;
    for (std::size_t j = 0; j <= jmax; ++j) {
      if (j > 0) {
        for (std::size_t x = 0; x < size; ++x) {
          if (tab[x] != sign) {
            w[x] = 0.0;
            continue;
          }
          double acc = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t bit = std::uint64_t{1} << i;
            const bool up = (x & bit) != 0;
            const double keep = up ? p : 1.0 - p;
            acc += keep * v[x] + (1.0 - keep) * v[x ^ bit];
          }
          w[x] = acc / static_cast<double>(n);
        }
        std::swap(v, w);
      }
      KahanSum mass;
      for (std::size_t x = 0; x < size; ++x) {
        if (tab[x] != sign || v[x] == 0.0) continue;
        const auto k = static_cast<std::size_t>(std::popcount(x));
        mass.add(pp[k] * pm[n - k] * v[x]);
      }
      survive += pmf[j] * mass.sum;
    }
  }
  return {n, delta, survive};
}

// ---- all-ones hitting bound ----

AllOnesHittingCheck check_all_ones_hitting_bound(std::size_t n, double delta) {
  if (n == 0 || n > 12)
    throw std::invalid_argument("check_all_ones_hitting_bound: n must be in [1, 12]");
  if (!(delta >= 0.0 && delta <= 60.0))
    throw std::invalid_argument("check_all_ones_hitting_bound: delta must be in [0, 60]");
  const std::size_t size = std::size_t{1} << n;
  const std::uint64_t full = size - 1;
  const double uniform = 1.0 / static_cast<double>(size);

  const double mu = static_cast<double>(n) * delta;
  const std::size_t jmax = uniformization_terms(mu);
  const auto pmf = poisson_pmf_table(mu, jmax);

  AllOnesHittingCheck check;
  check.n = n;
  check.delta = delta;

  // P[tau > delta]: killed walk on the complement of the all-ones state.
  // At p = 1/2 the uniformized kernel keeps the coordinate with probability
  // 1/2 overall and flips a uniformly chosen one otherwise.
  std::vector<double> v(size, 1.0), w(size);
  v[full] = 0.0;
  double survive = 0.0;
  for (std::size_t j = 0; j <= jmax; ++j) {
    if (j > 0) {
      for (std::size_t x = 0; x < size; ++x) {
        if (x == full) {
          w[x] = 0.0;
          continue;
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += v[x ^ (std::uint64_t{1} << i)];
        w[x] = 0.5 * v[x] + acc / (2.0 * static_cast<double>(n));
      }
      std::swap(v, w);
    }
    KahanSum mass;
    for (std::size_t x = 0; x < size; ++x)
      if (v[x] != 0.0) mass.add(uniform * v[x]);
    survive += pmf[j] * mass.sum;
  }
  check.lhs = 1.0 - survive;
  check.rhs = 0.5 * (-std::expm1(-delta)) * static_cast<double>(n) * uniform;
  check.holds = check.lhs >= check.rhs;

  // Occupation identity: E[time spent at the start point up to delta] equals
  // the integral of ((1+e^-t)/2)^n. Left side by uniformization of the
  // diagonal, right side in closed form.
  std::vector<double> tail(jmax + 2, 0.0);
  for (std::size_t j = jmax + 1; j-- > 0;)
    tail[j] = (j <= jmax ? pmf[j] : 0.0) + tail[j + 1];
  std::fill(v.begin(), v.end(), 0.0);
  v[0] = 1.0;
  KahanSum lhs_sum;
  for (std::size_t j = 0; j <= jmax; ++j) {
    if (j > 0) {
      for (std::size_t x = 0; x < size; ++x) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += v[x ^ (std::uint64_t{1} << i)];
        w[x] = 0.5 * v[x] + acc / (2.0 * static_cast<double>(n));
      }
      std::swap(v, w);
    }
    if (j + 1 <= jmax + 1)
      lhs_sum.add(tail[j + 1] * v[0] / static_cast<double>(n));
  }
  check.identity_lhs = lhs_sum.sum;

  KahanSum rhs_sum;
  rhs_sum.add(delta);
  double binom = 1.0;  // C(n, k)
  for (std::size_t k = 1; k <= n; ++k) {
    binom *= static_cast<double>(n - k + 1) / static_cast<double>(k);
    rhs_sum.add(binom * (-std::expm1(-static_cast<double>(k) * delta)) /
                static_cast<double>(k));
  }
  check.identity_rhs = rhs_sum.sum * uniform;
  check.identity_gap = std::fabs(check.identity_lhs - check.identity_rhs);
  return check;
}

// ---- binomial level masses ----

double binomial_level_mass(std::size_t n, double p,
                           const std::vector<std::size_t>& levels) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("binomial_level_mass: p must be in [0,1]");
  std::vector<std::size_t> distinct = levels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const double lg_n1 = std::lgamma(static_cast<double>(n) + 1.0);
  KahanSum total;
  for (const auto level : distinct) {
    if (level > n) throw std::invalid_argument("binomial_level_mass: level > n");
    total.add(level_pmf(n, p, level, lg_n1));
  }
  return total.sum;
}

std::vector<double> binomial_residue_masses(std::size_t n, double p,
                                            std::uint32_t alpha) {
  if (alpha == 0) throw std::invalid_argument("binomial_residue_masses: alpha must be > 0");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("binomial_residue_masses: p must be in [0,1]");
  std::vector<long double> buckets(alpha, 0.0L);
  if (p == 0.0) {
    buckets[0] = 1.0L;
  } else if (p == 1.0) {
    buckets[n % alpha] = 1.0L;
  } else {
    // Unnormalized weights by ratio recurrence from the mode; dividing by
    // their total normalizes exactly, with no lgamma cancellation at large n.
    // Levels with relative weight below kCut contribute < n * kCut in total.
    constexpr long double kCut = 1e-25L;
    const long double lp = p;
    const long double lq = 1.0L - lp;
    const auto mode = std::min(
        n, static_cast<std::size_t>((static_cast<long double>(n) + 1.0L) * lp));
    long double total = 0.0L;
    long double w = 1.0L;
    for (std::size_t k = mode;; --k) {  // mode, mode-1, ..., down into the left tail
      total += w;
      buckets[k % alpha] += w;
      if (k == 0 || w < kCut) break;
      w *= static_cast<long double>(k) * lq /
           (static_cast<long double>(n - k + 1) * lp);
    }
    w = 1.0L;
    for (std::size_t k = mode; k < n;) {  // mode+1, ..., up into the right tail
      w *= static_cast<long double>(n - k) * lp /
           (static_cast<long double>(k + 1) * lq);
      ++k;
      total += w;
      buckets[k % alpha] += w;
      if (w < kCut) break;
    }
    for (auto& b : buckets) b /= total;
  }
  std::vector<double> out(alpha);
  for (std::uint32_t a = 0; a < alpha; ++a) out[a] = static_cast<double>(buckets[a]);
  return out;
}

// ---- lift density sandwich ----

double comparison_lower_constant() { return std::erfc(std::sqrt(2.0)); }

double comparison_upper_constant() {
  return 1.0 + 4.0 / std::sqrt(2.0 * std::numbers::pi);
}

ComparisonCheck check_lift_density_sandwich(const CircleFunction& fc) {
  const std::int64_t cycle = fc.cycle();
  if (cycle < 2 || cycle % 2 != 0)
    throw std::invalid_argument("check_lift_density_sandwich: cycle must be even");
  const auto dim = static_cast<std::size_t>(cycle) * static_cast<std::size_t>(cycle);
  if (dim > (std::size_t{1} << 26))
    throw std::invalid_argument("check_lift_density_sandwich: cycle^2 must be <= 2^26");

  ComparisonCheck check;
  check.cycle = cycle;
  std::int64_t ones = 0;
  std::vector<bool> plus(static_cast<std::size_t>(cycle));
  for (std::int64_t r = 0; r < cycle; ++r) {
    plus[static_cast<std::size_t>(r)] = fc.eval(r) == +1;
    ones += plus[static_cast<std::size_t>(r)];
  }
  check.rho = static_cast<double>(ones) / static_cast<double>(cycle);

  const auto masses =
      binomial_residue_masses(dim, 0.5, static_cast<std::uint32_t>(cycle));
  KahanSum lifted;
  for (std::int64_t r = 0; r < cycle; ++r)
    if (plus[static_cast<std::size_t>(r)]) lifted.add(masses[static_cast<std::size_t>(r)]);
  check.lifted_prob = lifted.sum;
  check.lower = comparison_lower_constant() * check.rho;
  check.upper = comparison_upper_constant() * check.rho;
  check.holds = check.lower <= check.lifted_prob && check.lifted_prob <= check.upper;
  return check;
}

// ---- Ornstein-Uhlenbeck moment check ----

OuCheck ou_moment_check(const DynamicsParams& params, std::size_t level0, double s) {
  if (!(params.p > 0.0 && params.p < 1.0))
    throw std::invalid_argument("ou_moment_check: requires 0 < p < 1");
  if (level0 > params.n)
    throw std::invalid_argument("ou_moment_check: level0 exceeds dimension");
  if (!(s >= 0.0)) throw std::invalid_argument("ou_moment_check: s must be >= 0");

  const long double p = params.p;
  const long double nn = static_cast<long double>(params.n);
  const long double l0 = static_cast<long double>(level0);
  const long double es = std::exp(-static_cast<long double>(s));
  const long double q1 = es + (1.0L - es) * p;  // +1 coordinate still +1 at time s
  const long double q0 = (1.0L - es) * p;       // -1 coordinate now +1
  const long double np = nn * p;
  const long double var_stat = 2.0L * np * (1.0L - p);
  const long double scale = std::sqrt(var_stat);

  const long double mean_l = l0 * q1 + (nn - l0) * q0;
  const long double var_l = l0 * q1 * (1.0L - q1) + (nn - l0) * q0 * (1.0L - q0);
  const long double z0 = (l0 - np) / scale;
  const long double mean_z = (mean_l - np) / scale;
  const long double var_z = var_l / var_stat;
  const long double mean_ref = z0 * es;
  const long double var_ref = (1.0L - es * es) / 2.0L;

  OuCheck check;
  check.mean_z = static_cast<double>(mean_z);
  check.var_z = static_cast<double>(var_z);
  check.mean_ref = static_cast<double>(mean_ref);
  check.var_ref = static_cast<double>(var_ref);
  check.mean_err = static_cast<double>(std::fabs(mean_z - mean_ref));
  check.var_err = static_cast<double>(std::fabs(var_z - var_ref));
  return check;
}

}  // namespace bfdyn
