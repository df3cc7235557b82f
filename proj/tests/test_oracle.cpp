#include <cmath>
#include <cstdint>
#include <vector>

#include "bfdyn/functions.hpp"
#include "bfdyn/oracle.hpp"
#include "bfdyn/rng.hpp"
#include "doctest.h"

using namespace bfdyn;

namespace {

BooleanFunctionPtr random_table(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<std::int8_t> truth(std::size_t{1} << n);
  for (auto& v : truth) v = rng.bernoulli(0.5) ? +1 : -1;
  return table_function(n, std::move(truth));
}

// Stationary disagreement of two level-symmetric functions by direct
// binomial summation; independent of the library's closeness oracle.
double closeness_by_levels(const BooleanFunction& f, const BooleanFunction& g,
                           std::size_t n, double p) {
  double total = 0.0;
  for (std::size_t l = 0; l <= n; ++l) {
    if (f.eval_level(l) == g.eval_level(l)) continue;
    total += std::exp(std::lgamma(n + 1.0) - std::lgamma(l + 1.0) -
                      std::lgamma(n - l + 1.0) + l * std::log(p) +
                      (n - l) * std::log1p(-p));
  }
  return total;
}

}  // namespace

TEST_CASE("walsh spectrum of the basic families") {
  const auto d = walsh_spectrum(*dictator(3));
  REQUIRE(d.coef.size() == 8);
  for (std::size_t s = 0; s < 8; ++s)
    CHECK(d.coef[s] == doctest::Approx(s == 1 ? 1.0 : 0.0).epsilon(1e-14));

  const auto par = walsh_spectrum(*parity(3));
  for (std::size_t s = 0; s < 8; ++s)
    CHECK(par.coef[s] == doctest::Approx(s == 7 ? 1.0 : 0.0).epsilon(1e-14));

  // majority(3) = (x0 + x1 + x2 - x0 x1 x2) / 2
  const auto maj = walsh_spectrum(*majority(3));
  CHECK(maj.coef[0b001] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(maj.coef[0b010] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(maj.coef[0b100] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(maj.coef[0b111] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(maj.coef[0b000] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(maj.coef[0b011] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("parseval holds for every catalog family") {
  for (const auto& f : {dictator(8), parity(8), majority(7), block_function(8),
                        pinned_modification(parity(8), 2), random_table(8, 401)})
    CHECK(parseval_gap(walsh_spectrum(*f)) <= 1e-12);
  CHECK_THROWS_AS((void)walsh_spectrum(*parity(21)), std::invalid_argument);
}

TEST_CASE("spectrum constant term equals the symmetric-measure mean") {
  const DynamicsParams params(6, 0.5);
  for (std::uint64_t seed : {402, 403, 404}) {
    const auto f = random_table(6, seed);
    CHECK(walsh_spectrum(*f).coef[0] ==
          doctest::Approx(exact_mean(*f, params)).epsilon(1e-13));
  }
}

TEST_CASE("exact covariance closed forms") {
  // dictator: Cov = e^-eps for every n
  CHECK(exact_covariance(walsh_spectrum(*dictator(6)), 0.5) ==
        doctest::Approx(0.6065306597126334).epsilon(1e-14));
  // parity(2): Cov = e^-(2 eps)
  CHECK(exact_covariance(walsh_spectrum(*parity(2)), 1.0) ==
        doctest::Approx(0.1353352832366127).epsilon(1e-14));
  // eps = 0 recovers the variance 1 - mean^2
  const auto f = random_table(6, 405);
  const auto spec = walsh_spectrum(*f);
  const double mean = spec.coef[0];
  CHECK(exact_covariance(spec, 0.0) == doctest::Approx(1.0 - mean * mean).epsilon(1e-12));
}

TEST_CASE("spectrum and brute-force covariance routes agree") {
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = 4 + static_cast<std::size_t>(trial % 4);
    const auto f = random_table(n, 500 + static_cast<std::uint64_t>(trial));
    const double eps = trial % 2 ? 1.0 : 0.3;
    const double a = exact_covariance(walsh_spectrum(*f), eps);
    const double b = exact_covariance_bruteforce(*f, eps);
    CHECK(std::fabs(a - b) <= 1e-10);
  }
  CHECK_THROWS_AS((void)exact_covariance_bruteforce(*parity(11), 0.5),
                  std::invalid_argument);
}

TEST_CASE("exact instability matches analytic forms and the spectrum identity") {
  // dictator: P[f0 != f1] = 2 p (1-p) (1 - e^-eps)
  const double eps = 0.8;
  for (const double p : {0.5, 0.3}) {
    const DynamicsParams params(7, p);
    const double expect = 2.0 * p * (1.0 - p) * -std::expm1(-eps);
    CHECK(exact_instability(*dictator(7), params, eps) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
  // parity(n): each coordinate disagrees independently with prob d;
  // P[odd # disagreements] = (1 - (1-2d)^n) / 2
  for (const double p : {0.5, 0.25}) {
    const DynamicsParams params(9, p);
    const double d = 2.0 * p * (1.0 - p) * -std::expm1(-eps);
    const double expect = 0.5 * (1.0 - std::pow(1.0 - 2.0 * d, 9.0));
    CHECK(exact_instability(*parity(9), params, eps) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
  // p = 1/2: instability = (1 - Cov - mean^2) / 2 through the spectrum
  for (std::uint64_t seed : {406, 407}) {
    const auto f = random_table(8, seed);
    const auto spec = walsh_spectrum(*f);
    const DynamicsParams params(8, 0.5);
    const double mean = spec.coef[0];
    const double expect = 0.5 * (1.0 - exact_covariance(spec, eps) - mean * mean);
    CHECK(exact_instability(*f, params, eps) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK_THROWS_AS((void)exact_instability(*parity(13), DynamicsParams(13, 0.5), 0.5),
                  std::invalid_argument);
}

TEST_CASE("exact mean closed forms") {
  const DynamicsParams params(5, 0.3);
  CHECK(exact_mean(*dictator(5), params) == doctest::Approx(-0.4).epsilon(1e-14));
  // majority(3): P[+1] = p^3 + 3 p^2 (1-p) = 0.216 at p = 0.3
  CHECK(exact_mean(*majority(3), DynamicsParams(3, 0.3)) ==
        doctest::Approx(2.0 * 0.216 - 1.0).epsilon(1e-13));
  CHECK(exact_mean(*constant_function(5, +1), params) == doctest::Approx(1.0));
}

TEST_CASE("exact closeness: enumeration route") {
  // pinned(dictator, 2) differs exactly on {x0 = x1 = -1}.
  const DynamicsParams params(10, 0.5);
  const auto base = dictator(10);
  const auto mod = pinned_modification(base, 2);
  CHECK(exact_closeness(*base, *mod, params) == doctest::Approx(0.25).epsilon(1e-12));
  // asymmetric p: probability (1-p)^2
  const DynamicsParams skew(10, 0.3);
  CHECK(exact_closeness(*base, *mod, skew) == doctest::Approx(0.49).epsilon(1e-12));
  CHECK(exact_closeness(*base, *base, params) == doctest::Approx(0.0));
}

TEST_CASE("exact closeness: level route against direct binomial summation") {
  const auto f = parity(300);
  const auto g = striped_modification(parity(300), 0.4);
  const DynamicsParams params(300, 0.4);
  const double expect = closeness_by_levels(*f, *g, 300, 0.4);
  CHECK(exact_closeness(*f, *g, params) == doctest::Approx(expect).epsilon(1e-10));
  // dimension mismatch is an error
  CHECK_THROWS_AS((void)exact_closeness(*parity(5), *parity(6), DynamicsParams(5, 0.5)),
                  std::invalid_argument);
}

TEST_CASE("exact hitting tail matches analytic survival laws") {
  // Single coordinate: S(delta) = p e^{-(1-p) delta} + (1-p) e^{-p delta}.
  // parity(n) changes at the first coordinate value change, so its tail is
  // S(delta)^n by independence.
  for (const double p : {0.5, 0.35}) {
    for (const double delta : {0.4, 1.0, 3.0}) {
      const double s1 = p * std::exp(-(1.0 - p) * delta) +
                        (1.0 - p) * std::exp(-p * delta);
      CHECK(exact_hitting_tail(*parity(1), DynamicsParams(1, p), delta).value ==
            doctest::Approx(s1).epsilon(1e-9));
      CHECK(exact_hitting_tail(*parity(5), DynamicsParams(5, p), delta).value ==
            doctest::Approx(std::pow(s1, 5.0)).epsilon(1e-9));
    }
  }
  // dictator in a larger cube has the single-coordinate tail
  const double delta = 0.7, p = 0.3;
  const double s1 = p * std::exp(-0.7 * delta) + 0.7 * std::exp(-0.3 * delta);
  CHECK(exact_hitting_tail(*dictator(8), DynamicsParams(8, p), delta).value ==
        doctest::Approx(s1).epsilon(1e-9));
  // delta = 0: nothing has changed yet
  CHECK(exact_hitting_tail(*majority(7), DynamicsParams(7, 0.5), 0.0).value ==
        doctest::Approx(1.0).epsilon(1e-12));
  // constants never change
  CHECK(exact_hitting_tail(*constant_function(4, +1), DynamicsParams(4, 0.5), 2.0).value ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(
      (void)exact_hitting_tail(*parity(13), DynamicsParams(13, 0.5), 1.0),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)exact_hitting_tail(*parity(4), DynamicsParams(4, 0.5), 100.0),
      std::invalid_argument);
}

TEST_CASE("all-ones hitting bound, frozen values") {
  // n = 1, delta = 1: lhs = 1 - e^{-1/2}/2, rhs = (1 - e^{-1})/4.
  const auto c = check_all_ones_hitting_bound(1, 1.0);
  CHECK(c.lhs == doctest::Approx(0.6967346701436833).epsilon(1e-12));
  CHECK(c.rhs == doctest::Approx(0.15803013970713942).epsilon(1e-12));
  CHECK(c.holds);
  CHECK(c.identity_gap <= 1e-12);
  // delta = 0: lhs collapses to the stationary mass of the all-ones state.
  const auto c0 = check_all_ones_hitting_bound(6, 0.0);
  CHECK(c0.lhs == doctest::Approx(std::ldexp(1.0, -6)).epsilon(1e-12));
  CHECK(c0.rhs == doctest::Approx(0.0));
  CHECK(c0.holds);
  CHECK_THROWS_AS((void)check_all_ones_hitting_bound(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)check_all_ones_hitting_bound(13, 1.0), std::invalid_argument);
}

TEST_CASE("binomial level mass on small cases") {
  // n = 10, p = 1/2: P[level in {0,5}] = (1 + 252) / 1024.
  CHECK(binomial_level_mass(10, 0.5, {0, 5}) ==
        doctest::Approx(253.0 / 1024.0).epsilon(1e-13));
  // duplicates are counted once
  CHECK(binomial_level_mass(10, 0.5, {5, 5}) ==
        doctest::Approx(252.0 / 1024.0).epsilon(1e-13));
  CHECK(binomial_level_mass(10, 0.5, {}) == doctest::Approx(0.0));
  CHECK_THROWS_AS((void)binomial_level_mass(10, 0.5, {11}), std::invalid_argument);
}

TEST_CASE("binomial residue masses, exact comparisons") {
  // alpha = 2 at p = 1/2: even and odd levels each carry exactly 1/2.
  const auto even_odd = binomial_residue_masses(10, 0.5, 2);
  CHECK(even_odd[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(even_odd[1] == doctest::Approx(0.5).epsilon(1e-14));
  // n = 20, alpha = 3 against exact integer enumeration
  const auto m3 = binomial_residue_masses(20, 0.5, 3);
  double exact[3] = {0.0, 0.0, 0.0};
  std::uint64_t binom = 1;  // C(20, 0)
  for (std::size_t k = 0; k <= 20; ++k) {
    exact[k % 3] += std::ldexp(static_cast<double>(binom), -20);
    binom = binom * (20 - k) / (k + 1);
  }
  for (int r = 0; r < 3; ++r) CHECK(m3[r] == doctest::Approx(exact[r]).epsilon(1e-13));
  // single class takes everything
  CHECK(binomial_residue_masses(40, 0.3, 1)[0] == doctest::Approx(1.0).epsilon(1e-13));
  // alpha beyond n leaves empty classes
  const auto wide = binomial_residue_masses(4, 0.5, 7);
  CHECK(wide[5] == doctest::Approx(0.0));
  CHECK(wide[6] == doctest::Approx(0.0));
  // degenerate p lands all mass on one class
  CHECK(binomial_residue_masses(9, 1.0, 4)[1] == doctest::Approx(1.0));
  CHECK(binomial_residue_masses(9, 0.0, 4)[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS((void)binomial_residue_masses(9, 0.5, 0), std::invalid_argument);
}

TEST_CASE("residue masses stay normalized at scale") {
  for (const std::size_t n : {std::size_t{100000}, std::size_t{1000000}}) {
    const auto masses = binomial_residue_masses(n, 0.5, 14);
    double sum = 0.0;
    for (const double m : masses) sum += m;
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("ou moment check: exact mean identity and frozen variance limit") {
  // mean identity is exact at any p, n
  for (const auto& [n, p, l0, s] :
       {std::tuple<std::size_t, double, std::size_t, double>{100, 0.5, 75, 0.3},
        std::tuple<std::size_t, double, std::size_t, double>{1000000, 0.3, 400000, 2.0},
        std::tuple<std::size_t, double, std::size_t, double>{17, 0.9, 0, 1.0}}) {
    const auto c = ou_moment_check(DynamicsParams(n, p), l0, s);
    CHECK(c.mean_err <= 1e-12);
  }
  // frozen limit variance at s = 1
  const auto c = ou_moment_check(DynamicsParams(1000, 0.5), 500, 1.0);
  CHECK(c.var_ref == doctest::Approx(0.43233235838169365).epsilon(1e-14));
  CHECK(c.var_err <= 1e-12);  // exactly zero at p = 1/2
  CHECK_THROWS_AS((void)ou_moment_check(DynamicsParams(10, 1.0), 5, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)ou_moment_check(DynamicsParams(10, 0.5), 11, 1.0),
                  std::invalid_argument);
}

TEST_CASE("comparison sandwich constants and a small instance") {
  CHECK(comparison_lower_constant() == doctest::Approx(0.04550026389635842).epsilon(1e-14));
  CHECK(comparison_upper_constant() == doctest::Approx(2.5957691216057308).epsilon(1e-14));
  const auto check = check_lift_density_sandwich(*circle_function(128, 3));
  CHECK(check.holds);
  CHECK(check.cycle == 128);
  CHECK(check.rho > 0.0);
  CHECK(check.lower <= check.lifted_prob);
  CHECK(check.lifted_prob <= check.upper);
  // odd cycles and oversized lifts are rejected
  CHECK_THROWS_AS((void)check_lift_density_sandwich(*circle_constant(7, +1)),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)check_lift_density_sandwich(*circle_constant(16384, +1)),
                  std::invalid_argument);
}

TEST_CASE("lifted probability equals the residue-mass aggregation") {
  // For a constant +1 circle function the lifted probability is one.
  const auto all = check_lift_density_sandwich(*circle_constant(64, +1));
  CHECK(all.rho == doctest::Approx(1.0));
  CHECK(all.lifted_prob == doctest::Approx(1.0).epsilon(1e-12));
  // position parity marks every other residue: exactly 1/2 by symmetry.
  const auto half = check_lift_density_sandwich(*circle_position_parity(64));
  CHECK(half.rho == doctest::Approx(0.5));
  CHECK(half.lifted_prob == doctest::Approx(0.5).epsilon(1e-12));
}
