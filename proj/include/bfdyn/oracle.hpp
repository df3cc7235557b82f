#pragma once

#include <cstdint>
#include <vector>

#include "bfdyn/functions.hpp"
#include "bfdyn/types.hpp"

namespace bfdyn {

// Exact small-n references and closed-form checks. Everything here is
// deterministic; Monte Carlo estimates are validated against these routines.

// ---- Fourier-Walsh ----

// Coefficients indexed by subset bitmask; coef[S] = 2^-n sum_x f(x) prod_{i in S} x_i.
struct Spectrum {
  std::size_t n = 0;
  std::vector<double> coef;
};

Spectrum walsh_spectrum(const BooleanFunction& f);  // n <= 20

// |sum_S coef^2 - 1|; zero for any {-1,+1}-valued function.
double parseval_gap(const Spectrum& s);

// Cov[f(X_0), f(X_eps)] = sum_{S nonempty} coef(S)^2 e^(-eps |S|), valid at
// p = 1/2 where the coordinate semigroup diagonalizes the Walsh basis.
double exact_covariance(const Spectrum& s, double eps);

// Independent route: direct enumeration over (point, resample-mask,
// resample-values); p = 1/2, n <= 10.
double exact_covariance_bruteforce(const BooleanFunction& f, double eps);

// ---- exact two-time and hitting quantities ----

// P[f(X_0) != f(X_eps)] by enumeration over ordered state pairs; any p, n <= 12.
double exact_instability(const BooleanFunction& f, const DynamicsParams& params,
                         double eps);

// E[f(X_0)] under the stationary measure; n <= 20.
double exact_mean(const BooleanFunction& f, const DynamicsParams& params);

// P[f(X_0) != g(X_0)]. Level route (any n <= 1e7) when both functions are
// level-symmetric, else enumeration (n <= 20).
double exact_closeness(const BooleanFunction& f, const BooleanFunction& g,
                       const DynamicsParams& params);

struct ExactTail {
  std::size_t n = 0;
  double delta = 0.0;
  double value = 0.0;  // P[tau > delta] from a stationary start
};

// Survival probability of the first f-value change, computed by
// uniformization at rate n with the Poisson tail truncated below 1e-12;
// absolute accuracy ~1e-10. n <= 12, any p.
ExactTail exact_hitting_tail(const BooleanFunction& f, const DynamicsParams& params,
                             double delta);

// ---- all-ones hitting bound (verify suite "anders") ----

struct AllOnesHittingCheck {
  std::size_t n = 0;
  double delta = 0.0;
  double lhs = 0.0;        // exact P[tau_{all +1} <= delta], stationary start, p = 1/2
  double rhs = 0.0;        // (1 - e^(-delta))/2 * n 2^-n
  bool holds = false;      // lhs >= rhs
  double identity_lhs = 0.0;  // E[ time in {X_t = X_0} up to delta ], via uniformization
  double identity_rhs = 0.0;  // integral of ((1+e^(-t))/2)^n over [0, delta]
  double identity_gap = 0.0;
};

AllOnesHittingCheck check_all_ones_hitting_bound(std::size_t n, double delta);  // n <= 12

// ---- binomial level masses ----

// P[Binomial(n,p) in levels]; log-space terms, compensated summation.
// Handles n up to ~1e7.
double binomial_level_mass(std::size_t n, double p,
                           const std::vector<std::size_t>& levels);

// Mass of every residue class mod alpha in one pass over [0, n].
std::vector<double> binomial_residue_masses(std::size_t n, double p,
                                            std::uint32_t alpha);

// ---- lift density sandwich (verify suite "comparison") ----

struct ComparisonCheck {
  std::int64_t cycle = 0;
  double rho = 0.0;          // +1 fraction of fc on the cycle
  double lifted_prob = 0.0;  // P[fc(level(X_0) mod cycle) = +1], exact binomial
  double lower = 0.0;        // 2 (1 - Phi(2)) rho
  double upper = 0.0;        // (1 + 4 phi(0)) rho
  bool holds = false;
};

// Exact sandwich for the lifted density at p = 1/2; cycle even, cycle^2 <= 2^26.
ComparisonCheck check_lift_density_sandwich(const CircleFunction& fc);

// Constants of the sandwich, exposed for pinning in tests.
double comparison_lower_constant();  // 2 (1 - Phi(2)) ~= 0.045500
double comparison_upper_constant();  // 1 + 4 phi(0)   ~= 2.595769

// ---- Ornstein-Uhlenbeck moment check ----

struct OuCheck {
  double mean_z = 0.0;    // exact conditional mean of the normalized level
  double var_z = 0.0;     // exact conditional variance
  double mean_ref = 0.0;  // z0 e^(-s)
  double var_ref = 0.0;   // (1 - e^(-2s)) / 2
  double mean_err = 0.0;
  double var_err = 0.0;
};

// Conditional level moments after time s from level l0, computed from the
// per-coordinate transition probabilities, against the limit formulas.
// The mean identity is exact for every n; the variance gap is the finite-n
// deviation (identically zero at p = 1/2).
OuCheck ou_moment_check(const DynamicsParams& params, std::size_t level0, double s);

}  // namespace bfdyn
