#pragma once

#include <cstdint>
#include <optional>

#include "bfdyn/circle.hpp"
#include "bfdyn/functions.hpp"
#include "bfdyn/hypercube.hpp"
#include "bfdyn/types.hpp"

namespace bfdyn {

// Monte Carlo estimators. Replicas are independent; replica i draws from the
// stream seeded with derive_seed(seed, i), so results are bit-identical for
// any worker count. All accumulation is over integer counts of +-1 outcomes,
// which makes the merge order immaterial.

struct EstimateResult {
  double estimate = 0.0;
  double std_err = 0.0;
  std::uint64_t replicas = 0;
  std::uint64_t seed = 0;
  std::optional<double> censored_fraction;  // hitting-time runs only
};

struct RunOptions {
  int workers = 0;  // 0: use BFDYN_WORKERS, else hardware concurrency
};

// Resolves the effective worker count (explicit > env BFDYN_WORKERS > hw).
int resolve_workers(int requested);

// ---- hypercube chain ----

// Mean of f under the stationary measure.
EstimateResult estimate_degeneracy(const BooleanFunction& f, const DynamicsParams& params,
                                   std::uint64_t replicas, std::uint64_t seed,
                                   const RunOptions& opt = {});

// Cov[f(X_0), f(X_eps)].
EstimateResult estimate_covariance(const BooleanFunction& f, const DynamicsParams& params,
                                   double eps, std::uint64_t replicas, std::uint64_t seed,
                                   const RunOptions& opt = {});

// P[f(X_0) != f(X_eps)].
EstimateResult estimate_instability(const BooleanFunction& f, const DynamicsParams& params,
                                    double eps, std::uint64_t replicas, std::uint64_t seed,
                                    const RunOptions& opt = {});

// P[tau > delta]: probability the first f-value change is censored at delta.
EstimateResult estimate_volatility_tail(const BooleanFunction& f,
                                        const DynamicsParams& params, double delta,
                                        std::uint64_t replicas, std::uint64_t seed,
                                        const RunOptions& opt = {});

// P[f(X_0) != g(X_0)].
EstimateResult estimate_closeness(const BooleanFunction& f, const BooleanFunction& g,
                                  const DynamicsParams& params, std::uint64_t replicas,
                                  std::uint64_t seed, const RunOptions& opt = {});

// Covariance, variance and disagreement from one shared replica set. With
// the shared plug-in mu^2 := mean(f0) mean(f1), the identity
//   cov == var - 2 * instability
// holds exactly on the counts (s01 == replicas - 2 * disagreements).
struct PairStats {
  EstimateResult covariance;
  EstimateResult instability;
  double variance = 0.0;
  std::int64_t sum0 = 0;
  std::int64_t sum1 = 0;
  std::int64_t sum01 = 0;
  std::int64_t disagreements = 0;
};

PairStats estimate_pair_joint(const BooleanFunction& f, const DynamicsParams& params,
                              double eps, std::uint64_t replicas, std::uint64_t seed,
                              const RunOptions& opt = {});

// ---- circle chain ----

EstimateResult estimate_degeneracy_circle(const CircleFunction& f, std::uint64_t replicas,
                                          std::uint64_t seed, const RunOptions& opt = {});
EstimateResult estimate_covariance_circle(const CircleFunction& f, double eps,
                                          std::uint64_t replicas, std::uint64_t seed,
                                          const RunOptions& opt = {});
EstimateResult estimate_instability_circle(const CircleFunction& f, double eps,
                                           std::uint64_t replicas, std::uint64_t seed,
                                           const RunOptions& opt = {});
EstimateResult estimate_volatility_tail_circle(const CircleFunction& f, double delta,
                                               std::uint64_t replicas, std::uint64_t seed,
                                               const RunOptions& opt = {});
EstimateResult estimate_closeness_circle(const CircleFunction& f, const CircleFunction& g,
                                         std::uint64_t replicas, std::uint64_t seed,
                                         const RunOptions& opt = {});

}  // namespace bfdyn
