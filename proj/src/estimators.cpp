#include "bfdyn/estimators.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace bfdyn {

int resolve_workers(int requested) {
  if (requested < 0) throw std::invalid_argument("workers must be >= 0");
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BFDYN_WORKERS")) {
    const std::string text(env);
    int value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || value < 1)
      throw std::invalid_argument("BFDYN_WORKERS must be a positive integer");
    return value;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

// Replicas are dealt out in fixed chunks; replica i always runs on the stream
// derive_seed(seed, i) and all accumulators are integer counts, so the merge
// is exact and independent of scheduling.
constexpr std::uint64_t kChunk = 1024;

template <typename Acc, typename Body>
void run_replicas(std::uint64_t replicas, std::uint64_t seed, const RunOptions& opt,
                  Acc& total, const Body& body) {
  if (replicas == 0) throw std::invalid_argument("replicas must be positive");
  const std::uint64_t chunks = (replicas + kChunk - 1) / kChunk;
  const int workers = static_cast<int>(
      std::min<std::uint64_t>(static_cast<std::uint64_t>(resolve_workers(opt.workers)), chunks));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < replicas; ++i) {
      RngStream rng(derive_seed(seed, i));
      body(rng, total);
    }
    return;
  }

  std::atomic<std::uint64_t> cursor{0};
  std::atomic<bool> failed{false};
  std::mutex merge_mutex;
  std::exception_ptr error;

  auto work = [&]() {
    Acc local{};
    try {
      for (;;) {
        const std::uint64_t begin = cursor.fetch_add(kChunk);
        if (begin >= replicas || failed.load(std::memory_order_relaxed)) break;
        const std::uint64_t end = std::min(begin + kChunk, replicas);
        for (std::uint64_t i = begin; i < end; ++i) {
          RngStream rng(derive_seed(seed, i));
          body(rng, local);
        }
      }
      const std::lock_guard<std::mutex> lock(merge_mutex);
      total.merge(local);
    } catch (...) {
      const std::lock_guard<std::mutex> lock(merge_mutex);
      if (!error) error = std::current_exception();
      failed.store(true);
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) threads.emplace_back(work);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

struct SignAcc {
  std::int64_t sum = 0;
  void merge(const SignAcc& o) { sum += o.sum; }
};

struct PairAcc {
  std::int64_t sum0 = 0;
  std::int64_t sum1 = 0;
  std::int64_t sum01 = 0;
  std::int64_t disagree = 0;
  void merge(const PairAcc& o) {
    sum0 += o.sum0;
    sum1 += o.sum1;
    sum01 += o.sum01;
    disagree += o.disagree;
  }
  void add(int v0, int v1) {
    sum0 += v0;
    sum1 += v1;
    sum01 += v0 * v1;
    disagree += v0 != v1;
  }
};

struct CountAcc {
  std::int64_t count = 0;
  void merge(const CountAcc& o) { count += o.count; }
};

EstimateResult mean_result(std::int64_t sum, std::uint64_t replicas, std::uint64_t seed) {
  const double r = static_cast<double>(replicas);
  const double m = static_cast<double>(sum) / r;
  const double var = std::max(0.0, 1.0 - m * m);
  return {m, std::sqrt(var / r), replicas, seed, std::nullopt};
}

EstimateResult fraction_result(std::int64_t count, std::uint64_t replicas,
                               std::uint64_t seed) {
  const double r = static_cast<double>(replicas);
  const double ph = static_cast<double>(count) / r;
  const double var = std::max(0.0, ph * (1.0 - ph));
  return {ph, std::sqrt(var / r), replicas, seed, std::nullopt};
}

void check_pair(const BooleanFunction& f, const DynamicsParams& params, double eps) {
  if (f.dimension() != params.n)
    throw std::invalid_argument("estimator: function dimension mismatch");
  if (!(eps >= 0.0)) throw std::invalid_argument("estimator: eps must be >= 0");
}

PairAcc pair_counts(const BooleanFunction& f, const DynamicsParams& params, double eps,
                    std::uint64_t replicas, std::uint64_t seed, const RunOptions& opt) {
  check_pair(f, params, eps);
  PairAcc acc;
  if (f.level_symmetric()) {
    run_replicas(replicas, seed, opt, acc, [&](RngStream& rng, PairAcc& a) {
      const LevelState s0 = sample_stationary_level(params, rng);
      const LevelState s1 = level_step(s0, eps, params, rng);
      a.add(f.eval_level(s0.level), f.eval_level(s1.level));
    });
  } else {
    run_replicas(replicas, seed, opt, acc, [&](RngStream& rng, PairAcc& a) {
      const Configuration x0 = sample_stationary(params, rng);
      const Configuration x1 = evolve_pair(x0, eps, params, rng);
      a.add(f.eval(x0), f.eval(x1));
    });
  }
  return acc;
}

// Shared plug-in covariance: mean(v0 v1) - mean(v0) mean(v1). The reported
// standard error is that of the leading product term.
EstimateResult covariance_result(const PairAcc& acc, std::uint64_t replicas,
                                 std::uint64_t seed) {
  const double r = static_cast<double>(replicas);
  const double m0 = static_cast<double>(acc.sum0) / r;
  const double m1 = static_cast<double>(acc.sum1) / r;
  const double m01 = static_cast<double>(acc.sum01) / r;
  const double var01 = std::max(0.0, 1.0 - m01 * m01);
  return {m01 - m0 * m1, std::sqrt(var01 / r), replicas, seed, std::nullopt};
}

}  // namespace

// ---- hypercube chain ----

EstimateResult estimate_degeneracy(const BooleanFunction& f, const DynamicsParams& params,
                                   std::uint64_t replicas, std::uint64_t seed,
                                   const RunOptions& opt) {
  if (f.dimension() != params.n)
    throw std::invalid_argument("estimator: function dimension mismatch");
  SignAcc acc;
  if (f.level_symmetric()) {
    run_replicas(replicas, seed, opt, acc, [&](RngStream& rng, SignAcc& a) {
      a.sum += f.eval_level(sample_stationary_level(params, rng).level);
    });
  } else {
    run_replicas(replicas, seed, opt, acc, [&](RngStream& rng, SignAcc& a) {
      a.sum += f.eval(sample_stationary(params, rng));
    });
  }
  return mean_result(acc.sum, replicas, seed);
}

EstimateResult estimate_covariance(const BooleanFunction& f, const DynamicsParams& params,
                                   double eps, std::uint64_t replicas, std::uint64_t seed,
                                   const RunOptions& opt) {
  return covariance_result(pair_counts(f, params, eps, replicas, seed, opt), replicas, seed);
}

EstimateResult estimate_instability(const BooleanFunction& f, const DynamicsParams& params,
                                    double eps, std::uint64_t replicas, std::uint64_t seed,
                                    const RunOptions& opt) {
  const PairAcc acc = pair_counts(f, params, eps, replicas, seed, opt);
  return fraction_result(acc.disagree, replicas, seed);
}

EstimateResult estimate_volatility_tail(const BooleanFunction& f,
                                        const DynamicsParams& params, double delta,
                                        std::uint64_t replicas, std::uint64_t seed,
                                        const RunOptions& opt) {
  if (f.dimension() != params.n)
    throw std::invalid_argument("estimator: function dimension mismatch");
  if (!(delta >= 0.0)) throw std::invalid_argument("estimator: delta must be >= 0");
  CountAcc acc;
  if (f.level_symmetric()) {
    run_replicas(replicas, seed, opt, acc, [&](RngStream& rng, CountAcc& a) {
      const LevelState s0 = sample_stationary_level(params, rng);
      a.count += level_hitting_time(s0, f, params, delta, rng).censored;
    });
  } else {
    run_replicas(replicas, seed, opt, acc, [&](RngStream& rng, CountAcc& a) {
      const Configuration x0 = sample_stationary(params, rng);
      a.count += hitting_time(x0, f, params, delta, rng).censored;
    });
  }
  EstimateResult result = fraction_result(acc.count, replicas, seed);
  result.censored_fraction = result.estimate;
  return result;
}

EstimateResult estimate_closeness(const BooleanFunction& f, const BooleanFunction& g,
                                  const DynamicsParams& params, std::uint64_t replicas,
                                  std::uint64_t seed, const RunOptions& opt) {
  if (f.dimension() != params.n || g.dimension() != params.n)
    throw std::invalid_argument("estimator: function dimension mismatch");
  CountAcc acc;
  if (f.level_symmetric() && g.level_symmetric()) {
    run_replicas(replicas, seed, opt, acc, [&](RngStream& rng, CountAcc& a) {
      const std::size_t level = sample_stationary_level(params, rng).level;
      a.count += f.eval_level(level) != g.eval_level(level);
    });
  } else {
    run_replicas(replicas, seed, opt, acc, [&](RngStream& rng, CountAcc& a) {
      const Configuration x = sample_stationary(params, rng);
      a.count += f.eval(x) != g.eval(x);
    });
  }
  return fraction_result(acc.count, replicas, seed);
}

PairStats estimate_pair_joint(const BooleanFunction& f, const DynamicsParams& params,
                              double eps, std::uint64_t replicas, std::uint64_t seed,
                              const RunOptions& opt) {
  const PairAcc acc = pair_counts(f, params, eps, replicas, seed, opt);
  PairStats stats;
  stats.covariance = covariance_result(acc, replicas, seed);
  stats.instability = fraction_result(acc.disagree, replicas, seed);
  const double r = static_cast<double>(replicas);
  stats.variance = 1.0 - (static_cast<double>(acc.sum0) / r) *
                             (static_cast<double>(acc.sum1) / r);
  stats.sum0 = acc.sum0;
  stats.sum1 = acc.sum1;
  stats.sum01 = acc.sum01;
  stats.disagreements = acc.disagree;
  return stats;
}

// ---- circle chain ----

EstimateResult estimate_degeneracy_circle(const CircleFunction& f, std::uint64_t replicas,
                                          std::uint64_t seed, const RunOptions& opt) {
  SignAcc acc;
  run_replicas(replicas, seed, opt, acc, [&](RngStream& rng, SignAcc& a) {
    a.sum += f.eval(sample_uniform_circle(f.cycle(), rng).pos);
  });
  return mean_result(acc.sum, replicas, seed);
}

namespace {

PairAcc pair_counts_circle(const CircleFunction& f, double eps, std::uint64_t replicas,
                           std::uint64_t seed, const RunOptions& opt) {
  if (!(eps >= 0.0)) throw std::invalid_argument("estimator: eps must be >= 0");
  PairAcc acc;
  run_replicas(replicas, seed, opt, acc, [&](RngStream& rng, PairAcc& a) {
    const CircleState y0 = sample_uniform_circle(f.cycle(), rng);
    const CircleState y1 = walk_pair(y0, eps, rng);
    a.add(f.eval(y0.pos), f.eval(y1.pos));
  });
  return acc;
}

}  // namespace

EstimateResult estimate_covariance_circle(const CircleFunction& f, double eps,
                                          std::uint64_t replicas, std::uint64_t seed,
                                          const RunOptions& opt) {
  return covariance_result(pair_counts_circle(f, eps, replicas, seed, opt), replicas, seed);
}

EstimateResult estimate_instability_circle(const CircleFunction& f, double eps,
                                           std::uint64_t replicas, std::uint64_t seed,
                                           const RunOptions& opt) {
  const PairAcc acc = pair_counts_circle(f, eps, replicas, seed, opt);
  return fraction_result(acc.disagree, replicas, seed);
}

EstimateResult estimate_volatility_tail_circle(const CircleFunction& f, double delta,
                                               std::uint64_t replicas, std::uint64_t seed,
                                               const RunOptions& opt) {
  if (!(delta >= 0.0)) throw std::invalid_argument("estimator: delta must be >= 0");
  CountAcc acc;
  run_replicas(replicas, seed, opt, acc, [&](RngStream& rng, CountAcc& a) {
    const CircleState y0 = sample_uniform_circle(f.cycle(), rng);
    a.count += hitting_time_circle(y0, f, delta, rng).censored;
  });
  EstimateResult result = fraction_result(acc.count, replicas, seed);
  result.censored_fraction = result.estimate;
  return result;
}

EstimateResult estimate_closeness_circle(const CircleFunction& f, const CircleFunction& g,
                                         std::uint64_t replicas, std::uint64_t seed,
                                         const RunOptions& opt) {
  if (f.cycle() != g.cycle())
    throw std::invalid_argument("estimator: cycle mismatch");
  CountAcc acc;
  run_replicas(replicas, seed, opt, acc, [&](RngStream& rng, CountAcc& a) {
    const std::int64_t pos = sample_uniform_circle(f.cycle(), rng).pos;
    a.count += f.eval(pos) != g.eval(pos);
  });
  return fraction_result(acc.count, replicas, seed);
}

}  // namespace bfdyn
