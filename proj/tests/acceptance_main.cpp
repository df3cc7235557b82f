// Acceptance gate: one self-contained check per shipped guarantee, each
// printing a single [PASS]/[FAIL] line. Exit 0 iff every selected check
// passes. Tolerances are pinned here, not configurable.

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bfdyn/estimators.hpp"
#include "bfdyn/experiment.hpp"
#include "bfdyn/functions.hpp"
#include "bfdyn/hypercube.hpp"
#include "bfdyn/oracle.hpp"
#include "bfdyn/rng.hpp"

using namespace bfdyn;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// 4-SE agreement band around a known probability q; the SE uses q itself so
// the band stays meaningful for extreme tails where p-hat degenerates.
bool within_band(const EstimateResult& est, double q, std::string& why) {
  const double se = std::sqrt(q * (1.0 - q) / static_cast<double>(est.replicas));
  if (std::fabs(est.estimate - q) <= 4.0 * se + 1e-12) return true;
  why = "estimate " + fmt(est.estimate) + " vs " + fmt(q) + " (4 SE = " +
        fmt(4.0 * se) + ")";
  return false;
}

// est_b <= est_a within the joint Monte Carlo error.
bool nonincreasing(const EstimateResult& a, const EstimateResult& b, std::string& why) {
  const double joint = std::sqrt(a.std_err * a.std_err + b.std_err * b.std_err);
  if (b.estimate <= a.estimate + 4.0 * joint + 1e-12) return true;
  why = fmt(b.estimate) + " > " + fmt(a.estimate) + " + 4*" + fmt(joint);
  return false;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// ---- criterion bodies; each fills `detail` on failure ----

// exact P[tau_{all+1} <= delta] >= (1 - e^-delta)/2 * n 2^-n over the full
// (n, delta) grid.
bool criterion_hitting_bound(std::string& detail) {
  int passed = 0;
  for (std::size_t n = 1; n <= 12; ++n) {
    for (const double delta : {0.1, 0.5, 1.0, 4.0}) {
      const auto c = check_all_ones_hitting_bound(n, delta);
      if (!c.holds) {
        detail = "n=" + std::to_string(n) + " delta=" + fmt(delta) + ": lhs " +
                 fmt(c.lhs) + " < rhs " + fmt(c.rhs);
        return false;
      }
      ++passed;
    }
  }
  detail = std::to_string(passed) + "/48 bounds hold";
  return true;
}

// MC volatility tails against the closed forms e^(-delta/2) (dictator) and
// e^(-5 delta) (parity on 10 coordinates), p = 1/2, 1e5 replicas.
bool criterion_closed_form_tails(std::string& detail) {
  const std::uint64_t R = 100000;
  const auto dict = dictator(100);
  const DynamicsParams pd(100, 0.5);
  const auto par = parity(10);
  const DynamicsParams pp(10, 0.5);
  std::uint64_t seed = 8101;
  for (const double delta : {0.25, 1.0, 4.0}) {
    std::string why;
    const auto dt = estimate_volatility_tail(*dict, pd, delta, R, seed++);
    if (!within_band(dt, std::exp(-0.5 * delta), why)) {
      detail = "dictator delta=" + fmt(delta) + ": " + why;
      return false;
    }
    const auto pt = estimate_volatility_tail(*par, pp, delta, R, seed++);
    if (!within_band(pt, std::exp(-5.0 * delta), why)) {
      detail = "parity(10) delta=" + fmt(delta) + ": " + why;
      return false;
    }
  }
  detail = "6 tails within 4 SE of closed forms";
  return true;
}

// Spectrum covariance equals brute-force enumeration for 20 random
// functions; MC covariance within 4 SE of the spectrum oracle.
bool criterion_fourier_equivalence(std::string& detail) {
  RngStream pick(912001);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + pick.uniform_below(5);  // 4..8
    std::vector<std::int8_t> truth(std::size_t{1} << n);
    for (auto& v : truth) v = pick.bernoulli(0.5) ? +1 : -1;
    const auto f = table_function(n, std::move(truth));
    const double eps = 0.1 + 0.9 * pick.uniform01();
    const double a = exact_covariance(walsh_spectrum(*f), eps);
    const double b = exact_covariance_bruteforce(*f, eps);
    if (std::fabs(a - b) > 1e-10) {
      detail = "trial " + std::to_string(trial) + " n=" + std::to_string(n) +
               ": spectrum " + fmt(a) + " vs enumeration " + fmt(b);
      return false;
    }
  }
  const std::uint64_t R = 200000;
  std::uint64_t seed = 8201;
  for (const auto& f : {dictator(10), parity(10)}) {
    const auto spec = walsh_spectrum(*f);
    const DynamicsParams params(10, 0.5);
    for (const double eps : {0.1, 0.5}) {
      const double exact = exact_covariance(spec, eps);
      const auto est = estimate_covariance(*f, params, eps, R, seed++);
      if (std::fabs(est.estimate - exact) > 4.0 * est.std_err + 1e-12) {
        detail = f->descriptor() + " eps=" + fmt(eps) + ": estimate " +
                 fmt(est.estimate) + " vs oracle " + fmt(exact);
        return false;
      }
    }
  }
  detail = "20 oracle equivalences + 4 MC covariances agree";
  return true;
}

// Conditional level moments against the limit formulas: the mean identity is
// exact for every (n, p, l0, s); the variance matches (1 - e^-2s)/2 at
// p = 1/2, n = 1e6.
bool criterion_ou_moments(std::string& detail) {
  RngStream pick(912002);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + pick.uniform_below(1000000);
    const std::size_t l0 = pick.uniform_below(n + 1);
    const double s = 0.05 + 2.95 * pick.uniform01();
    const double p = 0.05 + 0.9 * pick.uniform01();
    const auto c = ou_moment_check(DynamicsParams(n, p), l0, s);
    if (c.mean_err > 1e-12) {
      detail = "n=" + std::to_string(n) + " l0=" + std::to_string(l0) +
               " p=" + fmt(p) + " s=" + fmt(s) + ": mean_err " + fmt(c.mean_err);
      return false;
    }
  }
  for (const double s : {0.5, 1.0, 2.0}) {
    const auto c = ou_moment_check(DynamicsParams(1000000, 0.5), 500000, s);
    if (c.var_err > 1e-3) {
      detail = "s=" + fmt(s) + ": var_z " + fmt(c.var_z) + " vs " + fmt(c.var_ref);
      return false;
    }
  }
  detail = "50 exact means + 3 variance limits";
  return true;
}

// Striped stripes land on the minimum-mass residue class (mass <= 1/alpha)
// and the MC closeness estimate matches the exact disagreement probability.
bool criterion_striped(std::string& detail) {
  const std::uint32_t expected_alpha[] = {4, 8, 14};
  const std::size_t ns[] = {1000, 10000, 100000};
  std::uint64_t seed = 8301;
  for (int i = 0; i < 3; ++i) {
    const std::size_t n = ns[i];
    const DynamicsParams params(n, 0.5);
    const auto base = parity(n);
    const auto f = striped_modification(base, 0.5);
    if (f->alpha() != expected_alpha[i]) {
      detail = "n=" + std::to_string(n) + ": alpha " + std::to_string(f->alpha()) +
               " != " + std::to_string(expected_alpha[i]);
      return false;
    }
    const double cap = 1.0 / static_cast<double>(f->alpha());
    if (f->selected_mass() > cap + 1e-15) {
      detail = "n=" + std::to_string(n) + ": selected mass " +
               fmt(f->selected_mass()) + " > 1/alpha " + fmt(cap);
      return false;
    }
    const double exact = exact_closeness(*base, *f, params);
    if (exact > f->selected_mass() + 1e-15) {
      detail = "n=" + std::to_string(n) + ": exact closeness " + fmt(exact) +
               " exceeds stripe mass " + fmt(f->selected_mass());
      return false;
    }
    std::string why;
    const auto est = estimate_closeness(*base, *f, params, 200000, seed++);
    if (!within_band(est, exact, why)) {
      detail = "n=" + std::to_string(n) + ": " + why;
      return false;
    }
  }
  detail = "3 stripe masses, closeness within 4 SE";
  return true;
}

// Block function: monotone and odd (exhaustive n <= 12, randomized n = 200);
// volatility tail nonincreasing across n; instability shrinking as eps drops.
bool criterion_block(std::string& detail) {
  for (std::size_t n = 1; n <= 12; ++n) {
    const auto f = block_function(n);
    const std::uint64_t states = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < states; ++mask) {
      const auto x = Configuration::from_mask(n, mask);
      const int fx = f->eval(x);
      if (fx != -f->eval(Configuration::from_mask(n, ~mask & (states - 1)))) {
        detail = "oddness fails at n=" + std::to_string(n) + " mask=" +
                 std::to_string(mask);
        return false;
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (std::uint64_t{1} << i)) continue;
        if (fx > f->eval(Configuration::from_mask(n, mask | (std::uint64_t{1} << i)))) {
          detail = "monotonicity fails at n=" + std::to_string(n) + " mask=" +
                   std::to_string(mask) + " coord=" + std::to_string(i);
          return false;
        }
      }
    }
  }
  {
    const std::size_t n = 200;
    const auto f = block_function(n);
    RngStream rng(912003);
    for (int trial = 0; trial < 100000; ++trial) {
      Configuration x(n);
      for (std::size_t i = 0; i < n; ++i) x.set(i, rng.bernoulli(0.5) ? +1 : -1);
      Configuration neg(n);
      for (std::size_t i = 0; i < n; ++i) neg.set(i, -x[i]);
      const int fx = f->eval(x);
      if (fx != -f->eval(neg)) {
        detail = "oddness fails on a random point at n=200";
        return false;
      }
      const std::size_t i = rng.uniform_below(n);
      if (x[i] == -1) {
        Configuration up = x;
        up.set(i, +1);
        if (fx > f->eval(up)) {
          detail = "monotonicity fails on a random flip at n=200";
          return false;
        }
      }
    }
  }
  const std::uint64_t R = 20000;
  std::uint64_t seed = 8401;
  std::vector<EstimateResult> tails;
  for (const std::size_t n : {64, 256, 1024, 4096})
    tails.push_back(estimate_volatility_tail(*block_function(n), DynamicsParams(n, 0.5),
                                             1.0, R, seed++));
  for (std::size_t i = 0; i + 1 < tails.size(); ++i) {
    std::string why;
    if (!nonincreasing(tails[i], tails[i + 1], why)) {
      detail = "volatility tail rises between grid points " + std::to_string(i) +
               " and " + std::to_string(i + 1) + ": " + why;
      return false;
    }
  }
  const auto f = block_function(4096);
  const DynamicsParams params(4096, 0.5);
  std::vector<double> inst;
  for (const double eps : {0.4, 0.2, 0.1, 0.05})
    inst.push_back(estimate_instability(*f, params, eps, 50000, seed++).estimate);
  for (std::size_t i = 0; i + 1 < inst.size(); ++i) {
    if (inst[i + 1] >= inst[i]) {
      detail = "instability fails to decrease as eps drops: " + fmt(inst[i]) +
               " then " + fmt(inst[i + 1]);
      return false;
    }
  }
  detail = "structure exhaustive + randomized, tails and stability ordered";
  return true;
}

// Pinned modification: disagreement at most 2^-k yet the value-change tail
// stays above 2^-k e^(-delta k).
bool criterion_pinned(std::string& detail) {
  const DynamicsParams params(10, 0.5);
  for (const auto& base : {parity(10), dictator(10), block_function(10)}) {
    for (const std::size_t k : {1, 2, 3}) {
      const auto mod = pinned_modification(base, k);
      const double cap = std::ldexp(1.0, -static_cast<int>(k));
      const double close = exact_closeness(*base, *mod, params);
      if (close > cap + 1e-12) {
        detail = base->descriptor() + " k=" + std::to_string(k) + ": closeness " +
                 fmt(close) + " > " + fmt(cap);
        return false;
      }
      for (const double delta : {0.5, 1.0}) {
        const double tail = exact_hitting_tail(*mod, params, delta).value;
        const double floor_ = cap * std::exp(-delta * static_cast<double>(k));
        if (tail < floor_ - 1e-12) {
          detail = base->descriptor() + " k=" + std::to_string(k) + " delta=" +
                   fmt(delta) + ": tail " + fmt(tail) + " < " + fmt(floor_);
          return false;
        }
      }
    }
  }
  detail = "9 closeness caps + 18 tail floors hold exactly";
  return true;
}

// Discretized interval schemes put the prescribed +1 mass on every interval.
bool criterion_membership(std::string& detail) {
  const std::pair<std::int64_t, int> cases[] = {{4096, 3}, {std::int64_t{1} << 20, 4}};
  for (const auto& [n, k] : cases) {
    const auto f = circle_function(n, k);
    const auto reports = f->interval_reports();
    const std::size_t expected =
        2 * static_cast<std::size_t>(std::pow(3.0, k - 2));
    if (reports.size() != expected) {
      detail = "n=" + std::to_string(n) + " k=" + std::to_string(k) + ": " +
               std::to_string(reports.size()) + " intervals, expected " +
               std::to_string(expected);
      return false;
    }
    for (const auto& r : reports) {
      if (!r.within_band) {
        detail = "n=" + std::to_string(n) + " k=" + std::to_string(k) +
                 " interval " + std::to_string(r.index) + ": density gap " +
                 fmt(r.density_gap);
        return false;
      }
    }
  }
  detail = "24 interval bands hold";
  return true;
}

// Lifted density sandwich with the frozen normal-law constants.
bool criterion_comparison(std::string& detail) {
  if (std::fabs(comparison_lower_constant() - 0.04550026389635842) > 1e-9 ||
      std::fabs(comparison_upper_constant() - 2.5957691216057308) > 1e-9) {
    detail = "constants drifted: " + fmt(comparison_lower_constant()) + ", " +
             fmt(comparison_upper_constant());
    return false;
  }
  for (const std::int64_t cycle : {1024, 2048, 4096}) {
    const auto c = check_lift_density_sandwich(*circle_function(cycle, 3));
    if (!c.holds) {
      detail = "cycle " + std::to_string(cycle) + ": " + fmt(c.lower) + " <= " +
               fmt(c.lifted_prob) + " <= " + fmt(c.upper) + " fails";
      return false;
    }
  }
  detail = "sandwich holds on cycles 1024, 2048, 4096";
  return true;
}

// Lift coherence: level evaluation equals full-configuration evaluation, and
// the lifted volatility tail drops as the scheme depth grows.
bool criterion_lift(std::string& detail) {
  {
    const auto g = hypercube_lift(circle_position_parity(2));
    for (std::uint64_t mask = 0; mask < 16; ++mask) {
      const auto x = Configuration::from_mask(4, mask);
      if (g->eval(x) != g->eval_level(x.level())) {
        detail = "dimension 4 mismatch at mask " + std::to_string(mask);
        return false;
      }
    }
  }
  {
    const auto g = hypercube_lift(circle_function(8, 2));
    RngStream rng(912004);
    for (int trial = 0; trial < 100000; ++trial) {
      Configuration x(64);
      for (std::size_t i = 0; i < 64; ++i) x.set(i, rng.bernoulli(0.5) ? +1 : -1);
      if (g->eval(x) != g->eval_level(x.level())) {
        detail = "dimension 64 mismatch on trial " + std::to_string(trial);
        return false;
      }
    }
  }
  const std::uint64_t R = 20000;
  std::uint64_t seed = 8501;
  std::vector<EstimateResult> tails;
  for (const int k : {2, 3}) {
    const auto g = hypercube_lift(circle_function(64, k));
    tails.push_back(estimate_volatility_tail(*g, DynamicsParams(4096, 0.5), 1.0, R,
                                             seed++));
  }
  std::string why;
  if (!nonincreasing(tails[0], tails[1], why)) {
    detail = "lift tail grows from k=2 to k=3: " + why;
    return false;
  }
  detail = "level/full evaluation agree; tail drops with depth";
  return true;
}

// Byte-identical CSV across repeated runs and across worker counts.
bool criterion_reproducibility(std::string& detail) {
  std::istringstream config(
      "[experiment]\n"
      "id = repro.hyper\n"
      "chain = hypercube\n"
      "function = majority{n=9}\n"
      "estimator = instability\n"
      "grid = eps: 0.25, 0.5\n"
      "replicas = 3000\n"
      "seed = 99\n"
      "output = hyper.csv\n"
      "\n"
      "[experiment]\n"
      "id = repro.circle\n"
      "chain = circle\n"
      "function = circle{n=256,k=2}\n"
      "estimator = covariance\n"
      "grid = eps: 0.1\n"
      "replicas = 2000\n"
      "seed = 100\n"
      "output = circle.csv\n");
  const auto specs = parse_experiment_config(config);
  const fs::path root =
      fs::temp_directory_path() / ("bfdyn_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::vector<std::string> texts;
  for (const int workers : {1, 1, 4, 16}) {
    const fs::path dir = root / ("w" + std::to_string(workers) + "_" +
                                 std::to_string(texts.size()));
    run_experiments(specs, dir.string(), RunOptions{workers}, false);
    texts.push_back(slurp(dir / "hyper.csv") + "\x1f" + slurp(dir / "circle.csv"));
  }
  fs::remove_all(root);
  for (std::size_t i = 1; i < texts.size(); ++i) {
    if (texts[i] != texts[0]) {
      detail = "run " + std::to_string(i) + " differs from run 0";
      return false;
    }
  }
  detail = "4 runs byte-identical (workers 1, 1, 4, 16)";
  return true;
}

struct Criterion {
  int id;
  const char* label;
  bool (*run)(std::string&);
};

const Criterion kCriteria[] = {
    {1, "all-ones hitting bound on every (n, delta)", criterion_hitting_bound},
    {2, "closed-form volatility tails", criterion_closed_form_tails},
    {3, "spectrum covariance equivalence", criterion_fourier_equivalence},
    {4, "level-process moment identities", criterion_ou_moments},
    {5, "striped modification mass and closeness", criterion_striped},
    {6, "block function structure and dynamics", criterion_block},
    {7, "pinned modification bounds", criterion_pinned},
    {8, "circle interval membership", criterion_membership},
    {9, "lifted density sandwich", criterion_comparison},
    {10, "lift coherence and depth ordering", criterion_lift},
    {11, "byte-identical reproducibility", criterion_reproducibility},
};

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  if (selected < 0 || selected > 11) {
    std::fprintf(stderr, "criterion must be in 1..11 (0 = all)\n");
    return 2;
  }
  bool all_pass = true;
  for (const auto& c : kCriteria) {
    if (selected != 0 && c.id != selected) continue;
    std::string detail;
    bool pass = false;
    try {
      pass = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", c.id,
                c.label, detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && pass;
  }
  return all_pass ? 0 : 1;
}
