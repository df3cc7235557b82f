#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bfdyn/estimators.hpp"

namespace bfdyn {

// Experiment configs, sweep execution, CSV/JSON output and verify suites.

enum class ChainKind { hypercube, circle };
enum class EstimatorKind { degeneracy, covariance, instability, volatility_tail, closeness };
enum class SweepAxis { n, eps, delta };

std::string to_string(ChainKind c);
std::string to_string(EstimatorKind e);
std::string to_string(SweepAxis a);
ChainKind chain_from_string(const std::string& s);
EstimatorKind estimator_from_string(const std::string& s);
SweepAxis axis_from_string(const std::string& s);

struct SweepSpec {
  std::string experiment_id;
  ChainKind chain = ChainKind::hypercube;
  std::string function;        // descriptor text
  std::string function2;       // closeness only; empty otherwise
  EstimatorKind estimator = EstimatorKind::degeneracy;
  SweepAxis axis = SweepAxis::n;
  std::vector<double> values;  // grid points; integers when axis == n
  double p = 0.5;
  // Secondary parameter for n-sweeps: eps for covariance/instability rows,
  // delta for volatility_tail rows. Ignored when that parameter is the axis.
  double fixed_eps = 1.0;
  double fixed_delta = 1.0;
  std::uint64_t replicas = 0;
  std::uint64_t seed = 0;
  std::string output;          // CSV path (run subcommand)

  void validate() const;  // axis/estimator compatibility, grid shape, descriptors
};

struct SweepRow {
  std::string experiment_id;
  std::string chain;
  std::string function;  // descriptor actually run (n substituted on n-sweeps)
  std::uint64_t n = 0;
  double p = 0.5;
  std::string param_name;
  double param_value = 0.0;
  double estimate = 0.0;
  double std_err = 0.0;
  std::uint64_t replicas = 0;
  std::uint64_t seed = 0;
  std::optional<double> censored_fraction;
};

// Row i uses seed derive_seed(spec.seed, i); rows appear in grid order.
// Rows completed before a failure remain in `rows`.
void run_sweep(const SweepSpec& spec, const RunOptions& opt, std::vector<SweepRow>& rows);

// Projected event count for cost warnings: n*delta*replicas per hypercube
// hitting row, n^2*delta*replicas per circle hitting row, n*replicas (resp.
// n^2 eps replicas) for two-time rows.
double projected_events(const SweepSpec& spec);

// ---- config files ----

// Plain-text section format:
//   [experiment]
//   id = demo
//   chain = hypercube
//   function = dictator{n=100}
//   estimator = volatility_tail
//   grid = delta: 0.25, 1, 4
//   replicas = 100000
//   seed = 42
//   output = demo.csv
// '#' and ';' start comments. Keys p and function2 are optional.
class ConfigParseError : public std::runtime_error {
 public:
  ConfigParseError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

std::vector<SweepSpec> parse_experiment_config(std::istream& in);
std::vector<SweepSpec> parse_experiment_config_file(const std::string& path);

// ---- output ----

extern const char* const kCsvHeader;

std::string format_csv(const std::vector<SweepRow>& rows);
void write_csv_file(const std::string& path, const std::vector<SweepRow>& rows);

struct RunMetadata {
  SweepSpec spec;
  std::size_t rows_written = 0;
  double wall_time_seconds = 0.0;
  int workers = 0;
  bool aborted = false;
  std::string error;
};

std::string format_metadata_json(const RunMetadata& meta);

struct RunReport {
  std::vector<std::string> csv_paths;
  std::vector<std::string> warnings;
};

// Executes every experiment in the config; writes <output> and
// <output>.meta.json under out_dir. Throws on the first failing experiment
// after flushing its partial rows (aborted flag set in the sidecar).
RunReport run_experiments(const std::vector<SweepSpec>& specs, const std::string& out_dir,
                          const RunOptions& opt, bool strict);

// ---- verify suites ----

struct CheckResult {
  std::string suite;
  std::string name;
  bool pass = false;
  std::string detail;
};

// Suites: anders, ou, comparison, striped, pinned, membership, fourier, all.
std::vector<CheckResult> run_verify_suite(const std::string& suite, const RunOptions& opt);
std::vector<std::string> verify_suite_names();

}  // namespace bfdyn
