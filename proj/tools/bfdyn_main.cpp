// Command line driver: run experiment configs, exact verification suites,
// single sweeps, and the function catalog.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bfdyn/experiment.hpp"
#include "bfdyn/version.hpp"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

void print_cost_warnings(const std::vector<bfdyn::SweepSpec>& specs) {
  for (const auto& spec : specs) {
    const double cost = bfdyn::projected_events(spec);
    if (cost > 1.0e9)
      std::fprintf(stderr,
                   "warning: experiment '%s' projects ~%.3g events (> 1e9); "
                   "this may take a while (use --strict to refuse)\n",
                   spec.experiment_id.c_str(), cost);
  }
}

int execute_specs(const std::vector<bfdyn::SweepSpec>& specs, const std::string& out_dir,
                  const bfdyn::RunOptions& opt, bool strict) {
  print_cost_warnings(specs);
  const auto report = bfdyn::run_experiments(specs, out_dir, opt, strict);
  for (const auto& path : report.csv_paths)
    std::printf("wrote %s (+ .meta.json)\n", path.c_str());
  return kExitOk;
}

int run_verify(const std::string& suite, const bfdyn::RunOptions& opt,
               const std::string& json_path) {
  const auto checks = bfdyn::run_verify_suite(suite, opt);
  std::size_t passed = 0;
  for (const auto& c : checks) {
    if (c.pass) ++passed;
    std::printf("[%s] %s %s  %s\n", c.pass ? "PASS" : "FAIL", c.suite.c_str(),
                c.name.c_str(), c.detail.c_str());
  }
  std::printf("%s: %zu/%zu checks passed\n", suite.c_str(), passed, checks.size());
  if (!json_path.empty()) {
    nlohmann::json j;
    j["suite"] = suite;
    j["passed"] = passed;
    j["total"] = checks.size();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
      j["checks"].push_back(
          {{"suite", c.suite}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    std::ofstream out(json_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + json_path);
    out << j.dump(2) << "\n";
  }
  return passed == checks.size() ? kExitOk : kExitRuntime;
}

void parse_grid_arg(const std::string& text, bfdyn::SweepSpec& spec) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("--grid must look like 'axis: v1, v2, ...'");
  spec.axis = bfdyn::axis_from_string([&] {
    std::string s = text.substr(0, colon);
    s.erase(0, s.find_first_not_of(" \t"));
    s.erase(s.find_last_not_of(" \t") + 1);
    return s;
  }());
  spec.values.clear();
  std::string rest = text.substr(colon + 1);
  std::size_t start = 0;
  while (start <= rest.size()) {
    const auto comma = rest.find(',', start);
    std::string item = rest.substr(start, comma == std::string::npos ? comma : comma - start);
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) throw std::invalid_argument("--grid has an empty value");
    std::size_t used = 0;
    spec.values.push_back(std::stod(item, &used));
    if (used != item.size())
      throw std::invalid_argument("--grid value is not a number: '" + item + "'");
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo dynamics of Boolean and circle-valued functions"};
  app.set_version_flag("--version", std::string(bfdyn::kVersion));
  app.require_subcommand(1);

  int workers = 0;
  app.add_option("--workers", workers,
                 "worker threads (default: BFDYN_WORKERS or hardware concurrency)")
      ->check(CLI::PositiveNumber);

  // run <config>
  auto* run_cmd = app.add_subcommand("run", "run every experiment in a config file");
  std::string config_path;
  std::string out_dir;
  bool strict = false;
  run_cmd->add_option("config", config_path, "experiment config file")->required();
  run_cmd->add_option("--out-dir", out_dir, "directory for CSV/JSON output");
  run_cmd->add_flag("--strict", strict, "refuse experiments projecting > 1e9 events");

  // verify <suite>
  auto* verify_cmd = app.add_subcommand("verify", "run an exact verification suite");
  std::string suite;
  std::string json_path;
  verify_cmd->add_option("suite", suite, "anders|ou|comparison|striped|pinned|membership|fourier|all")
      ->required();
  verify_cmd->add_option("--json", json_path, "also write results as JSON");

  // list-functions
  auto* list_cmd = app.add_subcommand("list-functions", "print the descriptor grammar and catalog");

  // sweep (single experiment from flags)
  auto* sweep_cmd = app.add_subcommand("sweep", "run one parameter sweep from flags");
  bfdyn::SweepSpec spec;
  spec.experiment_id = "sweep";
  std::string chain_name = "hypercube";
  std::string estimator_name;
  std::string grid_text;
  bool sweep_strict = false;
  sweep_cmd->add_option("--id", spec.experiment_id, "experiment id (default: sweep)");
  sweep_cmd->add_option("--chain", chain_name, "hypercube|circle");
  sweep_cmd->add_option("--fn", spec.function, "function descriptor")->required();
  sweep_cmd->add_option("--fn2", spec.function2, "second descriptor (closeness only)");
  sweep_cmd->add_option("--estimator", estimator_name,
                        "degeneracy|covariance|instability|volatility_tail|closeness")
      ->required();
  sweep_cmd->add_option("--grid", grid_text, "sweep grid, e.g. 'delta: 0.25, 1, 4'")->required();
  sweep_cmd->add_option("--replicas", spec.replicas, "replicas per grid point")->required();
  sweep_cmd->add_option("--seed", spec.seed, "master seed")->required();
  sweep_cmd->add_option("--out", spec.output, "output CSV path")->required();
  sweep_cmd->add_option("--p", spec.p, "resample bias (hypercube)");
  sweep_cmd->add_option("--eps", spec.fixed_eps, "eps for n-sweeps of two-time estimators");
  sweep_cmd->add_option("--delta", spec.fixed_delta, "delta for n-sweeps of volatility_tail");
  sweep_cmd->add_flag("--strict", sweep_strict, "refuse sweeps projecting > 1e9 events");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  bfdyn::RunOptions opt;
  opt.workers = workers;

  try {
    if (run_cmd->parsed()) {
      const auto specs = bfdyn::parse_experiment_config_file(config_path);
      return execute_specs(specs, out_dir, opt, strict);
    }
    if (verify_cmd->parsed()) {
      return run_verify(suite, opt, json_path);
    }
    if (list_cmd->parsed()) {
      std::fputs(bfdyn::function_catalog_text().c_str(), stdout);
      return kExitOk;
    }
    if (sweep_cmd->parsed()) {
      spec.chain = bfdyn::chain_from_string(chain_name);
      spec.estimator = bfdyn::estimator_from_string(estimator_name);
      parse_grid_arg(grid_text, spec);
      spec.validate();
      return execute_specs({spec}, "", opt, sweep_strict);
    }
  } catch (const bfdyn::ConfigParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const bfdyn::DescriptorError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
