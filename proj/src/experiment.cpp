#include "bfdyn/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "bfdyn/oracle.hpp"
#include "bfdyn/version.hpp"
#include "json.hpp"

namespace bfdyn {

namespace {

std::string fmt_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string fmt_short(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

std::string strip_ws(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double_strict(const std::string& text) {
  double out = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw std::invalid_argument("expected a number, got '" + text + "'");
  return out;
}

std::uint64_t parse_u64_strict(const std::string& text) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw std::invalid_argument("expected a nonnegative integer, got '" + text + "'");
  return out;
}

}  // namespace

// ---- enum names ----

std::string to_string(ChainKind c) {
  return c == ChainKind::hypercube ? "hypercube" : "circle";
}

std::string to_string(EstimatorKind e) {
  switch (e) {
    case EstimatorKind::degeneracy: return "degeneracy";
    case EstimatorKind::covariance: return "covariance";
    case EstimatorKind::instability: return "instability";
    case EstimatorKind::volatility_tail: return "volatility_tail";
    case EstimatorKind::closeness: return "closeness";
  }
  return "?";
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::n: return "n";
    case SweepAxis::eps: return "eps";
    case SweepAxis::delta: return "delta";
  }
  return "?";
}

ChainKind chain_from_string(const std::string& s) {
  if (s == "hypercube") return ChainKind::hypercube;
  if (s == "circle") return ChainKind::circle;
  throw std::invalid_argument("unknown chain '" + s + "' (hypercube | circle)");
}

EstimatorKind estimator_from_string(const std::string& s) {
  if (s == "degeneracy") return EstimatorKind::degeneracy;
  if (s == "covariance") return EstimatorKind::covariance;
  if (s == "instability") return EstimatorKind::instability;
  if (s == "volatility_tail") return EstimatorKind::volatility_tail;
  if (s == "closeness") return EstimatorKind::closeness;
  throw std::invalid_argument(
      "unknown estimator '" + s +
      "' (degeneracy | covariance | instability | volatility_tail | closeness)");
}

SweepAxis axis_from_string(const std::string& s) {
  if (s == "n") return SweepAxis::n;
  if (s == "eps") return SweepAxis::eps;
  if (s == "delta") return SweepAxis::delta;
  throw std::invalid_argument("unknown sweep axis '" + s + "' (n | eps | delta)");
}

// ---- spec validation ----

void SweepSpec::validate() const {
  if (experiment_id.empty())
    throw std::invalid_argument("experiment id must be nonempty");
  for (const char c : experiment_id)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
      throw std::invalid_argument("experiment id may contain only letters, digits, '._-'");
  if (function.empty()) throw std::invalid_argument("function descriptor must be nonempty");
  if (values.empty()) throw std::invalid_argument("grid must be nonempty");
  if (replicas == 0) throw std::invalid_argument("replicas must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in [0,1]");
  if (!(fixed_eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  if (!(fixed_delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
  if (output.empty()) throw std::invalid_argument("output path must be nonempty");

  switch (estimator) {
    case EstimatorKind::degeneracy:
    case EstimatorKind::closeness:
      if (axis != SweepAxis::n)
        throw std::invalid_argument("estimator " + to_string(estimator) +
                                    " sweeps only the n axis");
      break;
    case EstimatorKind::covariance:
    case EstimatorKind::instability:
      if (axis == SweepAxis::delta)
        throw std::invalid_argument("estimator " + to_string(estimator) +
                                    " sweeps n or eps, not delta");
      break;
    case EstimatorKind::volatility_tail:
      if (axis == SweepAxis::eps)
        throw std::invalid_argument("volatility_tail sweeps n or delta, not eps");
      break;
  }
  if (estimator == EstimatorKind::closeness) {
    if (function2.empty())
      throw std::invalid_argument("closeness needs a second function (function2)");
  } else if (!function2.empty()) {
    throw std::invalid_argument("function2 is only valid for the closeness estimator");
  }

  for (const double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("grid values must be finite");
    if (axis == SweepAxis::n) {
      if (!(v >= 1.0 && v <= 1.0e15 && v == std::floor(v)))
        throw std::invalid_argument("grid n values must be positive integers");
    } else if (!(v >= 0.0)) {
      throw std::invalid_argument("grid values must be >= 0");
    }
  }

  // Descriptor sanity at the first grid point; later points are checked as
  // the sweep reaches them.
  if (chain == ChainKind::hypercube) {
    const std::size_t n0 =
        axis == SweepAxis::n ? static_cast<std::size_t>(values.front()) : 0;
    boolean_function_from_descriptor(function, n0);
    if (!function2.empty()) boolean_function_from_descriptor(function2, n0);
  } else {
    const std::int64_t n0 =
        axis == SweepAxis::n ? static_cast<std::int64_t>(values.front()) : 0;
    circle_function_from_descriptor(function, n0);
    if (!function2.empty()) circle_function_from_descriptor(function2, n0);
  }
}

// ---- sweep execution ----

void run_sweep(const SweepSpec& spec, const RunOptions& opt, std::vector<SweepRow>& rows) {
  spec.validate();
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    const double v = spec.values[i];
    const std::uint64_t row_seed = derive_seed(spec.seed, i);
    const double eps = spec.axis == SweepAxis::eps ? v : spec.fixed_eps;
    const double delta = spec.axis == SweepAxis::delta ? v : spec.fixed_delta;

    SweepRow row;
    row.experiment_id = spec.experiment_id;
    row.chain = to_string(spec.chain);
    row.p = spec.p;
    row.param_name = to_string(spec.axis);
    row.param_value = v;
    row.replicas = spec.replicas;
    row.seed = row_seed;

    EstimateResult est;
    if (spec.chain == ChainKind::hypercube) {
      const std::size_t override_n =
          spec.axis == SweepAxis::n ? static_cast<std::size_t>(v) : 0;
      const auto f = boolean_function_from_descriptor(spec.function, override_n);
      row.function = f->descriptor();
      row.n = f->dimension();
      const DynamicsParams params(f->dimension(), spec.p);
      switch (spec.estimator) {
        case EstimatorKind::degeneracy:
          est = estimate_degeneracy(*f, params, spec.replicas, row_seed, opt);
          break;
        case EstimatorKind::covariance:
          est = estimate_covariance(*f, params, eps, spec.replicas, row_seed, opt);
          break;
        case EstimatorKind::instability:
          est = estimate_instability(*f, params, eps, spec.replicas, row_seed, opt);
          break;
        case EstimatorKind::volatility_tail:
          est = estimate_volatility_tail(*f, params, delta, spec.replicas, row_seed, opt);
          break;
        case EstimatorKind::closeness: {
          const auto g = boolean_function_from_descriptor(spec.function2, override_n);
          est = estimate_closeness(*f, *g, params, spec.replicas, row_seed, opt);
          break;
        }
      }
    } else {
      const std::int64_t override_n =
          spec.axis == SweepAxis::n ? static_cast<std::int64_t>(v) : 0;
      const auto f = circle_function_from_descriptor(spec.function, override_n);
      row.function = f->descriptor();
      row.n = static_cast<std::uint64_t>(f->cycle());
      switch (spec.estimator) {
        case EstimatorKind::degeneracy:
          est = estimate_degeneracy_circle(*f, spec.replicas, row_seed, opt);
          break;
        case EstimatorKind::covariance:
          est = estimate_covariance_circle(*f, eps, spec.replicas, row_seed, opt);
          break;
        case EstimatorKind::instability:
          est = estimate_instability_circle(*f, eps, spec.replicas, row_seed, opt);
          break;
        case EstimatorKind::volatility_tail:
          est = estimate_volatility_tail_circle(*f, delta, spec.replicas, row_seed, opt);
          break;
        case EstimatorKind::closeness: {
          const auto g = circle_function_from_descriptor(spec.function2, override_n);
          est = estimate_closeness_circle(*f, *g, spec.replicas, row_seed, opt);
          break;
        }
      }
    }
    row.estimate = est.estimate;
    row.std_err = est.std_err;
    row.censored_fraction = est.censored_fraction;
    rows.push_back(std::move(row));
  }
}

double projected_events(const SweepSpec& spec) {
  double total = 0.0;
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    const double v = spec.values[i];
    const double eps = spec.axis == SweepAxis::eps ? v : spec.fixed_eps;
    const double delta = spec.axis == SweepAxis::delta ? v : spec.fixed_delta;
    try {
      double per_replica = 1.0;
      if (spec.chain == ChainKind::hypercube) {
        const std::size_t over =
            spec.axis == SweepAxis::n ? static_cast<std::size_t>(v) : 0;
        const auto f = boolean_function_from_descriptor(spec.function, over);
        const auto dim = static_cast<double>(f->dimension());
        // Level-symmetric functions run on the level chain: O(1) per replica
        // for static and two-time estimators, full event count for hitting.
        if (spec.estimator == EstimatorKind::volatility_tail) {
          per_replica = dim * delta;
        } else if (spec.estimator == EstimatorKind::closeness) {
          const auto g = boolean_function_from_descriptor(spec.function2, over);
          per_replica = f->level_symmetric() && g->level_symmetric() ? 1.0 : dim;
        } else {
          per_replica = f->level_symmetric() ? 1.0 : dim;
        }
      } else {
        const auto f = circle_function_from_descriptor(
            spec.function, spec.axis == SweepAxis::n ? static_cast<std::int64_t>(v) : 0);
        const auto cyc = static_cast<double>(f->cycle());
        switch (spec.estimator) {
          case EstimatorKind::volatility_tail:
            per_replica = cyc * cyc * delta;
            break;
          case EstimatorKind::covariance:
          case EstimatorKind::instability:
            per_replica = cyc * cyc * eps;
            break;
          default:
            per_replica = 1.0;
        }
      }
      total += per_replica * static_cast<double>(spec.replicas);
    } catch (const std::exception&) {
      // Unbuildable grid point: no cost estimate; the sweep itself reports it.
    }
  }
  return total;
}

// ---- config files ----

ConfigParseError::ConfigParseError(int line, const std::string& message)
    : std::runtime_error("config line " + std::to_string(line) + ": " + message),
      line_(line) {}

namespace {

void parse_grid(const std::string& text, SweepSpec& spec) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("grid must look like 'axis: v1, v2, ...'");
  spec.axis = axis_from_string(strip_ws(text.substr(0, colon)));
  spec.values.clear();
  std::string rest = text.substr(colon + 1);
  std::size_t start = 0;
  while (start <= rest.size()) {
    const auto comma = rest.find(',', start);
    const std::string item =
        strip_ws(rest.substr(start, comma == std::string::npos ? comma : comma - start));
    if (item.empty()) throw std::invalid_argument("grid has an empty value");
    spec.values.push_back(parse_double_strict(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (spec.values.empty()) throw std::invalid_argument("grid needs at least one value");
}

}  // namespace

std::vector<SweepSpec> parse_experiment_config(std::istream& in) {
  std::vector<SweepSpec> specs;

  struct Pending {
    SweepSpec spec;
    std::set<std::string> keys;
    int start_line = 0;
  };
  std::optional<Pending> cur;

  const auto finalize = [&]() {
    if (!cur) return;
    static const char* const required[] = {"id",   "chain",    "function", "estimator",
                                           "grid", "replicas", "seed",     "output"};
    for (const char* key : required)
      if (!cur->keys.count(key))
        throw ConfigParseError(cur->start_line,
                               std::string("experiment is missing key '") + key + "'");
    try {
      cur->spec.validate();
    } catch (const std::exception& e) {
      throw ConfigParseError(cur->start_line, e.what());
    }
    specs.push_back(cur->spec);
    cur.reset();
  };

  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto comment = raw.find_first_of("#;");
    const std::string line = strip_ws(comment == std::string::npos ? raw : raw.substr(0, comment));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigParseError(lineno, "unterminated section header");
      const std::string name = strip_ws(line.substr(1, line.size() - 2));
      if (name != "experiment")
        throw ConfigParseError(lineno, "unknown section '" + name + "' (only [experiment])");
      finalize();
      cur.emplace();
      cur->start_line = lineno;
      continue;
    }
    if (!cur)
      throw ConfigParseError(lineno, "key outside an [experiment] section");

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigParseError(lineno, "expected 'key = value' (no '=' found, column " +
                                         std::to_string(line.size()) + ")");
    const std::string key = strip_ws(line.substr(0, eq));
    const std::string value = strip_ws(line.substr(eq + 1));
    if (key.empty()) throw ConfigParseError(lineno, "empty key before '='");
    if (value.empty())
      throw ConfigParseError(lineno, "empty value for key '" + key + "'");
    if (!cur->keys.insert(key).second)
      throw ConfigParseError(lineno, "duplicate key '" + key + "'");

    try {
      SweepSpec& spec = cur->spec;
      if (key == "id")
        spec.experiment_id = value;
      else if (key == "chain")
        spec.chain = chain_from_string(value);
      else if (key == "function")
        spec.function = value;
      else if (key == "function2")
        spec.function2 = value;
      else if (key == "estimator")
        spec.estimator = estimator_from_string(value);
      else if (key == "grid")
        parse_grid(value, spec);
      else if (key == "p")
        spec.p = parse_double_strict(value);
      else if (key == "eps")
        spec.fixed_eps = parse_double_strict(value);
      else if (key == "delta")
        spec.fixed_delta = parse_double_strict(value);
      else if (key == "replicas")
        spec.replicas = parse_u64_strict(value);
      else if (key == "seed")
        spec.seed = parse_u64_strict(value);
      else if (key == "output")
        spec.output = value;
      else
        throw std::invalid_argument("unknown key '" + key + "'");
    } catch (const ConfigParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigParseError(lineno, e.what());
    }
  }
  finalize();
  if (specs.empty()) throw ConfigParseError(lineno, "config defines no experiments");
  return specs;
}

std::vector<SweepSpec> parse_experiment_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError(0, "cannot open config file '" + path + "'");
  return parse_experiment_config(in);
}

// ---- output ----

const char* const kCsvHeader =
    "experiment_id,chain,function,n,p,param_name,param_value,estimate,std_err,"
    "replicas,seed,censored_fraction";

namespace {

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

std::string format_csv(const std::vector<SweepRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& row : rows) {
    out += row.experiment_id;
    out += ',';
    out += row.chain;
    out += ',';
    out += csv_quote(row.function);  // descriptors contain commas
    out += ',';
    out += std::to_string(row.n);
    out += ',';
    out += fmt_real(row.p);
    out += ',';
    out += row.param_name;
    out += ',';
    out += fmt_real(row.param_value);
    out += ',';
    out += fmt_real(row.estimate);
    out += ',';
    out += fmt_real(row.std_err);
    out += ',';
    out += std::to_string(row.replicas);
    out += ',';
    out += std::to_string(row.seed);
    out += ',';
    if (row.censored_fraction) out += fmt_real(*row.censored_fraction);
    out += '\n';
  }
  return out;
}

namespace {

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void write_csv_file(const std::string& path, const std::vector<SweepRow>& rows) {
  write_text_file(path, format_csv(rows));
}

std::string format_metadata_json(const RunMetadata& meta) {
  nlohmann::json j;
  j["id"] = meta.spec.experiment_id;
  j["chain"] = to_string(meta.spec.chain);
  j["function"] = meta.spec.function;
  j["function2"] = meta.spec.function2;
  j["estimator"] = to_string(meta.spec.estimator);
  j["axis"] = to_string(meta.spec.axis);
  j["grid"] = meta.spec.values;
  j["p"] = meta.spec.p;
  j["eps"] = meta.spec.fixed_eps;
  j["delta"] = meta.spec.fixed_delta;
  j["replicas"] = meta.spec.replicas;
  j["seed"] = meta.spec.seed;
  j["output"] = meta.spec.output;
  j["tool_version"] = kVersion;
  j["rows_written"] = meta.rows_written;
  j["wall_time_seconds"] = meta.wall_time_seconds;
  j["workers"] = meta.workers;
  j["aborted"] = meta.aborted;
  j["error"] = meta.error;
  return j.dump(2) + "\n";
}

RunReport run_experiments(const std::vector<SweepSpec>& specs, const std::string& out_dir,
                          const RunOptions& opt, bool strict) {
  namespace fs = std::filesystem;
  RunReport report;
  for (const auto& spec : specs) {
    const double cost = projected_events(spec);
    if (cost > 1.0e9) {
      const std::string warning = "experiment '" + spec.experiment_id +
                                  "': projected event count ~" + fmt_short(cost) +
                                  " exceeds 1e9";
      if (strict) throw std::runtime_error(warning + "; refusing to run under --strict");
      report.warnings.push_back(warning);
    }

    fs::path path(spec.output);
    if (!out_dir.empty()) path = fs::path(out_dir) / path;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());

    RunMetadata meta;
    meta.spec = spec;
    meta.workers = resolve_workers(opt.workers);
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<SweepRow> rows;
    try {
      run_sweep(spec, opt, rows);
    } catch (const std::exception& e) {
      meta.aborted = true;
      meta.error = e.what();
    }
    meta.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    meta.rows_written = rows.size();
    write_csv_file(path.string(), rows);
    write_text_file(path.string() + ".meta.json", format_metadata_json(meta));
    report.csv_paths.push_back(path.string());
    if (meta.aborted)
      throw std::runtime_error("experiment '" + spec.experiment_id +
                               "' failed: " + meta.error);
  }
  return report;
}

// ---- verify suites ----

namespace {

void add_check(std::vector<CheckResult>& out, const std::string& suite,
               const std::string& name, bool pass, const std::string& detail) {
  out.push_back({suite, name, pass, detail});
}

void suite_anders(std::vector<CheckResult>& out) {
  for (std::size_t n = 1; n <= 12; ++n) {
    for (const double delta : {0.1, 0.5, 1.0, 4.0}) {
      const auto c = check_all_ones_hitting_bound(n, delta);
      const bool pass = c.holds && c.identity_gap <= 1.0e-9;
      add_check(out, "anders", "n=" + std::to_string(n) + ",delta=" + fmt_short(delta),
                pass,
                "lhs=" + fmt_short(c.lhs) + " rhs=" + fmt_short(c.rhs) +
                    " identity_gap=" + fmt_short(c.identity_gap));
    }
  }
}

void suite_ou(std::vector<CheckResult>& out) {
  for (const std::size_t n : {std::size_t{10}, std::size_t{1000}, std::size_t{1000000}}) {
    for (const double p : {0.5, 0.25}) {
      for (const double frac : {0.0, 0.33, 1.0}) {
        for (const double s : {0.5, 2.0}) {
          const auto level0 =
              static_cast<std::size_t>(std::llround(frac * static_cast<double>(n)));
          const auto c = ou_moment_check(DynamicsParams(n, p), level0, s);
          add_check(out, "ou",
                    "mean n=" + std::to_string(n) + ",p=" + fmt_short(p) +
                        ",l0=" + std::to_string(level0) + ",s=" + fmt_short(s),
                    c.mean_err <= 1.0e-12, "mean_err=" + fmt_short(c.mean_err));
        }
      }
    }
  }
  // At p = 1/2 the conditional variance matches the limit exactly at every n.
  for (const double s : {0.5, 1.0, 2.0}) {
    const DynamicsParams params(1000000, 0.5);
    const auto c = ou_moment_check(params, 501000, s);
    add_check(out, "ou", "var n=1000000,p=0.5,s=" + fmt_short(s), c.var_err <= 1.0e-12,
              "var_err=" + fmt_short(c.var_err));
  }
  // Off-symmetric p: the gap is the finite-n correction, O(n^-1/2).
  for (const double s : {0.5, 2.0}) {
    const DynamicsParams params(1000000, 0.25);
    const auto c = ou_moment_check(params, 251000, s);
    add_check(out, "ou", "var n=1000000,p=0.25,s=" + fmt_short(s), c.var_err <= 1.0e-3,
              "var_err=" + fmt_short(c.var_err));
  }
}

void suite_comparison(std::vector<CheckResult>& out) {
  add_check(out, "comparison", "lower constant",
            std::fabs(comparison_lower_constant() - 0.04550026389635842) <= 1.0e-12,
            "2(1-Phi(2))=" + fmt_real(comparison_lower_constant()));
  add_check(out, "comparison", "upper constant",
            std::fabs(comparison_upper_constant() - 2.5957691216057308) <= 1.0e-12,
            "1+4phi(0)=" + fmt_real(comparison_upper_constant()));
  for (const std::int64_t half : {512, 1024, 2048}) {
    const auto fc = circle_function(2 * half, 3);
    const auto c = check_lift_density_sandwich(*fc);
    add_check(out, "comparison", "cycle=" + std::to_string(c.cycle), c.holds,
              "rho=" + fmt_short(c.rho) + " lifted=" + fmt_short(c.lifted_prob) +
                  " lower=" + fmt_short(c.lower) + " upper=" + fmt_short(c.upper));
  }
}

void suite_striped(std::vector<CheckResult>& out, const RunOptions& opt) {
  const std::pair<std::size_t, std::uint32_t> cases[] = {
      {1000, 4}, {10000, 8}, {100000, 14}};
  for (const auto& [n, alpha_expected] : cases) {
    const auto base = parity(n);
    const auto f = striped_modification(base, 0.5);
    const std::string tag = "n=" + std::to_string(n);

    add_check(out, "striped", tag + " alpha", f->alpha() == alpha_expected,
              "alpha=" + std::to_string(f->alpha()) +
                  " expected=" + std::to_string(alpha_expected));

    const auto masses = binomial_residue_masses(n, 0.5, f->alpha());
    double total = 0.0;
    double min_mass = masses[0];
    for (const double m : masses) {
      total += m;
      min_mass = std::min(min_mass, m);
    }
    add_check(out, "striped", tag + " residue masses sum to 1",
              std::fabs(total - 1.0) <= 1.0e-12, "sum=" + fmt_real(total));
    add_check(out, "striped", tag + " pigeonhole mass bound",
              f->selected_mass() <= 1.0 / static_cast<double>(f->alpha()) + 1.0e-15,
              "mass=" + fmt_short(f->selected_mass()) +
                  " bound=" + fmt_short(1.0 / static_cast<double>(f->alpha())));
    add_check(out, "striped", tag + " minimum class selected",
              f->selected_mass() <= min_mass + 1.0e-15,
              "selected=" + fmt_short(f->selected_mass()) + " min=" + fmt_short(min_mass));

    const DynamicsParams params(n, 0.5);
    const double exact = exact_closeness(*base, *f, params);
    add_check(out, "striped", tag + " closeness within stripe mass",
              exact <= f->selected_mass() + 1.0e-15,
              "closeness=" + fmt_short(exact) + " mass=" + fmt_short(f->selected_mass()));

    if (n == 1000) {
      const std::uint64_t replicas = 200000;
      const auto est = estimate_closeness(*base, *f, params, replicas, 20240817, opt);
      const double se =
          std::sqrt(std::max(exact * (1.0 - exact), 1.0 / static_cast<double>(replicas)) /
                    static_cast<double>(replicas));
      add_check(out, "striped", tag + " monte carlo agrees with oracle",
                std::fabs(est.estimate - exact) <= 4.0 * se,
                "mc=" + fmt_short(est.estimate) + " exact=" + fmt_short(exact) +
                    " band=" + fmt_short(4.0 * se));
    }
  }
}

void suite_pinned(std::vector<CheckResult>& out) {
  const DynamicsParams params(10, 0.5);
  const std::pair<const char*, BooleanFunctionPtr> bases[] = {
      {"parity", parity(10)}, {"dictator", dictator(10)}, {"block", block_function(10)}};
  for (const auto& [base_name, base] : bases) {
    for (const std::size_t k : {1, 2, 3}) {
      const auto f = pinned_modification(base, k);
      const double bound = std::ldexp(1.0, -static_cast<int>(k));  // 2^-k
      const std::string tag = std::string(base_name) + ",k=" + std::to_string(k);

      const double close = exact_closeness(*base, *f, params);
      add_check(out, "pinned", tag + " closeness <= 2^-k", close <= bound + 1.0e-15,
                "closeness=" + fmt_short(close) + " bound=" + fmt_short(bound));

      for (const double delta : {0.5, 1.0}) {
        const auto tail = exact_hitting_tail(*f, params, delta);
        const double lower = bound * std::exp(-delta * static_cast<double>(k));
        add_check(out, "pinned",
                  tag + ",delta=" + fmt_short(delta) + " tail >= 2^-k e^-dk",
                  tail.value >= lower - 1.0e-12,
                  "tail=" + fmt_short(tail.value) + " lower=" + fmt_short(lower));
      }
    }
  }
}

void suite_membership(std::vector<CheckResult>& out) {
  const std::pair<std::int64_t, int> cases[] = {{4096, 3}, {std::int64_t{1} << 20, 4}};
  for (const auto& [n, k] : cases) {
    const auto fc = circle_function(n, k);
    const auto reports = fc->interval_reports();
    bool all = true;
    double worst = 0.0;
    for (const auto& r : reports) {
      all = all && r.within_band;
      worst = std::max(worst, r.density_gap);
    }
    const std::size_t expected =
        k == 1 ? 1 : 2 * static_cast<std::size_t>(std::pow(3.0, k - 2));
    add_check(out, "membership",
              "n=" + std::to_string(n) + ",k=" + std::to_string(k) + " interval count",
              reports.size() == expected,
              "count=" + std::to_string(reports.size()) +
                  " expected=" + std::to_string(expected));
    add_check(out, "membership",
              "n=" + std::to_string(n) + ",k=" + std::to_string(k) + " density bands",
              all, "worst_gap=" + fmt_short(worst) + " half_band=" +
                       fmt_short(std::ldexp(1.0, -(k + 1))));
  }
}

void suite_fourier(std::vector<CheckResult>& out, const RunOptions& opt) {
  const std::pair<const char*, BooleanFunctionPtr> fns[] = {
      {"dictator(8)", dictator(8)},
      {"parity(8)", parity(8)},
      {"majority(7)", majority(7)},
      {"block(8)", block_function(8)}};
  for (const auto& [name, f] : fns) {
    const auto spec = walsh_spectrum(*f);
    add_check(out, "fourier", std::string("parseval ") + name,
              parseval_gap(spec) <= 1.0e-12, "gap=" + fmt_short(parseval_gap(spec)));
  }

  // Spectrum route vs direct double enumeration on random functions.
  RngStream rng(0xF0F0F0F0ULL);
  double worst = 0.0;
  bool equiv = true;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + static_cast<std::size_t>(trial % 5);  // 4..8
    std::vector<std::int8_t> truth(std::size_t{1} << n);
    for (auto& v : truth) v = rng.bernoulli(0.5) ? +1 : -1;
    const auto f = table_function(n, std::move(truth));
    const double eps = trial % 2 == 0 ? 0.3 : 1.0;
    const double via_spectrum = exact_covariance(walsh_spectrum(*f), eps);
    const double via_enumeration = exact_covariance_bruteforce(*f, eps);
    const double gap = std::fabs(via_spectrum - via_enumeration);
    worst = std::max(worst, gap);
    equiv = equiv && gap <= 1.0e-10;
  }
  add_check(out, "fourier", "oracle equivalence (20 random fns, n<=8)", equiv,
            "worst_gap=" + fmt_short(worst));

  // Monte Carlo covariance against closed forms: dictator has Cov = e^-eps,
  // parity(n) has Cov = e^-(n eps); both have mean zero.
  const std::uint64_t replicas = 200000;
  for (const double eps : {0.1, 0.5}) {
    const auto f = dictator(50);
    const DynamicsParams params(50, 0.5);
    const auto est = estimate_covariance(*f, params, eps, replicas, 1771561, opt);
    const double oracle = std::exp(-eps);
    const double se = std::sqrt((1.0 - oracle * oracle) /
                                static_cast<double>(replicas));
    add_check(out, "fourier", "mc covariance dictator eps=" + fmt_short(eps),
              std::fabs(est.estimate - oracle) <= 4.0 * std::max(se, est.std_err),
              "mc=" + fmt_short(est.estimate) + " oracle=" + fmt_short(oracle));
  }
  for (const double eps : {0.1, 0.5}) {
    const auto f = parity(10);
    const DynamicsParams params(10, 0.5);
    const auto est = estimate_covariance(*f, params, eps, replicas, 1771562, opt);
    const double oracle = std::exp(-10.0 * eps);
    const double se = std::sqrt((1.0 - oracle * oracle) /
                                static_cast<double>(replicas));
    add_check(out, "fourier", "mc covariance parity(10) eps=" + fmt_short(eps),
              std::fabs(est.estimate - oracle) <= 4.0 * std::max(se, est.std_err),
              "mc=" + fmt_short(est.estimate) + " oracle=" + fmt_short(oracle));
  }
}

}  // namespace

std::vector<std::string> verify_suite_names() {
  return {"anders", "ou", "comparison", "striped", "pinned", "membership", "fourier", "all"};
}

std::vector<CheckResult> run_verify_suite(const std::string& suite, const RunOptions& opt) {
  std::vector<CheckResult> out;
  bool known = false;
  const bool all = suite == "all";
  if (all || suite == "anders") {
    suite_anders(out);
    known = true;
  }
  if (all || suite == "ou") {
    suite_ou(out);
    known = true;
  }
  if (all || suite == "comparison") {
    suite_comparison(out);
    known = true;
  }
  if (all || suite == "striped") {
    suite_striped(out, opt);
    known = true;
  }
  if (all || suite == "pinned") {
    suite_pinned(out);
    known = true;
  }
  if (all || suite == "membership") {
    suite_membership(out);
    known = true;
  }
  if (all || suite == "fourier") {
    suite_fourier(out, opt);
    known = true;
  }
  if (!known) {
    std::string msg = "unknown verify suite '" + suite + "'; known:";
    for (const auto& name : verify_suite_names()) msg += " " + name;
    throw std::invalid_argument(msg);
  }
  return out;
}

}  // namespace bfdyn
