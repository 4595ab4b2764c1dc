#include "flm/cli.hpp"

#include "flm/battery.hpp"
#include "flm/solver.hpp"
#include "flm/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

namespace flm::cli {

using Json = nlohmann::ordered_json;

namespace {

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

Json num(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

Json opt_num(const std::optional<double>& x) { return x ? num(*x) : Json(nullptr); }

Json num_array(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

void write_json(std::ostream& os, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << inner << Json(it.key()).dump() << ": ";
        write_json(os, it.value(), indent + 1);
      }
      os << "\n" << pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      if (flat) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write_json(os, j[i], indent + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << inner;
        write_json(os, j[i], indent + 1);
      }
      os << "\n" << pad << "]";
      return;
    }
    case Json::value_t::number_float: os << format_number(j.get<double>()); return;
    default: os << j.dump(); return;
  }
}

std::string csv_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return format_number(x);
}

struct CsvRow {
  double delta, error, bound;
  bool satisfied;
};

Json config_json(const RunConfig& c) {
  return Json{{"command", c.command},
              {"problem", c.problem},
              {"scheme", c.scheme},
              {"outer", c.outer},
              {"delta_start", num(c.delta_start)},
              {"delta_factor", num(c.delta_factor)},
              {"delta_count", c.delta_count},
              {"samples", c.samples},
              {"seed", c.seed},
              {"gamma", num(c.gamma)},
              {"upsilon", num(c.upsilon)},
              {"format", c.format == Format::csv ? "csv" : "json"}};
}

Json report_rows(const BoundReport& r) {
  Json rows = Json::array();
  for (std::size_t k = 0; k < r.deltas.size(); ++k) {
    Json row{{"delta", num(r.deltas[k])},
             {"error", num(r.errors[k])},
             {"bound", num(r.bounds[k])},
             {"satisfied", static_cast<bool>(r.row_satisfied[k])}};
    if (k < r.pair_gaps.size()) row["pair_gap"] = num(r.pair_gaps[k]);
    rows.push_back(std::move(row));
  }
  return rows;
}

Json report_summary(const BoundReport& r) {
  Json s{{"label", r.label},
         {"fitted_order", opt_num(r.fitted_order)},
         {"expected_order", opt_num(r.expected_order)},
         {"constant_estimate", num(r.constant_estimate)},
         {"bound_satisfied", r.bound_satisfied},
         {"status", to_string(r.status)}};
  if (!r.note.empty()) s["note"] = r.note;
  for (const auto& [key, value] : r.details) s[key] = num(value);
  return s;
}

void append_rows(std::vector<CsvRow>& out, const BoundReport& r) {
  for (std::size_t k = 0; k < r.deltas.size(); ++k)
    out.push_back({r.deltas[k], r.errors[k], r.bounds[k], static_cast<bool>(r.row_satisfied[k])});
}

int exit_for(const BoundReport& r) {
  switch (r.status) {
    case ReportStatus::ok: return kExitOk;
    case ReportStatus::bound_failure: return kExitBoundFailure;
    case ReportStatus::hypothesis_violation: return kExitHypothesisViolation;
  }
  return kExitBoundFailure;
}

int exit_for(const BoundReport& a, const BoundReport& b) {
  const int ea = exit_for(a);
  const int eb = exit_for(b);
  if (ea == kExitHypothesisViolation || eb == kExitHypothesisViolation) return kExitHypothesisViolation;
  return std::max(ea, eb);
}

struct Outcome {
  Json json;
  std::vector<CsvRow> rows;
  int exit_code = kExitOk;
};

Outcome single_report(const BoundReport& r) {
  Outcome o;
  o.json["rows"] = report_rows(r);
  o.json["summary"] = report_summary(r);
  append_rows(o.rows, r);
  o.exit_code = exit_for(r);
  return o;
}

// Pair reports: the first fills rows/summary, the second sits under "secondary".
// CSV rows list the first report, then the second.
Outcome pair_report(const BoundReport& a, const BoundReport& b) {
  Outcome o = single_report(a);
  o.json["secondary"] = Json{{"rows", report_rows(b)}, {"summary", report_summary(b)}};
  append_rows(o.rows, b);
  o.exit_code = exit_for(a, b);
  return o;
}

Outcome counterexample_outcome(const CounterexampleReport& r) {
  Outcome o;
  Json rows = Json::array();
  for (std::size_t k = 0; k < r.deltas.size(); ++k) {
    rows.push_back(Json{{"delta", num(r.deltas[k])},
                        {"error", num(r.measured[k])},
                        {"bound", num(r.expected[k])},
                        {"satisfied", static_cast<bool>(r.row_passed[k])}});
    o.rows.push_back({r.deltas[k], r.measured[k], r.expected[k], static_cast<bool>(r.row_passed[k])});
  }
  o.json["rows"] = std::move(rows);
  const bool is_distance = r.name != "ex33";
  o.json[is_distance ? "distances" : "value_errors"] = num_array(r.measured);
  o.json["expected"] = num_array(r.expected);

  std::string status = "pass";
  o.exit_code = kExitOk;
  if (!r.reproduced) {
    status = "mismatch";
    o.exit_code = kExitBoundFailure;
  } else if (r.hypothesis_violation) {
    status = "hypothesis_violation";
    o.exit_code = kExitHypothesisViolation;
  }
  o.json["summary"] = Json{{"name", r.name},
                           {"quantity", r.quantity},
                           {"failure_mode", r.failure_mode},
                           {"tolerance", num(r.tolerance)},
                           {"reproduced", r.reproduced},
                           {"status", status}};
  return o;
}

Outcome solve_outcome(const SolverTrace& t) {
  Outcome o;
  Json rows = Json::array();
  Json trace = Json::array();
  for (const auto& it : t.iterations) {
    rows.push_back(Json{{"delta", num(it.delta)},
                        {"error", num(it.value)},
                        {"bound", num(it.stationarity)},
                        {"satisfied", it.accepted}});
    trace.push_back(Json{{"x", vec_json(it.x)},
                         {"delta", num(it.delta)},
                         {"f", num(it.value)},
                         {"stationarity", num(it.stationarity)},
                         {"accepted", it.accepted},
                         {"predicted_reduction", num(it.predicted_reduction)},
                         {"actual_reduction", num(it.actual_reduction)}});
    o.rows.push_back({it.delta, it.value, it.stationarity, it.accepted});
  }
  o.json["rows"] = std::move(rows);
  o.json["trace"] = std::move(trace);
  o.json["summary"] = Json{{"status", to_string(t.status)},
                           {"iterations", t.iterations.size()},
                           {"x_final", vec_json(t.x_final)},
                           {"f_final", num(t.f_final)}};
  o.exit_code = t.status == SolverStatus::converged ? kExitOk : kExitBoundFailure;
  return o;
}

std::string serialize(const RunConfig& config, Outcome& o) {
  std::ostringstream os;
  if (config.format == Format::csv) {
    os << "delta,error,bound,satisfied\n";
    for (const auto& r : o.rows)
      os << csv_number(r.delta) << ',' << csv_number(r.error) << ',' << csv_number(r.bound) << ','
         << (r.satisfied ? "true" : "false") << '\n';
    return os.str();
  }
  Json doc;
  doc["config"] = config_json(config);
  for (auto it = o.json.begin(); it != o.json.end(); ++it) doc[it.key()] = it.value();
  write_json(os, doc, 0);
  os << '\n';
  return os.str();
}

bool write_atomically(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) return false;
    f << text;
    if (!f.flush()) return false;
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    return false;
  }
  return true;
}

Scheme parse_scheme(const std::string& name) {
  try {
    return Scheme{scheme_kind_from_string(name), 0};
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

Outcome execute(const RunConfig& c) {
  if (c.command == "counterexample") {
    if (c.problem != "ex33" && c.problem != "ex42" && c.problem != "ex43" && c.problem != "ex44")
      throw UsageError("counterexample needs one of ex33, ex42, ex43, ex44");
    return counterexample_outcome(run_counterexample(c.problem));
  }

  Problem problem = [&] {
    try {
      return find_problem(c.problem);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();
  const ConvexOuter outer = [&] {
    if (c.outer.empty()) return problem.outer;
    try {
      return outer_by_name(c.outer, problem.F.dim_out);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();
  const Scheme scheme = parse_scheme(c.scheme);
  if (c.samples < 1) throw UsageError("--samples must be positive");

  if (c.command == "solve") {
    if (!outer.finite_valued()) throw UsageError("solve does not support extended-valued outer functions");
    SolverConfig cfg;
    cfg.seed = c.seed;
    return solve_outcome(minimize(outer, problem.F, problem.start, cfg));
  }

  std::vector<double> grid;
  try {
    grid = delta_grid(c.delta_start, c.delta_factor, c.delta_count);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!(grid.front() < problem.delta_bar)) throw UsageError("--delta-start must be below the problem's delta_bar");
  if (c.samples < 2 * problem.F.dim_in + 1) throw UsageError("--samples must be at least 2n+1");

  const ModelFamily family = problem_family(problem, scheme, c.seed);
  const HarnessOptions opts{c.samples, c.seed};
  if (c.command == "certify") {
    const auto [value, grad] = certify_fully_linear(family, grid, c.samples, c.seed);
    return pair_report(value, grad);
  }
  if (c.command == "thm31") return single_report(check_thm31(outer, problem.F, family, grid, c.samples, c.seed));
  if (c.command == "prop32") return single_report(check_prop32(problem.F, family, grid, c.samples, c.seed));
  if (c.command == "thm41") return single_report(check_thm41(outer, problem.F, family, grid, opts));
  if (c.command == "generalized") {
    if (!(c.gamma > 0.0) || !(c.upsilon > 0.0)) throw UsageError("--gamma and --upsilon must be positive");
    const auto [value, sub] = check_generalized(outer, problem.F, family, grid, c.gamma, c.upsilon, opts);
    return pair_report(value, sub);
  }
  throw UsageError("unknown command: " + c.command);
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"certify", "thm31",          "prop32", "thm41",
                                              "generalized", "counterexample", "solve"};
  return names;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "null";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::vector<double> delta_grid(double start, double factor, int count) {
  if (!(start > 0.0) || !std::isfinite(start)) throw std::invalid_argument("delta grid: start must be positive");
  if (!(factor > 0.0 && factor < 1.0)) throw std::invalid_argument("delta grid: factor must lie in (0,1)");
  if (count < 3) throw std::invalid_argument("delta grid: count must be at least 3");
  std::vector<double> grid;
  double d = start;
  for (int k = 0; k < count; ++k) {
    grid.push_back(d);
    d *= factor;
  }
  return grid;
}

RunResult run(const RunConfig& config) {
  RunResult result;
  Outcome outcome;
  try {
    outcome = execute(config);
  } catch (const UsageError& e) {
    result.exit_code = kExitUsage;
    result.message = std::string("usage error: ") + e.what();
    return result;
  }
  result.exit_code = outcome.exit_code;
  result.report = serialize(config, outcome);
  if (config.out != "-" && !write_atomically(config.out, result.report)) {
    result.exit_code = kExitCantCreate;
    result.message = "cannot write report to " + config.out;
  }
  return result;
}

std::variant<RunConfig, int> parse_args(int argc, const char* const* argv) {
  CLI::App app{"Fully linear models of composite functions: bound checks and counterexamples"};
  RunConfig c;
  std::string format = "json";
  app.add_option("--command", c.command, "Command to run")->required()->check(CLI::IsMember(commands()));
  app.add_option("--problem", c.problem, "Problem id from the built-in battery")->required();
  app.add_option("--scheme", c.scheme, "Model scheme: linear, quadratic, regression");
  app.add_option("--delta-start", c.delta_start, "Largest Delta of the grid");
  app.add_option("--delta-factor", c.delta_factor, "Ratio between consecutive Deltas");
  app.add_option("--delta-count", c.delta_count, "Number of grid points (>= 3)");
  app.add_option("--samples", c.samples, "Ball samples per Delta");
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", c.out, "Report path, '-' for stdout");
  app.add_option("--outer", c.outer, "Override the outer function: max, ell1, indicator, hinge");
  app.add_option("--gamma", c.gamma, "Value exponent for the generalized check");
  app.add_option("--upsilon", c.upsilon, "Subgradient exponent for the generalized check");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  c.format = format == "csv" ? Format::csv : Format::json;
  return c;
}

}  // namespace flm::cli
