#include "odeup/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "odeup/error.hpp"
#include "odeup/ivp.hpp"
#include "odeup/odefilter.hpp"
#include "odeup/propagate.hpp"
#include "odeup/quadrature.hpp"
#include "odeup/reference.hpp"

namespace odeup::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::string output;
  std::string format = "csv";
  unsigned jobs = 0;

  std::string problem;
  std::optional<double> t0;
  std::optional<double> t1;
  std::string dist = "gaussian";
  std::optional<double> init_var;

  std::string rule = "cubature";
  int order = 3;
  std::size_t rule_n = 1000;
  std::uint64_t seed = 0;

  std::string solver = "pn";
  int q = 1;
  double h = 0.01;
  std::string linearization = "ek1";
  bool calibrate = true;
  bool smooth = true;
  int substeps = 1;

  std::size_t ref_n = 10000;
  std::uint64_t ref_seed = 0;
  double rk_h = 1e-3;
  double max_failed_fraction = 0.0;

  std::vector<double> steps_logspace;
  std::vector<double> steps;

  std::vector<double> prior_vars{1.0, 10.0};
};

void add_output_options(CLI::App* sub, Options& o, bool text_format) {
  sub->add_option("--config", o.config, "JSON file with option values; command-line flags take precedence");
  sub->add_option("--output,-o", o.output, "output file (default: stdout)");
  if (text_format) {
    o.format = "text";
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"text", "json"}));
  } else {
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  }
}

void add_problem_options(CLI::App* sub, Options& o) {
  sub->add_option("--problem", o.problem, "benchmark name")->check(CLI::IsMember(benchmark_names()));
  sub->add_option("--t0", o.t0, "override start time");
  sub->add_option("--t1", o.t1, "override end time");
  sub->add_option("--dist", o.dist, "parameter distribution family")->check(CLI::IsMember({"gaussian", "uniform"}));
  sub->add_option("--init-var", o.init_var, "replace the parameter covariance by init_var·I")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--jobs", o.jobs, "worker threads (0 = auto; falls back to $ODEUP_JOBS)");
}

void add_rule_options(CLI::App* sub, Options& o) {
  sub->add_option("--rule", o.rule, "quadrature rule")->check(CLI::IsMember({"cubature", "gauss_hermite", "monte_carlo"}));
  sub->add_option("--order", o.order, "Gauss–Hermite points per dimension")->check(CLI::Range(1, 10));
  sub->add_option("--n", o.rule_n, "Monte Carlo rule size")->check(CLI::PositiveNumber);
  sub->add_option("--seed", o.seed, "Monte Carlo rule seed");
}

void add_solver_options(CLI::App* sub, Options& o, bool with_step) {
  sub->add_option("--q", o.q, "prior order (integrated Wiener process)")->check(CLI::Range(1, 8));
  if (with_step) {
    sub->add_option("--h", o.h, "solver step size")->check(CLI::PositiveNumber);
  }
  sub->add_option("--linearization", o.linearization, "ODE filter linearization")->check(CLI::IsMember({"ek1", "ek0"}));
  sub->add_flag("--calibrate,!--no-calibrate", o.calibrate, "calibrate the diffusion (default on)");
  sub->add_flag("--smooth,!--filter-only", o.smooth, "report smoothed marginals (default on)");
}

std::unique_ptr<CLI::App> build_app(Options& o) {
  auto app = std::make_unique<CLI::App>("odeup: uncertainty propagation through probabilistic ODE solvers", "odeup");
  // "-h" stays free so that "--h" (step size) does not collide with it.
  app->set_help_flag("--help", "print this help message and exit");
  app->require_subcommand(1);

  auto* list = app->add_subcommand("list-problems", "list the benchmark problems");
  add_output_options(list, o, true);

  auto* prop = app->add_subcommand("propagate", "propagate parameter uncertainty through an ODE solver");
  add_output_options(prop, o, false);
  add_problem_options(prop, o);
  add_rule_options(prop, o);
  add_solver_options(prop, o, true);
  prop->add_option("--solver", o.solver, "per-node solver: pn (ODE filter) or rk4 (point estimates)")
      ->check(CLI::IsMember({"pn", "rk4"}));
  prop->add_option("--substeps", o.substeps, "RK4 steps per grid interval (--solver rk4)")->check(CLI::PositiveNumber);

  auto* ref = app->add_subcommand("reference", "Monte Carlo reference over a fixed-step RK4 solver");
  add_output_options(ref, o, false);
  add_problem_options(ref, o);
  ref->add_option("--n", o.ref_n, "number of samples")->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  ref->add_option("--seed", o.ref_seed, "sampling seed");
  ref->add_option("--h", o.h, "output grid spacing")->check(CLI::PositiveNumber);
  ref->add_option("--rk-h", o.rk_h, "internal RK4 step")->check(CLI::PositiveNumber);
  ref->add_option("--max-failed-fraction", o.max_failed_fraction, "tolerated fraction of diverging samples")
      ->check(CLI::Range(0.0, 1.0));

  auto* sweep = app->add_subcommand("sweep", "final-time variance decomposition across step sizes");
  add_output_options(sweep, o, false);
  add_problem_options(sweep, o);
  add_rule_options(sweep, o);
  add_solver_options(sweep, o, false);
  sweep->add_option("--steps-logspace", o.steps_logspace, "LO HI COUNT: log-spaced step sizes")->expected(3);
  sweep->add_option("--steps", o.steps, "explicit step sizes");
  sweep->add_option("--ref-n", o.ref_n, "Monte Carlo reference samples")->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  sweep->add_option("--ref-seed", o.ref_seed, "Monte Carlo reference seed");
  sweep->add_option("--rk-h", o.rk_h, "reference RK4 step")->check(CLI::PositiveNumber);

  auto* demo = app->add_subcommand("demo-fig1", "state estimation versus uncertainty propagation, one step");
  add_output_options(demo, o, false);
  demo->add_option("--prior-vars", o.prior_vars, "initial-state variances")->check(CLI::PositiveNumber);

  return app;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Command-line tokens for config-file entries whose options were not given.
std::vector<std::string> config_tokens(const std::string& path, const CLI::App& sub) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot open config file '" + path + "'");
  }
  nlohmann::json cfg;
  try {
    in >> cfg;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!cfg.is_object()) {
    throw UsageError("config file must hold a JSON object");
  }
  auto scalar = [](const nlohmann::json& v) -> std::string {
    if (v.is_string()) {
      return v.get<std::string>();
    }
    if (v.is_number_integer()) {
      return std::to_string(v.get<long long>());
    }
    if (v.is_number()) {
      return format_number(v.get<double>());
    }
    throw UsageError("unsupported config value " + v.dump());
  };

  std::vector<std::string> tokens;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "config") {
      throw UsageError("config files cannot nest");
    }
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    const CLI::Option* opt = sub.get_option_no_throw(flag);
    if (opt == nullptr) {
      throw UsageError("unknown config key '" + key + "'");
    }
    if (opt->count() > 0) {
      continue;
    }
    if (value.is_boolean()) {
      static const std::map<std::string, std::string> negations{{"--calibrate", "--no-calibrate"},
                                                                {"--smooth", "--filter-only"}};
      const auto neg = negations.find(flag);
      if (neg == negations.end()) {
        throw UsageError("config key '" + key + "' is not a boolean option");
      }
      tokens.push_back(value.get<bool>() ? flag : neg->second);
    } else if (value.is_array()) {
      tokens.push_back(flag);
      for (const auto& item : value) {
        tokens.push_back(scalar(item));
      }
    } else {
      tokens.push_back(flag);
      tokens.push_back(scalar(value));
    }
  }
  return tokens;
}

void parse_args(CLI::App& app, std::vector<std::string> args) {
  std::reverse(args.begin(), args.end());
  app.parse(args);
}

// ----------------------------------------------------------------------------
// Tabular output

using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string render_csv(const Table& table) {
  std::ostringstream os;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    os << (c ? "," : "") << table.columns[c];
  }
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << (c ? "," : "");
      if (const auto* v = std::get_if<double>(&row[c])) {
        os << format_number(*v);
      } else {
        os << std::get<std::string>(row[c]);
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string render_json(const Table& table, const ordered_json& config_echo) {
  ordered_json doc;
  doc["config_echo"] = config_echo;
  doc["rows"] = ordered_json::array();
  for (const auto& row : table.rows) {
    ordered_json obj = ordered_json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (const auto* v = std::get_if<double>(&row[c])) {
        obj[table.columns[c]] = std::isfinite(*v) ? ordered_json(*v) : ordered_json(nullptr);
      } else {
        obj[table.columns[c]] = std::get<std::string>(row[c]);
      }
    }
    doc["rows"].push_back(std::move(obj));
  }
  return doc.dump(2) + "\n";
}

void emit(const std::string& text, const Options& o, std::ostream& out) {
  if (o.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.output, std::ios::binary | std::ios::trunc);
  file << text;
  file.close();
  if (!file) {
    std::error_code ec;
    std::filesystem::remove(o.output, ec);
    throw std::runtime_error("failed to write '" + o.output + "'");
  }
}

void emit_table(const Table& table, const ordered_json& echo, const Options& o, std::ostream& out) {
  emit(o.format == "json" ? render_json(table, echo) : render_csv(table), o, out);
}

// ----------------------------------------------------------------------------
// Problem/rule/solver assembly

struct Setup {
  IVProblem problem;
  ParameterDistribution dist;
};

Setup make_setup(const Options& o, std::optional<std::pair<double, double>> default_tspan = std::nullopt) {
  if (o.problem.empty()) {
    throw UsageError("--problem is required");
  }
  Benchmark b = benchmark(o.problem);
  IVProblem problem = b.problem;
  double t0 = problem.t0;
  double t1 = problem.t1;
  if (default_tspan) {
    std::tie(t0, t1) = *default_tspan;
  }
  t0 = o.t0.value_or(t0);
  t1 = o.t1.value_or(t1);
  if (!(t1 > t0)) {
    throw UsageError("time span needs t1 > t0");
  }
  problem = problem.with_tspan(t0, t1);
  ParameterDistribution dist = b.dist;
  if (o.init_var) {
    dist = with_isotropic_variance(dist, *o.init_var);
  }
  if (o.dist == "uniform") {
    dist = uniform_counterpart(dist);
  }
  return {std::move(problem), std::move(dist)};
}

RuleSpec make_rule_spec(const Options& o, const ParameterDistribution& dist) {
  RuleSpec spec;
  spec.kind = parse_rule_kind(o.rule);
  spec.order = o.order;
  spec.n = o.rule_n;
  spec.seed = o.seed;
  if (spec.kind != RuleKind::MonteCarlo && !dist.is_gaussian()) {
    throw UsageError("--rule " + o.rule + " needs --dist gaussian; use --rule monte_carlo for uniform parameters");
  }
  return spec;
}

SolverConfig make_solver_config(const Options& o, double step) {
  SolverConfig c;
  c.q = o.q;
  c.step = step;
  c.linearization = o.linearization == "ek0" ? Linearization::EK0 : Linearization::EK1;
  c.calibrate = o.calibrate;
  c.smooth = o.smooth;
  return c;
}

unsigned resolve_cli_jobs(const Options& o, const CLI::App& sub) {
  if (sub.get_option("--jobs")->count() > 0) {
    return o.jobs;
  }
  if (const char* env = std::getenv("ODEUP_JOBS")) {
    try {
      return static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      throw UsageError("ODEUP_JOBS must be a nonnegative integer");
    }
  }
  return 0;
}

ordered_json echo_common(const Options& o, const Setup& s) {
  ordered_json echo;
  echo["problem"] = o.problem;
  echo["t0"] = s.problem.t0;
  echo["t1"] = s.problem.t1;
  echo["dist"] = o.dist;
  if (o.init_var) {
    echo["init_var"] = *o.init_var;
  }
  return echo;
}

void add_rule_echo(ordered_json& echo, const Options& o) {
  echo["rule"] = o.rule;
  if (o.rule == "gauss_hermite") {
    echo["order"] = o.order;
  }
  if (o.rule == "monte_carlo") {
    echo["n"] = o.rule_n;
    echo["seed"] = o.seed;
  }
}

void add_solver_echo(ordered_json& echo, const Options& o) {
  echo["q"] = o.q;
  echo["linearization"] = o.linearization;
  echo["calibrate"] = o.calibrate;
  echo["smooth"] = o.smooth;
}

std::vector<std::string> moment_columns(int d) {
  std::vector<std::string> cols{"t"};
  for (int j = 0; j < d; ++j) {
    const std::string s = std::to_string(j);
    for (const char* name : {"mean_", "var_total_", "var_pn_", "var_nonpn_", "ci_lo_", "ci_hi_"}) {
      cols.push_back(name + s);
    }
  }
  return cols;
}

void push_moments(std::vector<Cell>& row, double mean, double total, double pn, double non_pn) {
  const double half = 1.96 * std::sqrt(std::max(total, 0.0));
  row.insert(row.end(), {mean, total, pn, non_pn, mean - half, mean + half});
}

// ----------------------------------------------------------------------------
// Commands

int cmd_list_problems(const Options& o, std::ostream& out) {
  ordered_json arr = ordered_json::array();
  std::ostringstream text;
  for (const auto& name : benchmark_names()) {
    const Benchmark b = benchmark(name);
    const GaussianParams& g = b.dist.gaussian();
    ordered_json obj;
    obj["name"] = name;
    obj["dim"] = b.problem.dim;
    obj["theta_dim"] = b.problem.theta_dim;
    obj["tspan"] = {b.problem.t0, b.problem.t1};
    ordered_json dist;
    dist["kind"] = "gaussian";
    dist["mean"] = std::vector<double>(g.mean.data(), g.mean.data() + g.mean.size());
    ordered_json cov = ordered_json::array();
    for (Eigen::Index i = 0; i < g.cov.rows(); ++i) {
      const Vector row = g.cov.row(i).transpose();
      cov.push_back(std::vector<double>(row.data(), row.data() + row.size()));
    }
    dist["cov"] = cov;
    obj["theta_distribution"] = dist;
    text << name << " dim=" << b.problem.dim << " theta_dim=" << b.problem.theta_dim << " theta~N(mean="
         << dist["mean"].dump() << ", cov=" << cov.dump() << ") tspan=[" << b.problem.t0 << ", " << b.problem.t1
         << "]\n";
    arr.push_back(std::move(obj));
  }
  emit(o.format == "json" ? arr.dump(2) + "\n" : text.str(), o, out);
  return 0;
}

int cmd_propagate(const Options& o, const CLI::App& sub, std::ostream& out) {
  const Setup s = make_setup(o);
  const RuleSpec spec = make_rule_spec(o, s.dist);
  const unsigned jobs = resolve_cli_jobs(o, sub);
  PropagationResult r = o.solver == "rk4"
                            ? propagate_nonpn(s.problem, s.dist, spec, ClassicSolverConfig{o.h, o.substeps}, jobs)
                            : propagate(s.problem, s.dist, spec, make_solver_config(o, o.h), jobs);

  Table table;
  table.columns = moment_columns(r.dim);
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    std::vector<Cell> row{r.times[k]};
    for (int j = 0; j < r.dim; ++j) {
      push_moments(row, r.mean[k][j], r.cov_total[k](j, j), r.cov_pn[k](j, j), r.cov_non_pn[k](j, j));
    }
    table.rows.push_back(std::move(row));
  }
  ordered_json echo = echo_common(o, s);
  echo["command"] = "propagate";
  echo["solver"] = o.solver;
  echo["h"] = o.h;
  add_rule_echo(echo, o);
  if (o.solver == "rk4") {
    echo["substeps"] = o.substeps;
  } else {
    add_solver_echo(echo, o);
  }
  echo["kappa2_per_node"] = r.kappa2_per_node;
  emit_table(table, echo, o, out);
  return 0;
}

int cmd_reference(const Options& o, const CLI::App& sub, std::ostream& out) {
  const Setup s = make_setup(o);
  MonteCarloOptions mc;
  mc.n = o.ref_n;
  mc.seed = o.ref_seed;
  mc.h = o.rk_h;
  mc.jobs = resolve_cli_jobs(o, sub);
  mc.max_failed_fraction = o.max_failed_fraction;
  const std::vector<double> grid = make_grid(s.problem.t0, s.problem.t1, o.h);
  const MonteCarloReference ref = mc_reference(s.problem, s.dist, mc, grid);

  const int d = s.problem.dim;
  Table table;
  table.columns = moment_columns(d);
  for (int j = 0; j < d; ++j) {
    table.columns.push_back("se_" + std::to_string(j));
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::vector<Cell> row{grid[k]};
    for (int j = 0; j < d; ++j) {
      const double var = ref.cov[k](j, j);
      push_moments(row, ref.mean[k][j], var, 0.0, var);
    }
    for (int j = 0; j < d; ++j) {
      row.emplace_back(ref.std_error[k][j]);
    }
    table.rows.push_back(std::move(row));
  }
  ordered_json echo = echo_common(o, s);
  echo["command"] = "reference";
  echo["n"] = o.ref_n;
  echo["seed"] = o.ref_seed;
  echo["h"] = o.h;
  echo["rk_h"] = o.rk_h;
  echo["samples_used"] = ref.samples_used;
  emit_table(table, echo, o, out);
  return 0;
}

int cmd_sweep(const Options& o, const CLI::App& sub, std::ostream& out, std::ostream& err) {
  std::vector<double> steps = o.steps;
  if (!o.steps_logspace.empty()) {
    const double count = o.steps_logspace[2];
    if (count < 1 || count != std::floor(count)) {
      throw UsageError("--steps-logspace COUNT must be a positive integer");
    }
    if (!(o.steps_logspace[0] > 0.0) || o.steps_logspace[1] < o.steps_logspace[0]) {
      throw UsageError("--steps-logspace needs 0 < LO ≤ HI");
    }
    const std::vector<double> grid = logspace(o.steps_logspace[0], o.steps_logspace[1], static_cast<int>(count));
    steps.insert(steps.end(), grid.begin(), grid.end());
  }
  if (steps.empty()) {
    throw UsageError("sweep needs --steps-logspace or --steps");
  }
  if (std::any_of(steps.begin(), steps.end(), [](double h) { return !(h > 0.0); })) {
    throw UsageError("step sizes must be positive");
  }
  std::sort(steps.begin(), steps.end());

  std::optional<std::pair<double, double>> tspan;
  if (o.problem == "lotka_volterra") {
    tspan = std::make_pair(0.0, 0.5);
  }
  const Setup s = make_setup(o, tspan);
  const RuleSpec spec = make_rule_spec(o, s.dist);
  const unsigned jobs = resolve_cli_jobs(o, sub);
  const int d = s.problem.dim;

  // Reference variance at the final time.
  Vector ref_var(d);
  std::string ref_kind;
  if (o.problem == "linear" && s.dist.is_gaussian()) {
    const ScalarMoments m =
        linear_analytic(1.0, 0.0, s.dist.mean()[0], s.dist.cov()(0, 0), s.problem.t1 - s.problem.t0);
    ref_var[0] = m.var;
    ref_kind = "analytic";
  } else {
    MonteCarloOptions mc;
    mc.n = o.ref_n;
    mc.seed = o.ref_seed;
    mc.h = o.rk_h;
    mc.jobs = jobs;
    const MonteCarloReference ref = mc_reference(s.problem, s.dist, mc, {s.problem.t0, s.problem.t1});
    ref_var = ref.cov.back().diagonal();
    ref_kind = "monte_carlo";
  }

  SolverConfig base = make_solver_config(o, steps.front());
  std::vector<SweepRow> rows;
  if (o.linearization == "ek1" && o.calibrate && o.smooth) {
    rows = step_size_sweep(s.problem, s.dist, spec, o.q, steps, jobs);
  } else {
    const QuadratureRule rule = build_rule(s.dist, spec);
    for (double h : steps) {
      SweepRow row;
      row.h = h;
      try {
        base.step = h;
        const PropagationResult r = propagate_rule(s.problem, rule, base, jobs);
        row.cov_pn = r.cov_pn.back();
        row.cov_non_pn = r.cov_non_pn.back();
        row.cov_total = r.cov_total.back();
        row.ok = true;
      } catch (const Error& e) {
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }

  Table table;
  table.columns = {"h"};
  for (int j = 0; j < d; ++j) {
    const std::string sfx = std::to_string(j);
    for (const char* name : {"var_pn_", "var_nonpn_", "var_total_", "var_ref_"}) {
      table.columns.push_back(name + sfx);
    }
  }
  table.columns.push_back("status");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& row : rows) {
    std::vector<Cell> cells{row.h};
    for (int j = 0; j < d; ++j) {
      cells.emplace_back(row.ok ? row.cov_pn(j, j) : nan);
      cells.emplace_back(row.ok ? row.cov_non_pn(j, j) : nan);
      cells.emplace_back(row.ok ? row.cov_total(j, j) : nan);
      cells.emplace_back(ref_var[j]);
    }
    cells.emplace_back(std::string(row.ok ? "ok" : "failed"));
    if (!row.ok) {
      err << "warning: step " << format_number(row.h) << " failed: " << row.error << "\n";
    }
    table.rows.push_back(std::move(cells));
  }
  ordered_json echo = echo_common(o, s);
  echo["command"] = "sweep";
  echo["steps"] = steps;
  add_rule_echo(echo, o);
  add_solver_echo(echo, o);
  echo["reference"] = ref_kind;
  if (ref_kind == "monte_carlo") {
    echo["ref_n"] = o.ref_n;
    echo["ref_seed"] = o.ref_seed;
    echo["rk_h"] = o.rk_h;
  }
  emit_table(table, echo, o, out);
  return 0;
}

int cmd_demo_fig1(const Options& o, std::ostream& out) {
  Table table;
  table.columns = {"prior_var", "filter_mean", "filter_var", "marginal_mean", "marginal_var"};
  for (double pv : o.prior_vars) {
    const StateEstimationDemo demo = fig1_demo(pv);
    table.rows.push_back({pv, demo.filter.mean()[0], demo.filter.cov()(0, 0), demo.marginal.mean()[0],
                          demo.marginal.cov()(0, 0)});
  }
  ordered_json echo;
  echo["command"] = "demo-fig1";
  echo["prior_vars"] = o.prior_vars;
  emit_table(table, echo, o, out);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  std::unique_ptr<CLI::App> app = build_app(o);
  try {
    parse_args(*app, args);
    const auto subs = app->get_subcommands();
    CLI::App* sub = subs.front();
    if (!o.config.empty()) {
      std::vector<std::string> merged = args;
      const std::vector<std::string> extra = config_tokens(o.config, *sub);
      merged.insert(merged.end(), extra.begin(), extra.end());
      o = Options{};
      app = build_app(o);
      parse_args(*app, merged);
      sub = app->get_subcommands().front();
    }

    const std::string name = sub->get_name();
    if (name == "list-problems") {
      return cmd_list_problems(o, out);
    }
    if (name == "propagate") {
      return cmd_propagate(o, *sub, out);
    }
    if (name == "reference") {
      return cmd_reference(o, *sub, out);
    }
    if (name == "sweep") {
      return cmd_sweep(o, *sub, out, err);
    }
    return cmd_demo_fig1(o, out);
  } catch (const CLI::CallForHelp& e) {
    return app->exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app->exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app->exit(e, err, err);
    return 2;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace odeup::cli
