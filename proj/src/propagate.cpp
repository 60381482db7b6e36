#include "odeup/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "odeup/error.hpp"
#include "odeup/parallel.hpp"
#include "odeup/reference.hpp"

namespace odeup {

GaussianMixture PropagationResult::mixture(std::size_t k) const {
  const std::size_t n_times = times.size();
  const auto d = static_cast<std::size_t>(dim);
  std::vector<Gaussian> comps;
  comps.reserve(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const std::size_t slot = i * n_times + k;
    Vector mean = Eigen::Map<const Vector>(component_means.data() + slot * d, dim);
    Matrix cov_sqrt = Eigen::Map<const Matrix>(component_cov_sqrt.data() + slot * d * d, dim, dim);
    comps.emplace_back(std::move(mean), std::move(cov_sqrt));
  }
  return GaussianMixture(rule.weights, std::move(comps));
}

namespace {

// Per-node solver: returns the grid and writes marginals of y(t) into the
// node's slots of the result's component storage.
using NodeSolver = std::function<std::vector<double>(const ConcreteIVP&, double* means, double* cov_sqrt,
                                                     double* kappa2)>;

PropagationResult run_ensemble(const IVProblem& problem, const QuadratureRule& rule,
                               const std::vector<double>& grid, const NodeSolver& solver, unsigned jobs) {
  rule.validate();
  PropagationResult out;
  out.times = grid;
  out.rule = rule;
  out.dim = problem.dim;
  const std::size_t n_nodes = rule.size();
  const std::size_t n_times = grid.size();
  const auto d = static_cast<std::size_t>(problem.dim);
  out.component_means.assign(n_nodes * n_times * d, 0.0);
  out.component_cov_sqrt.assign(n_nodes * n_times * d * d, 0.0);
  out.kappa2_per_node.assign(n_nodes, 0.0);

  parallel_for(n_nodes, jobs, [&](std::size_t i) {
    std::vector<double> node_grid;
    try {
      const ConcreteIVP ivp = apply_params(problem, rule.nodes[i]);
      node_grid = solver(ivp, out.component_means.data() + i * n_times * d,
                         out.component_cov_sqrt.data() + i * n_times * d * d, &out.kappa2_per_node[i]);
    } catch (const Error& e) {
      throw Error(ErrorCode::NodeSolveFailed, std::string("node solve failed: ") + e.what(), i);
    }
    if (node_grid != grid) {
      throw Error(ErrorCode::MixtureGridMismatch, "node grid differs from the shared grid", i);
    }
  });

  out.mean.reserve(n_times);
  out.cov_total.reserve(n_times);
  out.cov_pn.reserve(n_times);
  out.cov_non_pn.reserve(n_times);
  for (std::size_t k = 0; k < n_times; ++k) {
    const GaussianMixture mix = out.mixture(k);
    MixtureCovariance cov = mixture_cov(mix);
    out.mean.push_back(mixture_mean(mix));
    out.cov_total.push_back(std::move(cov.total));
    out.cov_pn.push_back(std::move(cov.pn));
    out.cov_non_pn.push_back(std::move(cov.non_pn));
  }
  return out;
}

}  // namespace

PropagationResult propagate_rule(const IVProblem& problem, const QuadratureRule& rule, const SolverConfig& config,
                                 unsigned jobs) {
  config.validate();
  const std::vector<double> grid = make_grid(problem.t0, problem.t1, config.step);
  const auto d = static_cast<std::size_t>(problem.dim);
  const NodeSolver solver = [&](const ConcreteIVP& ivp, double* means, double* cov_sqrt, double* kappa2) {
    const ODESolution sol = solve(ivp, config);
    for (std::size_t k = 0; k < sol.times.size(); ++k) {
      const Gaussian marginal = sol.solution_marginal(k);
      Eigen::Map<Vector>(means + k * d, problem.dim) = marginal.mean();
      Eigen::Map<Matrix>(cov_sqrt + k * d * d, problem.dim, problem.dim) = marginal.cov_sqrt();
    }
    *kappa2 = sol.kappa2_hat;
    return sol.times;
  };
  return run_ensemble(problem, rule, grid, solver, jobs);
}

PropagationResult propagate(const IVProblem& problem, const ParameterDistribution& dist, const RuleSpec& rule_spec,
                            const SolverConfig& config, unsigned jobs) {
  return propagate_rule(problem, build_rule(dist, rule_spec), config, jobs);
}

PropagationResult propagate_nonpn_rule(const IVProblem& problem, const QuadratureRule& rule,
                                       const ClassicSolverConfig& config, unsigned jobs) {
  if (config.substeps < 1) {
    throw Error(ErrorCode::InvalidArgument, "RK4 substeps must be ≥ 1");
  }
  const std::vector<double> grid = make_grid(problem.t0, problem.t1, config.step);
  const auto d = static_cast<std::size_t>(problem.dim);
  const double internal = config.step / config.substeps;
  const NodeSolver solver = [&](const ConcreteIVP& ivp, double* means, double*, double* kappa2) {
    const ReferenceSolution sol = rk4_solve(ivp, internal, grid);
    for (std::size_t k = 0; k < sol.times.size(); ++k) {
      Eigen::Map<Vector>(means + k * d, problem.dim) = sol.values[k];
    }
    *kappa2 = 0.0;
    return sol.times;
  };
  return run_ensemble(problem, rule, grid, solver, jobs);
}

PropagationResult propagate_nonpn(const IVProblem& problem, const ParameterDistribution& dist,
                                  const RuleSpec& rule_spec, const ClassicSolverConfig& config, unsigned jobs) {
  return propagate_nonpn_rule(problem, build_rule(dist, rule_spec), config, jobs);
}

std::vector<SweepRow> step_size_sweep(const IVProblem& problem, const ParameterDistribution& dist,
                                      const RuleSpec& rule_spec, int q, const std::vector<double>& steps,
                                      unsigned jobs) {
  if (steps.empty()) {
    throw Error(ErrorCode::InvalidArgument, "sweep needs at least one step size");
  }
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (!(steps[k] > 0.0) || (k > 0 && steps[k] < steps[k - 1])) {
      throw Error(ErrorCode::InvalidArgument, "sweep steps must be positive and sorted ascending", k);
    }
  }
  const QuadratureRule rule = build_rule(dist, rule_spec);
  std::vector<SweepRow> rows;
  rows.reserve(steps.size());
  for (double h : steps) {
    SweepRow row;
    row.h = h;
    try {
      SolverConfig config;
      config.q = q;
      config.step = h;
      const PropagationResult result = propagate_rule(problem, rule, config, jobs);
      row.cov_pn = result.cov_pn.back();
      row.cov_non_pn = result.cov_non_pn.back();
      row.cov_total = result.cov_total.back();
      row.ok = true;
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> logspace(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) {
    throw Error(ErrorCode::InvalidArgument, "logspace needs 0 < lo ≤ hi and n ≥ 1");
  }
  if (n == 1) {
    return {lo};
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int k = 0; k < n; ++k) {
    out[static_cast<std::size_t>(k)] = std::pow(10.0, a + (b - a) * k / (n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace odeup
