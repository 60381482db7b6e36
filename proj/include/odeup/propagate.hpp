/**
 * @file propagate.hpp
 * @brief Uncertainty propagation through ODE solvers by quadrature over θ.
 *
 * Every quadrature node θᵢ is solved on one shared grid; the per-node
 * marginals N(μᵢ(t), Σᵢ(t)) of y(t) form a Gaussian mixture at each grid time,
 * which is moment-matched. The covariance is reported as the sum of the
 * solver-uncertainty part Σ wᵢΣᵢ(t) (PN) and the between-node spread (non-PN).
 */
#pragma once

#include <string>
#include <vector>

#include "odeup/gaussians.hpp"
#include "odeup/ivp.hpp"
#include "odeup/odefilter.hpp"
#include "odeup/quadrature.hpp"

namespace odeup {

struct PropagationResult {
  std::vector<double> times;
  QuadratureRule rule;
  int dim = 0;
  std::vector<Vector> mean;
  std::vector<Matrix> cov_total;
  std::vector<Matrix> cov_pn;
  std::vector<Matrix> cov_non_pn;
  std::vector<double> kappa2_per_node;

  /// Mixture Σ wᵢ N(μᵢ(tₖ), Σᵢ(tₖ)) over y(tₖ).
  [[nodiscard]] GaussianMixture mixture(std::size_t k) const;

  /// Per-node marginals, stored node-major: component (i, k) starts at
  /// (i·T + k)·d in `component_means` and (i·T + k)·d² in `component_cov_sqrt`
  /// (column-major lower factors).
  std::vector<double> component_means;
  std::vector<double> component_cov_sqrt;
};

struct ClassicSolverConfig {
  double step = 0.01;  ///< output grid spacing
  int substeps = 1;    ///< RK4 steps per grid interval
};

/// Ensemble of PN solves over an explicit rule. Throws NodeSolveFailed
/// (index = node) or MixtureGridMismatch.
[[nodiscard]] PropagationResult propagate_rule(const IVProblem& problem, const QuadratureRule& rule,
                                               const SolverConfig& config, unsigned jobs = 1);

[[nodiscard]] PropagationResult propagate(const IVProblem& problem, const ParameterDistribution& dist,
                                          const RuleSpec& rule_spec, const SolverConfig& config, unsigned jobs = 1);

/// Same pipeline with RK4 point estimates (Dirac components): cov_pn ≡ 0.
[[nodiscard]] PropagationResult propagate_nonpn_rule(const IVProblem& problem, const QuadratureRule& rule,
                                                     const ClassicSolverConfig& config, unsigned jobs = 1);

[[nodiscard]] PropagationResult propagate_nonpn(const IVProblem& problem, const ParameterDistribution& dist,
                                                const RuleSpec& rule_spec, const ClassicSolverConfig& config,
                                                unsigned jobs = 1);

struct SweepRow {
  double h = 0.0;
  bool ok = false;
  std::string error;
  Matrix cov_pn;
  Matrix cov_non_pn;
  Matrix cov_total;
};

/// Runs `propagate` once per step size (EK1, calibrated, smoothed, order q)
/// and records the covariance parts at the final time. A failing step size
/// yields a row with ok = false; the sweep continues.
[[nodiscard]] std::vector<SweepRow> step_size_sweep(const IVProblem& problem, const ParameterDistribution& dist,
                                                    const RuleSpec& rule_spec, int q, const std::vector<double>& steps,
                                                    unsigned jobs = 1);

/// n values equally spaced in log-space over [lo, hi], endpoints included.
[[nodiscard]] std::vector<double> logspace(double lo, double hi, int n);

}  // namespace odeup
