/**
 * @file reference.hpp
 * @brief Ground-truth oracles: fixed-step RK4, Monte Carlo propagation over
 * it, the analytic linear pushforward and the one-step filtering demo.
 */
#pragma once

#include <cstdint>
#include <vector>

#include "odeup/gaussians.hpp"
#include "odeup/ivp.hpp"

namespace odeup {

struct ReferenceSolution {
  std::vector<double> times;
  std::vector<Vector> values;
};

/// Classical RK4 from t0 with internal step ≈ h, sampled at `output_grid`
/// (nondecreasing, starting at or after t0). Each output interval is split
/// into ⌈Δ/h⌉ equal substeps, so the internal step is exactly h whenever h
/// divides the output spacing. Throws NonFiniteState on overflow or NaN.
[[nodiscard]] ReferenceSolution rk4_solve(const ConcreteIVP& ivp, double h, const std::vector<double>& output_grid);

struct MonteCarloReference {
  std::vector<double> times;
  std::vector<Vector> mean;
  std::vector<Matrix> cov;        ///< unbiased sample covariance
  std::vector<Vector> std_error;  ///< √(diag(cov)/n) per coordinate
  std::size_t samples_used = 0;
};

struct MonteCarloOptions {
  std::size_t n = 10000;
  std::uint64_t seed = 0;
  double h = 1e-3;
  unsigned jobs = 1;
  /// Fraction of samples allowed to fail (non-finite trajectories) before
  /// the run aborts; failed samples are excluded from the moments.
  double max_failed_fraction = 0.0;
};

/// Samples θ with monte_carlo(dist, n, seed), solves each with rk4_solve and
/// reduces in sample order, so results are bit-reproducible for any `jobs`.
[[nodiscard]] MonteCarloReference mc_reference(const IVProblem& problem, const ParameterDistribution& dist,
                                               const MonteCarloOptions& options,
                                               const std::vector<double>& output_grid);

struct ScalarMoments {
  double mean = 0.0;
  double var = 0.0;
};

/// Moments of y(t) for ẏ = a y + b, y(0) ~ N(y0_mean, y0_var).
[[nodiscard]] ScalarMoments linear_analytic(double a, double b, double y0_mean, double y0_var, double t);

struct StateEstimationDemo {
  Gaussian filter;    ///< Kalman filter posterior p(x₁ | y₁ = 2)
  Gaussian marginal;  ///< ∫ p(x₁ | y₁, x₀) p(x₀) dx₀
};

/// One-step model x₁ | x₀ ~ N(x₀, 0.01), y₁ | x₁ ~ N(x₁, 0.01), y₁ = 2,
/// x₀ ~ N(0, prior_var).
[[nodiscard]] StateEstimationDemo fig1_demo(double prior_var);

}  // namespace odeup
