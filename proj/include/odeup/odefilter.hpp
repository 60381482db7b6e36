/**
 * @file odefilter.hpp
 * @brief Filtering-based probabilistic ODE solver (extended Kalman ODE filter).
 *
 * The solution is modelled by an integrated Wiener process prior and
 * conditioned on Dirac observations E₁x(tₙ) − f(E₀x(tₙ), tₙ) = 0 on a fixed
 * grid. The forward pass is an extended Kalman filter (EK1 or EK0), followed
 * by optional quasi-maximum-likelihood diffusion calibration and an RTS
 * smoothing pass. All covariance arithmetic is in square-root form.
 */
#pragma once

#include <vector>

#include "odeup/gaussians.hpp"
#include "odeup/ivp.hpp"
#include "odeup/prior.hpp"

namespace odeup {

enum class Linearization { EK1, EK0 };

struct SolverConfig {
  int q = 1;
  double step = 0.01;
  Linearization linearization = Linearization::EK1;
  bool calibrate = true;
  bool smooth = true;
  /// Diffusion used when calibrate is false.
  double kappa2 = 1.0;
  /// When the problem cannot supply derivatives up to order q, initialize the
  /// missing orders with zero mean and variance kDiffuseVariance instead of failing.
  bool diffuse_fallback = true;

  void validate() const;
};

inline constexpr double kDiffuseVariance = 1e6;
inline constexpr double kMinDiffusion = 1e-14;

struct ODESolution {
  std::vector<double> times;
  std::vector<Gaussian> states;    ///< smoothed when config.smooth, else filtered
  std::vector<Gaussian> filtered;  ///< calibrated filter marginals
  double kappa2_hat = 1.0;
  SolverConfig config;
  IWPPrior prior{1, 1};

  /// Marginal of y(tₖ) = E₀x(tₖ).
  [[nodiscard]] Gaussian solution_marginal(std::size_t k) const;
};

/// t0 = τ₀ < … < τ_N = t1 with spacing h. The last step is shortened to land on
/// t1 unless (t1 − t0)/h is integral within 1e-12.
[[nodiscard]] std::vector<double> make_grid(double t0, double t1, double h);

[[nodiscard]] Gaussian initialize(const ConcreteIVP& ivp, int q, bool diffuse_fallback = true);

struct StepResult {
  Gaussian predicted;
  Gaussian updated;
  /// E₁m⁻ − f(E₀m⁻, t + h), the value handed to condition_linear.
  Vector residual;
  Matrix innovation_sqrt;
};

/// One predict/update step from t to t + h.
[[nodiscard]] StepResult ek_step(const Gaussian& state, const ConcreteIVP& ivp, const IWPPrior& prior, double t,
                                 double h, Linearization linearization);

/// κ̂² = (1/(N·d)) Σₙ zₙᵀ Sₙ⁻¹ zₙ, clamped below at kMinDiffusion. Throws
/// DegenerateResidual when some Sₙ is singular.
[[nodiscard]] double calibrate(const std::vector<Vector>& residuals, const std::vector<Matrix>& innovation_sqrts, int d,
                               std::size_t n);

/// Square-root RTS smoother. predicted[n] is the one-step prediction of grid
/// point n+1 made from filtered[n]; steps[n] is the step between them.
/// Throws SingularPrediction when a predicted covariance cannot be inverted.
[[nodiscard]] std::vector<Gaussian> smooth(const std::vector<Gaussian>& filtered,
                                           const std::vector<Gaussian>& predicted, const IWPPrior& prior,
                                           const std::vector<double>& steps);

[[nodiscard]] ODESolution solve(const ConcreteIVP& ivp, const SolverConfig& config);

}  // namespace odeup
