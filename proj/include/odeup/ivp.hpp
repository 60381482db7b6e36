/**
 * @file ivp.hpp
 * @brief Parameterized initial value problems and the benchmark catalog.
 *
 * Evaluators must be pure and re-entrant: the propagation and reference
 * modules call them from several threads at once.
 */
#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "odeup/linalg.hpp"

namespace odeup {

/// out ← f(y, t, θ); `out` is pre-sized to the ODE dimension.
using VectorField = std::function<void(const Vector& y, double t, const Vector& theta, Vector& out)>;
/// out ← ∂f/∂y (y, t, θ); `out` is pre-sized d×d.
using VectorFieldJacobian = std::function<void(const Vector& y, double t, const Vector& theta, Matrix& out)>;
using InitialValueMap = std::function<Vector(const Vector& theta)>;
/// Returns [y(t0), ẏ(t0), …, y⁽ᵏ⁾(t0)] for k = up_to.
using DerivativeOracle = std::function<std::vector<Vector>(const Vector& y0, double t0, const Vector& theta, int up_to)>;

struct IVProblem {
  std::string name;
  int dim = 1;
  int theta_dim = 1;
  VectorField f;
  VectorFieldJacobian jac;
  InitialValueMap init_map;
  double t0 = 0.0;
  double t1 = 1.0;
  DerivativeOracle derivative_oracle;  ///< may be empty
  int oracle_max_order = 1;

  /// Copy with a different time span; throws InvalidArgument unless t1 > t0.
  [[nodiscard]] IVProblem with_tspan(double new_t0, double new_t1) const;
};

struct GaussianParams {
  Vector mean;
  Matrix cov;
};

struct UniformBox {
  Vector lower;
  Vector upper;
};

/// Distribution over θ. Validates its invariants on construction.
class ParameterDistribution {
 public:
  explicit ParameterDistribution(GaussianParams gaussian);
  explicit ParameterDistribution(UniformBox box);

  [[nodiscard]] bool is_gaussian() const noexcept { return std::holds_alternative<GaussianParams>(kind_); }
  [[nodiscard]] const GaussianParams& gaussian() const { return std::get<GaussianParams>(kind_); }
  [[nodiscard]] const UniformBox& uniform() const { return std::get<UniformBox>(kind_); }
  [[nodiscard]] Eigen::Index dim() const;
  [[nodiscard]] Vector mean() const;
  [[nodiscard]] Matrix cov() const;

 private:
  std::variant<GaussianParams, UniformBox> kind_;
};

/// UniformBox[μ − 1.96σ, μ + 1.96σ] built from a Gaussian's means and marginal standard deviations.
[[nodiscard]] ParameterDistribution uniform_counterpart(const ParameterDistribution& gaussian);

/// Gaussian with the same mean and covariance variance·I.
[[nodiscard]] ParameterDistribution with_isotropic_variance(const ParameterDistribution& dist, double variance);

/// An IVP with θ bound: fixed vector field and initial value.
class ConcreteIVP {
 public:
  ConcreteIVP(IVProblem problem, Vector theta);

  [[nodiscard]] int dim() const noexcept { return problem_.dim; }
  [[nodiscard]] double t0() const noexcept { return problem_.t0; }
  [[nodiscard]] double t1() const noexcept { return problem_.t1; }
  [[nodiscard]] const Vector& y0() const noexcept { return y0_; }
  [[nodiscard]] const Vector& theta() const noexcept { return theta_; }
  [[nodiscard]] const IVProblem& problem() const noexcept { return problem_; }

  void eval(const Vector& y, double t, Vector& out) const { problem_.f(y, t, theta_, out); }
  [[nodiscard]] Vector eval(const Vector& y, double t) const;
  [[nodiscard]] Matrix jacobian(const Vector& y, double t) const;
  [[nodiscard]] int max_derivative_order() const noexcept;

 private:
  IVProblem problem_;
  Vector theta_;
  Vector y0_;
};

struct Benchmark {
  IVProblem problem;
  ParameterDistribution dist;
};

/// One of: linear, logistic, fitzhugh_nagumo, lotka_volterra, van_der_pol.
/// Throws UnknownProblem otherwise.
[[nodiscard]] Benchmark benchmark(const std::string& name);
[[nodiscard]] const std::vector<std::string>& benchmark_names();

/// Throws DimensionMismatch when θ has the wrong length.
[[nodiscard]] ConcreteIVP apply_params(const IVProblem& problem, const Vector& theta);

/// [y(t0), ẏ(t0), …] up to order `up_to`. Orders ≥ 2 come from the
/// problem's derivative oracle; throws UnsupportedOrder when it cannot
/// supply them.
[[nodiscard]] std::vector<Vector> solution_derivatives(const ConcreteIVP& ivp, int up_to);

}  // namespace odeup
