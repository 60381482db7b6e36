/**
 * @file gaussians.hpp
 * @brief Square-root Gaussians, Gaussian mixtures and the linear-Gaussian
 * predict/condition operations used by the ODE filter.
 *
 * Covariances are carried as lower-triangular factors L with Σ = L Lᵀ.
 * Zero pivots are allowed, so Dirac (fully or partially degenerate)
 * distributions are representable.
 */
#pragma once

#include <vector>

#include "odeup/linalg.hpp"

namespace odeup {

class Gaussian {
 public:
  Gaussian() = default;
  /// Takes ownership of an existing factor. Throws ShapeMismatch unless
  /// cov_sqrt is n×n lower-triangular with a nonnegative diagonal.
  Gaussian(Vector mean, Matrix cov_sqrt);

  /// Point mass at `mean`.
  [[nodiscard]] static Gaussian dirac(Vector mean);

  [[nodiscard]] const Vector& mean() const noexcept { return mean_; }
  [[nodiscard]] const Matrix& cov_sqrt() const noexcept { return cov_sqrt_; }
  [[nodiscard]] Matrix cov() const { return cov_sqrt_ * cov_sqrt_.transpose(); }
  [[nodiscard]] Eigen::Index dim() const noexcept { return mean_.size(); }

  /// Same mean, covariance multiplied by `variance_factor` (≥ 0).
  [[nodiscard]] Gaussian scaled(double variance_factor) const;

 private:
  Vector mean_;
  Matrix cov_sqrt_;
};

class GaussianMixture {
 public:
  /// Throws InvalidArgument when weights are negative, do not sum to one
  /// within 1e-12, or components disagree in dimension.
  GaussianMixture(Vector weights, std::vector<Gaussian> components);

  [[nodiscard]] const Vector& weights() const noexcept { return weights_; }
  [[nodiscard]] const std::vector<Gaussian>& components() const noexcept { return components_; }
  [[nodiscard]] std::size_t size() const noexcept { return components_.size(); }
  [[nodiscard]] Eigen::Index dim() const { return components_.front().dim(); }

 private:
  Vector weights_;
  std::vector<Gaussian> components_;
};

[[nodiscard]] Gaussian make_gaussian(const Vector& mean, const Matrix& cov);

/// N(A m + b, A Σ Aᵀ + N Nᵀ), recombined in square-root form.
[[nodiscard]] Gaussian affine_predict(const Gaussian& g, const Matrix& transition, const Vector& offset,
                                      const Matrix& noise_sqrt);

struct Conditioned {
  Gaussian posterior;
  Matrix innovation_sqrt;  ///< lower factor of S = H Σ Hᵀ + R
};

/// Conditions on the observation H x = H m − residual with noise R = obs_noise_sqrt obs_noise_sqrtᵀ.
/// The residual is therefore the observation function evaluated at the prior
/// mean, and the posterior mean is m − K·residual. R may be exactly zero.
/// Throws SingularInnovation when a pivot of S falls below 1e-14·‖S‖.
[[nodiscard]] Conditioned condition_linear(const Gaussian& g, const Matrix& obs_matrix, const Vector& residual,
                                           const Matrix& obs_noise_sqrt);

[[nodiscard]] Vector mixture_mean(const GaussianMixture& mixture);

struct MixtureCovariance {
  Matrix total;
  Matrix pn;      ///< Σ wᵢ Σᵢ
  Matrix non_pn;  ///< Σ wᵢ (μᵢ − μ̄)(μᵢ − μ̄)ᵀ
};

/// total is formed as pn + non_pn, so the decomposition is exact.
[[nodiscard]] MixtureCovariance mixture_cov(const GaussianMixture& mixture);

}  // namespace odeup
