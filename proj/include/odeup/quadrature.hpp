/**
 * @file quadrature.hpp
 * @brief Probability-normalized quadrature rules over parameter distributions.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "odeup/ivp.hpp"
#include "odeup/linalg.hpp"

namespace odeup {

struct QuadratureRule {
  std::vector<Vector> nodes;
  Vector weights;

  [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
  /// Throws InvalidArgument unless sizes agree, n ≥ 1 and Σw = 1 within 1e-12.
  void validate() const;
};

/// Third-degree spherical cubature: 2e nodes μ ± √e·L·eᵢ (plus-nodes first),
/// weights 1/(2e), with L the lower-triangular factor of Σ.
[[nodiscard]] QuadratureRule spherical_cubature(const Vector& mean, const Matrix& cov);

/// Tensor-product probabilists' Gauss–Hermite rule pushed through μ + L·ξ.
/// Throws DimensionTooLarge for e > 3 and InvalidArgument unless 1 ≤ order ≤ 10.
[[nodiscard]] QuadratureRule gauss_hermite(const Vector& mean, const Matrix& cov, int order);

/// 1-D probabilists' Gauss–Hermite nodes (ascending) and weights (sum 1),
/// from the eigen-decomposition of the Jacobi matrix.
[[nodiscard]] QuadratureRule gauss_hermite_1d(int order);

/// n i.i.d. draws with weights 1/n from a mt19937_64 stream seeded with `seed`.
[[nodiscard]] QuadratureRule monte_carlo(const ParameterDistribution& dist, std::size_t n, std::uint64_t seed);

enum class RuleKind { Cubature, GaussHermite, MonteCarlo };

struct RuleSpec {
  RuleKind kind = RuleKind::Cubature;
  int order = 3;          ///< Gauss–Hermite points per dimension
  std::size_t n = 1000;   ///< Monte Carlo sample count
  std::uint64_t seed = 0;
};

[[nodiscard]] RuleKind parse_rule_kind(const std::string& name);
[[nodiscard]] std::string to_string(RuleKind kind);

/// Cubature and Gauss–Hermite require a Gaussian distribution (InvalidArgument otherwise).
[[nodiscard]] QuadratureRule build_rule(const ParameterDistribution& dist, const RuleSpec& spec);

}  // namespace odeup
