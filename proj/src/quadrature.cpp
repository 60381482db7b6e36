#include "odeup/quadrature.hpp"

#include <cmath>
#include <random>

#include "odeup/error.hpp"

namespace odeup {

void QuadratureRule::validate() const {
  if (nodes.empty() || static_cast<std::size_t>(weights.size()) != nodes.size()) {
    throw Error(ErrorCode::InvalidArgument, "quadrature rule needs one weight per node and at least one node");
  }
  if (std::abs(weights.sum() - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "quadrature weights must sum to one");
  }
}

QuadratureRule spherical_cubature(const Vector& mean, const Matrix& cov) {
  const Eigen::Index e = mean.size();
  if (e == 0 || cov.rows() != e || cov.cols() != e) {
    throw Error(ErrorCode::ShapeMismatch, "cubature: covariance must be e×e");
  }
  const Matrix scaled = std::sqrt(static_cast<double>(e)) * linalg::psd_factor(cov);
  QuadratureRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(2 * e));
  for (Eigen::Index i = 0; i < e; ++i) {
    rule.nodes.push_back(mean + scaled.col(i));
  }
  for (Eigen::Index i = 0; i < e; ++i) {
    rule.nodes.push_back(mean - scaled.col(i));
  }
  rule.weights = Vector::Constant(2 * e, 1.0 / (2.0 * static_cast<double>(e)));
  return rule;
}

QuadratureRule gauss_hermite_1d(int order) {
  if (order < 1 || order > 10) {
    throw Error(ErrorCode::InvalidArgument, "Gauss–Hermite order must lie in [1, 10]");
  }
  // Three-term recurrence He_{k+1} = x He_k − k He_{k−1}: zero diagonal, off-diagonal √k.
  Matrix jacobi = Matrix::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    jacobi(k - 1, k) = jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
  QuadratureRule rule;
  Vector weights = eig.eigenvectors().row(0).transpose().array().square();
  weights /= weights.sum();
  for (int k = 0; k < order; ++k) {
    rule.nodes.push_back(Vector::Constant(1, eig.eigenvalues()[k]));
  }
  rule.weights = std::move(weights);
  return rule;
}

QuadratureRule gauss_hermite(const Vector& mean, const Matrix& cov, int order) {
  const Eigen::Index e = mean.size();
  if (e == 0 || cov.rows() != e || cov.cols() != e) {
    throw Error(ErrorCode::ShapeMismatch, "Gauss–Hermite: covariance must be e×e");
  }
  if (e > 3) {
    throw Error(ErrorCode::DimensionTooLarge, "tensor Gauss–Hermite is limited to e ≤ 3");
  }
  const QuadratureRule base = gauss_hermite_1d(order);
  const Matrix factor = linalg::psd_factor(cov);

  std::size_t total = 1;
  for (Eigen::Index i = 0; i < e; ++i) {
    total *= static_cast<std::size_t>(order);
  }
  QuadratureRule rule;
  rule.nodes.reserve(total);
  rule.weights.resize(static_cast<Eigen::Index>(total));
  std::vector<int> digits(static_cast<std::size_t>(e), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    // First coordinate varies slowest.
    std::size_t rest = flat;
    for (Eigen::Index i = e; i-- > 0;) {
      digits[static_cast<std::size_t>(i)] = static_cast<int>(rest % static_cast<std::size_t>(order));
      rest /= static_cast<std::size_t>(order);
    }
    Vector xi(e);
    double w = 1.0;
    for (Eigen::Index i = 0; i < e; ++i) {
      const auto idx = static_cast<std::size_t>(digits[static_cast<std::size_t>(i)]);
      xi[i] = base.nodes[idx][0];
      w *= base.weights[static_cast<Eigen::Index>(idx)];
    }
    rule.nodes.push_back(mean + factor * xi);
    rule.weights[static_cast<Eigen::Index>(flat)] = w;
  }
  return rule;
}

QuadratureRule monte_carlo(const ParameterDistribution& dist, std::size_t n, std::uint64_t seed) {
  if (n == 0) {
    throw Error(ErrorCode::InvalidArgument, "Monte Carlo rule needs n ≥ 1");
  }
  const Eigen::Index e = dist.dim();
  std::mt19937_64 rng(seed);
  QuadratureRule rule;
  rule.nodes.reserve(n);
  if (dist.is_gaussian()) {
    const Matrix factor = linalg::psd_factor(dist.gaussian().cov);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
      Vector xi(e);
      for (Eigen::Index i = 0; i < e; ++i) {
        xi[i] = normal(rng);
      }
      rule.nodes.push_back(dist.gaussian().mean + factor * xi);
    }
  } else {
    const Vector& lo = dist.uniform().lower;
    const Vector width = dist.uniform().upper - lo;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
      Vector u(e);
      for (Eigen::Index i = 0; i < e; ++i) {
        u[i] = unit(rng);
      }
      rule.nodes.push_back(lo + width.cwiseProduct(u));
    }
  }
  rule.weights = Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
  return rule;
}

RuleKind parse_rule_kind(const std::string& name) {
  if (name == "cubature") {
    return RuleKind::Cubature;
  }
  if (name == "gauss_hermite") {
    return RuleKind::GaussHermite;
  }
  if (name == "monte_carlo") {
    return RuleKind::MonteCarlo;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown quadrature rule '" + name + "'");
}

std::string to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::Cubature: return "cubature";
    case RuleKind::GaussHermite: return "gauss_hermite";
    case RuleKind::MonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

QuadratureRule build_rule(const ParameterDistribution& dist, const RuleSpec& spec) {
  switch (spec.kind) {
    case RuleKind::Cubature:
    case RuleKind::GaussHermite:
      if (!dist.is_gaussian()) {
        throw Error(ErrorCode::InvalidArgument, to_string(spec.kind) + " needs a Gaussian parameter distribution");
      }
      return spec.kind == RuleKind::Cubature ? spherical_cubature(dist.gaussian().mean, dist.gaussian().cov)
                                             : gauss_hermite(dist.gaussian().mean, dist.gaussian().cov, spec.order);
    case RuleKind::MonteCarlo:
      return monte_carlo(dist, spec.n, spec.seed);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown rule kind");
}

}  // namespace odeup
