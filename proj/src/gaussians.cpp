#include "odeup/gaussians.hpp"

#include <cmath>
#include <utility>

#include "odeup/error.hpp"

namespace odeup {

Gaussian::Gaussian(Vector mean, Matrix cov_sqrt) : mean_(std::move(mean)), cov_sqrt_(std::move(cov_sqrt)) {
  if (cov_sqrt_.rows() != mean_.size() || cov_sqrt_.cols() != mean_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "covariance factor must be n×n for a mean of length n");
  }
  if (!linalg::is_lower_triangular(cov_sqrt_)) {
    throw Error(ErrorCode::ShapeMismatch, "covariance factor must be lower-triangular");
  }
  if ((cov_sqrt_.diagonal().array() < 0.0).any()) {
    throw Error(ErrorCode::ShapeMismatch, "covariance factor must have a nonnegative diagonal");
  }
}

Gaussian Gaussian::dirac(Vector mean) {
  const Eigen::Index n = mean.size();
  return Gaussian(std::move(mean), Matrix::Zero(n, n));
}

Gaussian Gaussian::scaled(double variance_factor) const {
  if (!(variance_factor >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "variance scale must be nonnegative");
  }
  return Gaussian(mean_, std::sqrt(variance_factor) * cov_sqrt_);
}

GaussianMixture::GaussianMixture(Vector weights, std::vector<Gaussian> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  if (components_.empty() || static_cast<std::size_t>(weights_.size()) != components_.size()) {
    throw Error(ErrorCode::InvalidArgument, "mixture needs one weight per component and at least one component");
  }
  if ((weights_.array() < 0.0).any() || std::abs(weights_.sum() - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "mixture weights must be nonnegative and sum to one");
  }
  const Eigen::Index d = components_.front().dim();
  for (const auto& c : components_) {
    if (c.dim() != d) {
      throw Error(ErrorCode::DimensionMismatch, "mixture components differ in dimension");
    }
  }
}

Gaussian make_gaussian(const Vector& mean, const Matrix& cov) {
  if (cov.rows() != mean.size() || cov.cols() != mean.size()) {
    throw Error(ErrorCode::ShapeMismatch, "covariance shape does not match mean");
  }
  return Gaussian(mean, linalg::psd_factor(cov));
}

Gaussian affine_predict(const Gaussian& g, const Matrix& transition, const Vector& offset, const Matrix& noise_sqrt) {
  const Eigen::Index n = g.dim();
  const Eigen::Index m = transition.rows();
  if (transition.cols() != n || offset.size() != m || noise_sqrt.rows() != m) {
    throw Error(ErrorCode::ShapeMismatch, "affine_predict: nonconformant shapes");
  }
  Matrix stacked(m, n + noise_sqrt.cols());
  stacked << transition * g.cov_sqrt(), noise_sqrt;
  return Gaussian(transition * g.mean() + offset, linalg::triangularize(stacked));
}

Conditioned condition_linear(const Gaussian& g, const Matrix& obs_matrix, const Vector& residual,
                             const Matrix& obs_noise_sqrt) {
  const Eigen::Index n = g.dim();
  const Eigen::Index m = obs_matrix.rows();
  if (obs_matrix.cols() != n || residual.size() != m || obs_noise_sqrt.rows() != m || obs_noise_sqrt.cols() != m) {
    throw Error(ErrorCode::ShapeMismatch, "condition_linear: nonconformant shapes");
  }

  // [ R^½  H L ]      [ S^½  0  ]
  // [  0    L  ]  ->  [ K̃    L⁺ ]   (lower-triangular recombination)
  Matrix stacked = Matrix::Zero(m + n, m + n);
  stacked.topLeftCorner(m, m) = obs_noise_sqrt;
  stacked.topRightCorner(m, n) = obs_matrix * g.cov_sqrt();
  stacked.bottomRightCorner(n, n) = g.cov_sqrt();
  const Matrix lower = linalg::triangularize(stacked);

  Matrix innovation_sqrt = lower.topLeftCorner(m, m);
  const double s_norm = (innovation_sqrt * innovation_sqrt.transpose()).norm();
  const Vector pivots = innovation_sqrt.diagonal().array().square();
  if (s_norm == 0.0 || pivots.minCoeff() < 1e-14 * s_norm) {
    throw Error(ErrorCode::SingularInnovation, "innovation covariance is numerically singular");
  }
  const Vector whitened = innovation_sqrt.triangularView<Eigen::Lower>().solve(residual);
  Vector mean = g.mean() - lower.bottomLeftCorner(n, m) * whitened;
  return {Gaussian(std::move(mean), lower.bottomRightCorner(n, n)), std::move(innovation_sqrt)};
}

Vector mixture_mean(const GaussianMixture& mixture) {
  Vector mean = Vector::Zero(mixture.dim());
  const auto& w = mixture.weights();
  for (std::size_t i = 0; i < mixture.size(); ++i) {
    mean += w[static_cast<Eigen::Index>(i)] * mixture.components()[i].mean();
  }
  return mean;
}

MixtureCovariance mixture_cov(const GaussianMixture& mixture) {
  const Eigen::Index d = mixture.dim();
  const Vector mean = mixture_mean(mixture);
  const auto& w = mixture.weights();
  Matrix pn = Matrix::Zero(d, d);
  Matrix non_pn = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < mixture.size(); ++i) {
    const auto& c = mixture.components()[i];
    const double wi = w[static_cast<Eigen::Index>(i)];
    pn += wi * c.cov();
    const Vector dev = c.mean() - mean;
    non_pn += wi * (dev * dev.transpose());
  }
  Matrix total = pn + non_pn;
  return {std::move(total), std::move(pn), std::move(non_pn)};
}

}  // namespace odeup
