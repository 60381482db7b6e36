#include "odeup/prior.hpp"

#include <cmath>

#include "odeup/error.hpp"

namespace odeup {

namespace {

double factorial(int n) {
  double out = 1.0;
  for (int k = 2; k <= n; ++k) {
    out *= k;
  }
  return out;
}

void require_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::NonPositiveStep, "step size must be positive and finite");
  }
}

Matrix unit_noise_1d(int q, double h) {
  Matrix out(q + 1, q + 1);
  for (int i = 0; i <= q; ++i) {
    for (int j = 0; j <= q; ++j) {
      const int p = 2 * q + 1 - i - j;
      out(i, j) = std::pow(h, p) / (p * factorial(q - i) * factorial(q - j));
    }
  }
  return out;
}

}  // namespace

IWPPrior::IWPPrior(int d_, int q_, double kappa2_) : d(d_), q(q_), kappa2(kappa2_) {
  if (d < 1 || q < 1) {
    throw Error(ErrorCode::InvalidArgument, "prior needs d ≥ 1 and q ≥ 1");
  }
  if (!(kappa2 > 0.0) || !std::isfinite(kappa2)) {
    throw Error(ErrorCode::InvalidArgument, "diffusion kappa2 must be positive");
  }
}

Matrix transition(const IWPPrior& prior, double h) {
  require_step(h);
  const int q = prior.q;
  Matrix block = Matrix::Zero(q + 1, q + 1);
  for (int i = 0; i <= q; ++i) {
    for (int j = i; j <= q; ++j) {
      block(i, j) = std::pow(h, j - i) / factorial(j - i);
    }
  }
  return linalg::kron_identity(prior.d, block);
}

Matrix process_noise(const IWPPrior& prior, double h) {
  require_step(h);
  return linalg::kron_identity(prior.d, prior.kappa2 * unit_noise_1d(prior.q, h));
}

Matrix process_noise_sqrt(const IWPPrior& prior, double h) {
  require_step(h);
  const int q = prior.q;
  // Q̆(1) is a Hilbert-like matrix, positive definite for every q.
  const Matrix base = Eigen::LLT<Matrix>(unit_noise_1d(q, 1.0)).matrixL();
  Vector scale(q + 1);
  for (int i = 0; i <= q; ++i) {
    scale[i] = std::pow(h, q - i + 0.5);
  }
  const Matrix block = std::sqrt(prior.kappa2) * (scale.asDiagonal() * base);
  return linalg::kron_identity(prior.d, block);
}

Matrix projection(const IWPPrior& prior, int order) {
  if (order < 0 || order > prior.q) {
    throw Error(ErrorCode::OrderOutOfRange, "projection order must lie in [0, q]");
  }
  Matrix unit = Matrix::Zero(1, prior.q + 1);
  unit(0, order) = 1.0;
  return linalg::kron_identity(prior.d, unit);
}

}  // namespace odeup
