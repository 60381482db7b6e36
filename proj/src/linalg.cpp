#include "odeup/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "odeup/error.hpp"

namespace odeup::linalg {

Matrix triangularize(const Matrix& factor) {
  const Eigen::Index n = factor.rows();
  const Eigen::Index k = factor.cols();
  Matrix lower = Matrix::Zero(n, n);
  if (n == 0 || k == 0) {
    return lower;
  }
  Eigen::HouseholderQR<Matrix> qr(factor.transpose());
  const Eigen::Index r = std::min(n, k);
  const Matrix upper = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  lower.leftCols(r) = upper.transpose();
  for (Eigen::Index j = 0; j < r; ++j) {
    if (lower(j, j) < 0.0) {
      lower.col(j) = -lower.col(j);
    }
  }
  return lower;
}

Matrix psd_factor(const Matrix& cov, double tol) {
  if (cov.rows() != cov.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "covariance must be square");
  }
  const Eigen::Index n = cov.rows();
  if (n == 0) {
    return Matrix(0, 0);
  }
  if (!cov.allFinite()) {
    throw Error(ErrorCode::NonPSD, "covariance has non-finite entries");
  }
  const double norm = cov.norm();
  if ((cov - cov.transpose()).norm() > tol * std::max(1.0, norm)) {
    throw Error(ErrorCode::NonPSD, "covariance is not symmetric");
  }
  const Matrix sym = 0.5 * (cov + cov.transpose());

  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() == Eigen::Success) {
    Matrix lower = llt.matrixL();
    if ((lower.diagonal().array() > 0.0).all()) {
      return lower;
    }
  }

  // Semidefinite path: cov = V Λ Vᵀ = (V Λ^½)(V Λ^½)ᵀ, then triangularize.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::NonPSD, "eigendecomposition failed");
  }
  const Vector& lambda = eig.eigenvalues();
  if (lambda.minCoeff() < -tol * norm) {
    throw Error(ErrorCode::NonPSD, "covariance has a negative eigenvalue");
  }
  const Vector root = lambda.cwiseMax(0.0).cwiseSqrt();
  return triangularize(eig.eigenvectors() * root.asDiagonal());
}

double relative_frobenius(const Matrix& a, const Matrix& b) {
  const double denom = std::max(b.norm(), std::numeric_limits<double>::min());
  return (a - b).norm() / denom;
}

bool is_lower_triangular(const Matrix& m) {
  for (Eigen::Index j = 1; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < std::min(j, m.rows()); ++i) {
      if (m(i, j) != 0.0) {
        return false;
      }
    }
  }
  return true;
}

Matrix kron_identity(Eigen::Index d, const Matrix& block) {
  Matrix out = Matrix::Zero(d * block.rows(), d * block.cols());
  for (Eigen::Index i = 0; i < d; ++i) {
    out.block(i * block.rows(), i * block.cols(), block.rows(), block.cols()) = block;
  }
  return out;
}

}  // namespace odeup::linalg
