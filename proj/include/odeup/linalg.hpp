/**
 * @file linalg.hpp
 * @brief Dense linear-algebra helpers for square-root covariance arithmetic.
 */
#pragma once

#include <Eigen/Dense>

namespace odeup {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace linalg {

/// Lower-triangular L (nonnegative diagonal) with L Lᵀ = B Bᵀ for any
/// n×k factor B. Computed from a QR decomposition of Bᵀ, so B Bᵀ is never
/// formed.
[[nodiscard]] Matrix triangularize(const Matrix& factor);

/// Lower-triangular factor of a symmetric positive semidefinite matrix.
/// Rank-deficient inputs produce zero pivots. Throws NonPSD when the input
/// is asymmetric or indefinite beyond `tol` (relative to its norm).
[[nodiscard]] Matrix psd_factor(const Matrix& cov, double tol = 1e-10);

/// ‖A − B‖_F / max(‖B‖_F, tiny).
[[nodiscard]] double relative_frobenius(const Matrix& a, const Matrix& b);

[[nodiscard]] bool is_lower_triangular(const Matrix& m);

/// Kronecker product I_d ⊗ block.
[[nodiscard]] Matrix kron_identity(Eigen::Index d, const Matrix& block);

}  // namespace linalg
}  // namespace odeup
