/**
 * @file error.hpp
 * @brief Error type shared by all odeup modules.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace odeup {

enum class ErrorCode {
  NonPSD,
  ShapeMismatch,
  SingularInnovation,
  NonPositiveStep,
  OrderOutOfRange,
  UnknownProblem,
  DimensionMismatch,
  UnsupportedOrder,
  DegenerateResidual,
  SingularPrediction,
  DimensionTooLarge,
  InvalidArgument,
  NonFiniteState,
  StepFailed,
  NodeSolveFailed,
  MixtureGridMismatch,
};

[[nodiscard]] const char* to_string(ErrorCode code);

/// Thrown by every numerical routine in the library. `index` carries the
/// grid point, quadrature node or Monte Carlo sample the failure refers to.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<std::size_t> index = std::nullopt);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace odeup
