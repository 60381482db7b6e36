#include "odeup/error.hpp"

namespace odeup {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPSD: return "NonPSD";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SingularInnovation: return "SingularInnovation";
    case ErrorCode::NonPositiveStep: return "NonPositiveStep";
    case ErrorCode::OrderOutOfRange: return "OrderOutOfRange";
    case ErrorCode::UnknownProblem: return "UnknownProblem";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::DegenerateResidual: return "DegenerateResidual";
    case ErrorCode::SingularPrediction: return "SingularPrediction";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::StepFailed: return "StepFailed";
    case ErrorCode::NodeSolveFailed: return "NodeSolveFailed";
    case ErrorCode::MixtureGridMismatch: return "MixtureGridMismatch";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& message, std::optional<std::size_t> index) {
  std::string out = to_string(code);
  if (index) {
    out += "[" + std::to_string(*index) + "]";
  }
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> index)
    : std::runtime_error(format_message(code, message, index)), code_(code), index_(index) {}

}  // namespace odeup
