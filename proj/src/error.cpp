#include "iontrap2d/error.hpp"

namespace iontrap2d {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::NegativeRadialStiffness: return "NegativeRadialStiffness";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::PlanarityLost: return "PlanarityLost";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::MismatchedN: return "MismatchedN";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::ResonantDetuning: return "ResonantDetuning";
    case ErrorCode::InsufficientPairs: return "InsufficientPairs";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<double> residual)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      residual_(residual) {}

}  // namespace iontrap2d
