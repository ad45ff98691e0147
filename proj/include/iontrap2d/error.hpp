#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace iontrap2d {

enum class ErrorCode {
  InvalidArgument = 1,
  InvalidParams,
  NegativeRadialStiffness,
  NoConvergence,
  PlanarityLost,
  DegenerateGeometry,
  MismatchedN,
  BracketFailure,
  InsufficientPoints,
  ResonantDetuning,
  InsufficientPairs,
  IndexOutOfRange,
  TooLarge,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

// All library failures are reported through this exception type. Solvers that
// give up attach the best residual they reached.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<double> residual = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<double> residual() const noexcept { return residual_; }

 private:
  ErrorCode code_;
  std::optional<double> residual_;
};

}  // namespace iontrap2d
