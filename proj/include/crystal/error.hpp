#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace crystal {

enum class ErrorKind {
  InvalidInput,
  NotExpanding,
  NotNormalizing,
  DigitSearchFailed,
  NotSymmetric,
  GridTooSmall,
  GridTooCoarse,
  GridIncompatibleGroup,
  NonConvergent,
  CombinatorialBlowup,
  DimensionMismatch,
  NotATileDecomposition,
  PieceCountMismatch,
  NotConstantPolyphase,
  ScalingNotOrthonormal,
  CompletionFailed,
  BoxUnderflow,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

// Every failure carries a kind and a machine-readable witness so the CLI
// can report which identity failed, where, and by how much.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, nlohmann::json witness = {})
      : std::runtime_error(message), kind_(kind), witness_(std::move(witness)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const nlohmann::json& witness() const noexcept { return witness_; }

 private:
  ErrorKind kind_;
  nlohmann::json witness_;
};

}  // namespace crystal
