#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lsq {

enum class ErrorCode {
  NegativeWeight,
  BadSum,
  DimensionMismatch,
  Unsampleable,
  OffSupportPoint,
  InteriorRequired,
  InconsistentRatios,
  BadPair,
  NotRefinable,
  Inconsistent,
  NotStandardizable,
  DegenerateRegions,
  NonPositive,
  QuadratureFailure,
  InconsistentPoint,
  EmptyClass,
  NoCrossing,
  Config,
  Data,
  Protocol,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; `code()` carries the contract-level
// error kind so callers (and the CLI exit-code mapping) can dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lsq
