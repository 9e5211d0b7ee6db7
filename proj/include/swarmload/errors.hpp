#pragma once

#include <stdexcept>
#include <string>

namespace swarmload {

enum class Errc {
  FormatError,        // unusable input stream or document
  NoValidReadings,    // channel repair with zero valid samples
  InsufficientSamples,
  MissingInput,       // an estimator input channel is unavailable
  ProfileInvalid,
  ContractViolation,  // caller broke a precondition
  EmptyAlignment,
  EmptyShift,
  EmptyInput,
  AllocationFailed,
  ScenarioInvalid,
  IoError,
};

std::string_view to_string(Errc code);

/// Library-wide exception; `code()` drives CLI exit-status mapping.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace swarmload
