#include "swarmload/errors.hpp"

namespace swarmload {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::FormatError: return "format_error";
    case Errc::NoValidReadings: return "no_valid_readings";
    case Errc::InsufficientSamples: return "insufficient_samples";
    case Errc::MissingInput: return "missing_input";
    case Errc::ProfileInvalid: return "profile_invalid";
    case Errc::ContractViolation: return "contract_violation";
    case Errc::EmptyAlignment: return "empty_alignment";
    case Errc::EmptyShift: return "empty_shift";
    case Errc::EmptyInput: return "empty_input";
    case Errc::AllocationFailed: return "allocation_failed";
    case Errc::ScenarioInvalid: return "scenario_invalid";
    case Errc::IoError: return "io_error";
  }
  return "?";
}

}  // namespace swarmload
