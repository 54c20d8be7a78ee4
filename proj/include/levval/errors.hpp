#pragma once

#include <stdexcept>
#include <string>

namespace levval {

enum class Errc {
  InvalidInput,
  NotPositiveDefinite,
  RankDeficient,
  InvalidLambda,
  DimensionMismatch,
  InvalidBudget,
  TooManyPlayers,
  InvalidRange,
  EmptyPlan,
  NotRealizable,
  ConfigInvalid,
  ParseError,
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::InvalidInput: return "InvalidInput";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::InvalidLambda: return "InvalidLambda";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidBudget: return "InvalidBudget";
    case Errc::TooManyPlayers: return "TooManyPlayers";
    case Errc::InvalidRange: return "InvalidRange";
    case Errc::EmptyPlan: return "EmptyPlan";
    case Errc::NotRealizable: return "NotRealizable";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::ParseError: return "ParseError";
  }
  return "UnknownError";
}

/// Domain error carrying a stable code so callers can map failures to
/// exit codes or structured diagnostics without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace levval
