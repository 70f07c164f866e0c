#pragma once

#include <stdexcept>
#include <string>

namespace tractlab {

// Error conditions named by the operation contracts. The CLI maps these to
// exit codes; library callers catch Error and switch on code().
enum class ErrorCode {
  WindowTooCoarse,
  SeedBelowThreshold,
  OutsideWindow,
  CircleMissesTract,
  OutOfRange,
  NotExpanding,
  ExpansionTooWeak,
  ImageEscapesWindow,
  PreconditionViolated,
  DerivativeUnstable,
  ParseError,
  EmptyEquation,
  InsufficientTerms,
  NoKappaCandidates,
  UnknownModel,
  TractNotFound,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* errorCodeName(ErrorCode c) {
  switch (c) {
    case ErrorCode::WindowTooCoarse: return "WindowTooCoarse";
    case ErrorCode::SeedBelowThreshold: return "SeedBelowThreshold";
    case ErrorCode::OutsideWindow: return "OutsideWindow";
    case ErrorCode::CircleMissesTract: return "CircleMissesTract";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotExpanding: return "NotExpanding";
    case ErrorCode::ExpansionTooWeak: return "ExpansionTooWeak";
    case ErrorCode::ImageEscapesWindow: return "ImageEscapesWindow";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::DerivativeUnstable: return "DerivativeUnstable";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyEquation: return "EmptyEquation";
    case ErrorCode::InsufficientTerms: return "InsufficientTerms";
    case ErrorCode::NoKappaCandidates: return "NoKappaCandidates";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::TractNotFound: return "TractNotFound";
  }
  return "Unknown";
}

}  // namespace tractlab
