#pragma once

#include <stdexcept>
#include <string>

namespace sglv {

// Stable machine-readable error codes. CLI front-ends print them as the
// first token on stderr, so changing a string here is a breaking change.
enum class ErrorCode {
  kArgs,        // bad command-line / config values
  kIo,          // file not found, unreadable, unwritable
  kParse,       // malformed CSV/JSON content
  kDim,         // dimension mismatch between inputs
  kRange,       // out-of-range or non-finite numeric input
  kSingular,    // linear system singular to tolerance
  kCollinear,   // rank-deficient regression design
  kExplosion,   // simulated state overflowed
  kSolver,      // LP / iterative solver failure
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kArgs: return "E_ARGS";
    case ErrorCode::kIo: return "E_IO";
    case ErrorCode::kParse: return "E_PARSE";
    case ErrorCode::kDim: return "E_DIM";
    case ErrorCode::kRange: return "E_RANGE";
    case ErrorCode::kSingular: return "E_SINGULAR";
    case ErrorCode::kCollinear: return "E_COLLINEAR";
    case ErrorCode::kExplosion: return "E_EXPLOSION";
    case ErrorCode::kSolver: return "E_SOLVER";
  }
  return "E_UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }
  const char* code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace sglv
