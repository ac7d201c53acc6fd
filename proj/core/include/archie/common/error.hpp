#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace archie {

enum class ErrorCode {
  kInvalidConfig,
  kUnknownEnv,
  kEpisodeExhausted,
  kNotReset,
  kSyntax,
  kDuplicateComponent,
  kMissingSuccess,
  kUnboundSpec,
  kNonFinite,
  kShapeMismatch,
  kInconsistentEpisode,
  kFixtureMiss,
  kAuthMissing,
  kNetwork,
  kNoCodeBlock,
  kEmptyTask,
  kCheckpointFormat,
  kRaggedGrid,
  kIo,
  kParse,
};

std::string_view to_string(ErrorCode code);

// Base exception for everything thrown by the library. The code lets the CLI
// map failures onto exit statuses without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Syntax errors carry a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, const std::string& message, int line, int column)
      : Error(code, format(message, line, column)), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& message, int line, int column) {
    return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
  }

  int line_;
  int column_;
};

}  // namespace archie
