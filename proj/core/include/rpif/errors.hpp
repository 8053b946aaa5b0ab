#pragma once

#include <stdexcept>
#include <string>

namespace rpif {

/// Failure categories raised by the library. The CLI maps these onto exit codes.
enum class ErrorCode {
  InvalidArgument,
  ZeroQ,
  OutOfRange,
  BadGrid,
  ToleranceNotMet,
  ConjugatePoint,
  CausticOnWindow,
  SingularSlice,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for the conditions that signal a genuine numerical singularity of the
  /// problem (caustics, failed step control) rather than bad input.
  bool is_numerical() const noexcept {
    switch (code_) {
      case ErrorCode::ToleranceNotMet:
      case ErrorCode::ConjugatePoint:
      case ErrorCode::CausticOnWindow:
      case ErrorCode::SingularSlice:
      case ErrorCode::ZeroQ:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace rpif
