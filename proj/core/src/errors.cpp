#include "rpif/errors.hpp"

namespace rpif {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroQ: return "ZeroQ";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::BadGrid: return "BadGrid";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::ConjugatePoint: return "ConjugatePoint";
    case ErrorCode::CausticOnWindow: return "CausticOnWindow";
    case ErrorCode::SingularSlice: return "SingularSlice";
  }
  return "Unknown";
}

}  // namespace rpif
