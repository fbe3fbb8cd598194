#include "minkembed/error.hpp"

namespace minkembed {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::WrongSignature: return "WrongSignature";
    case ErrorCode::OutOfClass: return "OutOfClass";
    case ErrorCode::EpsilonMismatch: return "EpsilonMismatch";
    case ErrorCode::NearBranchDegenerate: return "NearBranchDegenerate";
    case ErrorCode::AxisOutOfRange: return "AxisOutOfRange";
    case ErrorCode::SingularMetricAt: return "SingularMetricAt";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::PathOutOfChart: return "PathOutOfChart";
    case ErrorCode::NotLorentzAt: return "NotLorentzAt";
    case ErrorCode::SingularFrameAt: return "SingularFrameAt";
    case ErrorCode::SingularFstar: return "SingularFstar";
    case ErrorCode::MixedSignature: return "MixedSignature";
    case ErrorCode::NotLorentzBlock: return "NotLorentzBlock";
    case ErrorCode::ChartMismatch: return "ChartMismatch";
    case ErrorCode::NotProper: return "NotProper";
    case ErrorCode::UnknownFixture: return "UnknownFixture";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> point)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      point_(point) {}

}  // namespace minkembed
