#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace minkembed {

enum class ErrorCode {
  InvalidInput,
  WrongSignature,
  OutOfClass,
  EpsilonMismatch,
  NearBranchDegenerate,
  AxisOutOfRange,
  SingularMetricAt,
  ShapeMismatch,
  NonFiniteState,
  PathOutOfChart,
  NotLorentzAt,
  SingularFrameAt,
  SingularFstar,
  MixedSignature,
  NotLorentzBlock,
  ChartMismatch,
  NotProper,
  UnknownFixture,
  BadParams,
  IoError,
  FormatError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. `point()` carries the linear grid
/// index for the *At errors (SingularMetricAt, NotLorentzAt, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> point = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> point() const noexcept { return point_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> point_;
};

}  // namespace minkembed
