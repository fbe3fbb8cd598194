#pragma once

#include <optional>

#include "minkembed/error.hpp"

namespace testsupport {

// Code of the minkembed::Error thrown by fn, or nullopt when nothing throws.
template <class Fn>
std::optional<minkembed::ErrorCode> code_of(Fn&& fn) {
  try {
    fn();
  } catch (const minkembed::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace testsupport
