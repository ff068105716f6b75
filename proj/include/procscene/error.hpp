// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace procscene {

enum class ErrorCode {
  kInvalidArgument = 1,
  kDegenerate = 2,
  kIo = 3,
  kFormat = 4,
  kInvariant = 5,
  kNotFound = 6,
};

/// Single exception type thrown by the core. The C API maps `code()` onto
/// its status enum, so keep the two in sync.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace procscene
