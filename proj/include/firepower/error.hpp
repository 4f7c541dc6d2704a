// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace firepower {

enum class ErrorKind {
  kParse,
  kSchema,
  kAlias,
  kDuplicate,
  kValidation,
  kInvalidArgument,
  kDimensionMismatch,
  kMissingData,
};

const char* to_string(ErrorKind kind);

// All library failures surface as this exception; the kind lets callers map
// them onto exit codes or Python exception types.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace firepower
