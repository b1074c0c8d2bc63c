#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fcgec {

enum class Errc {
  InvalidReference,
  PreconditionViolated,
  NoCommonSubstring,
  InvalidPermutation,
  CycleOrOrphan,
  InsertionTooLong,
  LengthMismatch,
  FillCountMismatch,
  DimensionMismatch,
  DegenerateMatrix,
  SchemaError,
  EmptyInput,
  InvalidUtf8,
  NotAssigned,
  TooManyReferences,
  InsufficientSubmissions,
  NotFound,
  Conflict,
};

std::string_view errc_name(Errc code);

// Every domain failure in the library is reported as an Error carrying a
// machine-readable code and, where it applies, the offending field path.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::string field_path = {})
      : std::runtime_error(message), code_(code), field_path_(std::move(field_path)) {}

  Errc code() const noexcept { return code_; }
  const std::string& field_path() const noexcept { return field_path_; }

 private:
  Errc code_;
  std::string field_path_;
};

}  // namespace fcgec
