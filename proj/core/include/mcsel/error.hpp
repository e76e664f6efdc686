#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcsel {

enum class Errc {
  kInvalidArgument,
  kDimensionMismatch,
  kNotPositiveDefinite,
  kEmptyInput,
  kAcceptanceTooLow,
  kPartitionTooLarge,
  kEmptyCandidates,
  kFileNotFound,
  kParseError,
  kConfigError,
  kNumericalFailure,
};

std::string_view to_string(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// front ends can map it onto a stable exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace mcsel
