#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bvx {

enum class ErrorKind {
  invalid_spec,
  shape_mismatch,
  zero_wavevector,
  nonsolenoidal,
  nonzero_mean,
  nonzero_barotropic,
  tail_mass,
  extrapolation,
  nan_detected,
  nonpositive_values,
  insufficient_samples,
  undersampled,
  missing_split,
  parse_error,
  validation_error,
  corrupt_file,
  version_mismatch,
  io_error,
  unknown_experiment,
};

std::string_view to_string(ErrorKind kind);

/// Library-wide exception. Every failure raised by bvx carries a kind so the
/// CLI can map it onto an exit code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace bvx
