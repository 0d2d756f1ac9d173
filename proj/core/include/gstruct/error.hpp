#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gstruct {

enum class ErrorCode {
  NotSymmetric,
  NotPositiveDefinite,
  DimensionMismatch,
  InvalidDecomposition,
  InvalidStructure,
  MissingDecomposition,
  Degenerate,
  IncompatibleInputs,
  NotPositive,
  NotInvolutive,
  InvalidTriple,
  Singular,
  UnsupportedKind,
  ModeMismatch,
  InvalidStructureAtPoint,
  DegenerateMetricAtPoint,
  ShapeMismatch,
  MissingProjection,
  IncoherentSequence,
  NotInvertible,
  NotMember,
  InvalidTolerance,
};

std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gstruct
