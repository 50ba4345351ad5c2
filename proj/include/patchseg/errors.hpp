#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace patchseg {

enum class ErrorCode {
  FileNotFound,
  UnsupportedFormat,
  InvalidMaskValues,
  IoError,
  InvalidArgument,
  PatchLargerThanImage,
  OutOfBounds,
  InvalidSigma,
  MissingPatch,
  ShapeMismatch,
  ScorerError,
  DimensionMismatch,
  EmptyIndex,
  EpochOutOfRange,
  InvalidProbability,
  EmptyInput,
  SingleDomain,
  WrongModelCount,
  IdSetMismatch,
  UnknownPatch,
  ProtocolError,
  ScorerCrashed,
  Timeout,
  ProbabilityOutOfRange,
  InvalidManifest,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above so
// callers (and the CLI's exit-code mapping) can branch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace patchseg
