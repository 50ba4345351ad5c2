#include "patchseg/errors.hpp"

namespace patchseg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::InvalidMaskValues: return "InvalidMaskValues";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::PatchLargerThanImage: return "PatchLargerThanImage";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::InvalidSigma: return "InvalidSigma";
    case ErrorCode::MissingPatch: return "MissingPatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ScorerError: return "ScorerError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::EpochOutOfRange: return "EpochOutOfRange";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::SingleDomain: return "SingleDomain";
    case ErrorCode::WrongModelCount: return "WrongModelCount";
    case ErrorCode::IdSetMismatch: return "IdSetMismatch";
    case ErrorCode::UnknownPatch: return "UnknownPatch";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::ScorerCrashed: return "ScorerCrashed";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::ProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case ErrorCode::InvalidManifest: return "InvalidManifest";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace patchseg
