#include "mmalign/error.hpp"

namespace mmalign {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyStream: return "EmptyStream";
    case ErrorCode::MixedPayload: return "MixedPayload";
    case ErrorCode::OverlappingWords: return "OverlappingWords";
    case ErrorCode::NegativeInterval: return "NegativeInterval";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::SessionMismatch: return "SessionMismatch";
    case ErrorCode::ModalityMismatch: return "ModalityMismatch";
    case ErrorCode::ModalityAbsent: return "ModalityAbsent";
    case ErrorCode::AudioTooShort: return "AudioTooShort";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::DegenerateSpeaker: return "DegenerateSpeaker";
    case ErrorCode::UnsortedSamples: return "UnsortedSamples";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::IncompleteQuery: return "IncompleteQuery";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::RankDeficientDesign: return "RankDeficientDesign";
    case ErrorCode::EmptyPanel: return "EmptyPanel";
    case ErrorCode::SingleGroup: return "SingleGroup";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::UnknownRegressor: return "UnknownRegressor";
    case ErrorCode::EmptyVocabulary: return "EmptyVocabulary";
    case ErrorCode::NonPositivePrior: return "NonPositivePrior";
    case ErrorCode::MissingPartyMetadata: return "MissingPartyMetadata";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::AngleOutOfRange: return "AngleOutOfRange";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "UnknownError";
}

bool is_validation_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidRange:
    case ErrorCode::InvalidParameters:
    case ErrorCode::IncompleteQuery:
    case ErrorCode::InvalidQuery:
    case ErrorCode::UnknownRegressor:
    case ErrorCode::NonPositivePrior:
    case ErrorCode::InvalidSpec:
    case ErrorCode::InvalidConfig:
    case ErrorCode::ModalityAbsent:
      return true;
    default:
      return false;
  }
}

}  // namespace mmalign
