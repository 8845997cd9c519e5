#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmalign {

enum class ErrorCode {
  // timeline
  EmptyStream,
  MixedPayload,
  OverlappingWords,
  NegativeInterval,
  DuplicateId,
  SessionMismatch,
  ModalityMismatch,
  ModalityAbsent,
  // pitch
  AudioTooShort,
  InvalidRange,
  InvalidParameters,
  DegenerateSpeaker,
  // gaze
  UnsortedSamples,
  // latent
  DimensionMismatch,
  RankDeficient,
  IncompleteQuery,
  InvalidQuery,
  // stats
  RankDeficientDesign,
  EmptyPanel,
  SingleGroup,
  InsufficientData,
  UnknownRegressor,
  EmptyVocabulary,
  NonPositivePrior,
  MissingPartyMetadata,
  // ingest
  ParseError,
  AngleOutOfRange,
  MissingFile,
  VersionMismatch,
  InvalidSpec,
  IoError,
  // cli
  InvalidConfig,
};

/// Stable name used in diagnostics and CLI error output.
std::string_view error_name(ErrorCode code) noexcept;

/// True for errors caused by invalid caller input (flags, config, queries)
/// rather than by the data being processed.
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mmalign
