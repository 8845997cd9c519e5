#pragma once

// Fundamental frequency estimation (cumulative-mean-normalized difference
// function with absolute threshold and parabolic refinement), per-word
// aggregation on the session clock, and per-speaker standardization.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmalign/timeline.hpp"

namespace mmalign::pitch {

struct AudioBuffer {
  std::vector<double> samples;  // in [-1, 1]
  int sample_rate = 16000;

  double duration() const noexcept {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

/// Search band in Hz; 0 < floor < ceiling.
struct PitchRange {
  double floor = 75.0;
  double ceiling = 300.0;
};

/// Band for male speakers, 75-300 Hz.
inline constexpr PitchRange kMaleRange{75.0, 300.0};
/// Band for female speakers, 100-500 Hz.
inline constexpr PitchRange kFemaleRange{100.0, 500.0};

struct PitchParams {
  std::size_t frame_length = 2048;  // samples
  std::size_t hop = 512;            // samples
  double threshold = 0.15;          // absolute threshold on the normalized difference
};

struct PitchFrame {
  double time = 0.0;          // frame center, seconds
  std::optional<double> f0;   // Hz; empty when unvoiced

  bool voiced() const noexcept { return f0.has_value(); }
};

struct PitchTrack {
  std::string session_id;
  double hop_seconds = 0.0;
  std::vector<PitchFrame> frames;

  std::size_t voiced_count() const noexcept;
};

/// Frame-wise f0 over the whole buffer. Frame i covers samples
/// [i*hop, i*hop + frame_length); its center is the frame time.
/// Throws InvalidRange, InvalidParameters and AudioTooShort.
PitchTrack estimate_pitch_track(const AudioBuffer& audio, const PitchRange& range,
                                const PitchParams& params = {}, std::string session_id = {});

/// Same frames, but only those centered inside one of `only_within` are
/// analyzed; the others stay unvoiced. Word pitch over the same intervals
/// is unchanged.
PitchTrack estimate_pitch_track(const AudioBuffer& audio, const PitchRange& range,
                                const PitchParams& params, std::string session_id,
                                std::span<const timeline::TimeInterval> only_within);

/// f0 for a single frame of exactly params.frame_length samples.
std::optional<double> estimate_frame_f0(std::span<const double> frame, int sample_rate,
                                        const PitchRange& range, double threshold);

struct WordPitch {
  std::string word_id;
  std::string speaker_id;
  std::string session_id;
  std::optional<double> mean_f0;  // empty when the word has no voiced frame
  std::size_t voiced_frame_count = 0;
  std::optional<double> z;
};

struct WordPitchResult {
  std::vector<WordPitch> words;  // same order as the word stream
  std::size_t missing = 0;       // words without any voiced frame
};

/// Mean f0 over voiced frames whose center lies in each word's interval.
/// Throws SessionMismatch and ModalityMismatch (words must be Text).
WordPitchResult word_pitch(const PitchTrack& track, const timeline::ElementStream& words);

enum class StandardizeScope {
  PerSpeaker,         // one mean/SD per speaker over the whole corpus
  PerSpeakerSession,  // one mean/SD per (speaker, session)
};

/// Fills z = (mean_f0 - group mean) / group sample SD for every non-missing
/// word. Missing words keep an empty z. Throws DegenerateSpeaker when a group
/// has fewer than two observations or zero variance.
std::vector<WordPitch> standardize_by_speaker(std::vector<WordPitch> word_pitches,
                                              StandardizeScope scope = StandardizeScope::PerSpeaker);

}  // namespace mmalign::pitch
