#pragma once

// File formats, the on-disk corpus index and synthetic corpora with planted
// ground truth.
//
//   transcript  JSON Lines: {"word", "start", "end", "speaker_id"[, "id"]}
//   gaze        CSV: t,yaw_deg,pitch_deg,frontal
//   speakers    CSV: speaker_id,party,gender
//   audio       WAV, PCM 16-bit little-endian; stereo is averaged to mono
//   manifest    JSON: {"format_version", "speakers", "sessions": [...]}

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmalign/gaze.hpp"
#include "mmalign/pitch.hpp"
#include "mmalign/stats.hpp"
#include "mmalign/timeline.hpp"

namespace mmalign::ingest {

namespace fs = std::filesystem;

inline constexpr int kFormatVersion = 1;

struct SpeakerInfo {
  std::string speaker_id;
  std::string party;
  char gender = 'm';  // 'm' or 'f'

  /// Search band for the speaker's voice.
  pitch::PitchRange range() const noexcept {
    return gender == 'f' ? pitch::kFemaleRange : pitch::kMaleRange;
  }
};

using SpeakerTable = std::map<std::string, SpeakerInfo>;

/// Everything recorded for one speech.
struct SessionData {
  std::string session_id;
  std::string speaker_id;
  timeline::ElementStream words;
  pitch::AudioBuffer audio;
  std::vector<gaze::GazeSample> gaze;
};

struct ManifestSession {
  std::string session_id;
  fs::path transcript;
  fs::path audio;
  fs::path gaze;
  std::string speaker_id;
};

struct CorpusManifest {
  int format_version = kFormatVersion;
  fs::path speakers;
  std::vector<ManifestSession> sessions;
};

/// Relative paths are resolved against the manifest's directory.
/// Throws ParseError, VersionMismatch and MissingFile.
CorpusManifest load_manifest(const fs::path& path);
void write_manifest(const fs::path& path, const CorpusManifest& manifest);

/// Throws ParseError (with line number) and OverlappingWords.
timeline::ElementStream load_transcript(const fs::path& path, const std::string& session_id);
void write_transcript(const fs::path& path, const timeline::ElementStream& words);

/// Rows sorted by time. Throws ParseError and AngleOutOfRange.
std::vector<gaze::GazeSample> load_gaze(const fs::path& path);
void write_gaze(const fs::path& path, const std::vector<gaze::GazeSample>& samples);

SpeakerTable load_speakers(const fs::path& path);
void write_speakers(const fs::path& path, const SpeakerTable& speakers);

/// Sample value x maps to x / 32768. Throws ParseError.
pitch::AudioBuffer read_wav(const fs::path& path);
/// Clamps to [-1, 1] and rounds to the nearest PCM16 code.
void write_wav(const fs::path& path, const pitch::AudioBuffer& audio);

/// Panel CSV with a header row. `y_column` and `group_column` name the
/// outcome and grouping columns; `regressors` the columns used as regressors
/// (all other columns are ignored). Throws ParseError.
stats::Panel load_panel(const fs::path& path, const std::string& y_column,
                        const std::string& group_column, const std::vector<std::string>& regressors);
/// Columns: y, group, then one column per regressor.
void write_panel(const fs::path& path, const stats::Panel& panel);

/// CSV `word,count`. Throws ParseError.
stats::WordCounts load_counts(const fs::path& path);

/// Parses all files referenced by the manifest.
std::vector<SessionData> load_sessions(const CorpusManifest& manifest);

/// Writes per-session blobs plus a top-level manifest.json into `out_dir`,
/// via a temporary sibling directory that is renamed into place. Output
/// bytes depend only on the inputs.
void build_index(const fs::path& manifest_path, const fs::path& out_dir);

/// Read-only view of an index directory; sessions load on demand.
class CorpusIndex {
 public:
  /// Throws MissingFile, ParseError and VersionMismatch.
  static CorpusIndex open(const fs::path& dir);

  const std::vector<std::string>& session_ids() const noexcept { return session_ids_; }
  const SpeakerTable& speakers() const noexcept { return speakers_; }
  SessionData load_session(const std::string& session_id) const;
  std::vector<SessionData> load_all() const;

 private:
  fs::path dir_;
  std::vector<std::string> session_ids_;
  SpeakerTable speakers_;
};

struct SynthSpec {
  std::uint64_t seed = 7;
  std::size_t speakers = 10;
  std::size_t words_per_speech = 2000;
  double planted_effect = 0.15;  // speaker-SD units
  double address_density = 0.3;  // target fraction of words inside segments
  std::vector<std::string> parties = {"AfD", "CDU/CSU", "SPD", "FDP", "Greens", "Left"};
  std::string target_party = "AfD";
  int sample_rate = 16000;
  double gaze_rate = 25.0;  // samples per second
};

/// Throws InvalidSpec.
void validate(const SynthSpec& spec);

struct TruthSpeaker {
  std::string speaker_id;
  std::string party;
  char gender = 'm';
  double baseline_hz = 0.0;
  double sd_hz = 0.0;
};

struct TruthSession {
  std::string session_id;
  std::vector<timeline::TimeInterval> segments;
  std::vector<std::string> addressed_word_ids;
  std::map<std::string, double> word_f0;  // planted frequency per word id
};

struct GroundTruth {
  SynthSpec spec;
  std::vector<TruthSpeaker> speakers;
  std::vector<TruthSession> sessions;
};

struct SyntheticCorpus {
  SpeakerTable speakers;
  std::vector<SessionData> sessions;
  GroundTruth truth;
};

/// Deterministic in the seed. One speech per speaker. Each word is a pure
/// tone; inside planted address segments tones of non-target speakers are
/// raised by planted_effect speaker SDs and gaze yaw sits in 50-65 degrees.
SyntheticCorpus generate_synthetic(const SynthSpec& spec);

/// generate_synthetic plus all files: manifest.json, speakers.csv and per
/// session transcript/audio/gaze, and ground_truth.json.
SyntheticCorpus synth_corpus(const SynthSpec& spec, const fs::path& out_dir);

}  // namespace mmalign::ingest
