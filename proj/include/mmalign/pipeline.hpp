#pragma once

// End-to-end composition: pitch per word, address segments, word/segment
// alignment and the regression panel built from them.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmalign/gaze.hpp"
#include "mmalign/ingest.hpp"
#include "mmalign/pitch.hpp"
#include "mmalign/stats.hpp"
#include "mmalign/timeline.hpp"

namespace mmalign::pipeline {

struct PipelineConfig {
  pitch::PitchParams pitch;
  std::optional<pitch::PitchRange> range_override;  // otherwise from speaker gender
  pitch::StandardizeScope scope = pitch::StandardizeScope::PerSpeaker;
  gaze::AddressRule rule;
  std::optional<double> gaze_period;  // seconds; median spacing when absent
  std::string target_party = "AfD";
  double min_overlap = 0.0;  // seconds
  unsigned threads = 1;
};

struct SessionAnalysis {
  std::string session_id;
  std::string speaker_id;
  pitch::WordPitchResult word_pitch;       // z not yet filled
  std::vector<gaze::AddressSegment> raw_segments;
  std::vector<gaze::AddressSegment> segments;  // after the word minimum
  std::vector<bool> addressed;                 // per word
};

struct CorpusAnalysis {
  std::vector<SessionAnalysis> sessions;
  std::vector<pitch::WordPitch> standardized;  // all words, session order
  std::size_t missing_words = 0;
};

/// Pitch tracking, segmentation and standardization for every session.
/// Sessions run in parallel when config.threads > 1; output order follows
/// the input order. Throws MissingPartyMetadata for unknown speakers.
CorpusAnalysis analyze(std::span<const ingest::SessionData> sessions,
                       const ingest::SpeakerTable& speakers, const PipelineConfig& config);

/// Word-pitch only (no standardization), for callers that need the
/// per-session result.
SessionAnalysis analyze_session(const ingest::SessionData& session,
                                const ingest::SpeakerTable& speakers, const PipelineConfig& config);

std::string looks_name(const std::string& target_party);
std::string interaction_name(const std::string& party, const std::string& target_party);

/// y = standardized pitch, group = speaker; regressors: looks_at_<target>
/// plus party[P]:looks_at_<target> for each non-target party that has at
/// least one addressing word. Words with missing pitch are dropped.
stats::Panel build_panel(const CorpusAnalysis& analysis, const ingest::SpeakerTable& speakers,
                         const std::string& target_party);

/// Two cells per party present in the panel: addressing the target and
/// addressing others (the latter is the within-speaker baseline, 0).
std::vector<stats::MarginCell> party_cells(const stats::RegressionResult& result,
                                           const ingest::SpeakerTable& speakers,
                                           const std::string& target_party);

/// Address segments for the query engine, one Derived stream per session
/// with at least one retained segment.
std::vector<timeline::ElementStream> segment_streams(const CorpusAnalysis& analysis);

}  // namespace mmalign::pipeline
