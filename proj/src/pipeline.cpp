#include "mmalign/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <set>
#include <thread>

#include "mmalign/error.hpp"

namespace mmalign::pipeline {

SessionAnalysis analyze_session(const ingest::SessionData& session,
                                const ingest::SpeakerTable& speakers, const PipelineConfig& config) {
  const auto spk = speakers.find(session.speaker_id);
  if (spk == speakers.end()) {
    throw Error(ErrorCode::MissingPartyMetadata, "speaker '" + session.speaker_id + "' is not in the speaker table");
  }
  SessionAnalysis a;
  a.session_id = session.session_id;
  a.speaker_id = session.speaker_id;

  const auto range = config.range_override.value_or(spk->second.range());
  std::vector<timeline::TimeInterval> spans;
  spans.reserve(session.words.size());
  for (const auto& w : session.words.elements()) spans.push_back(w.interval);
  const auto track = pitch::estimate_pitch_track(session.audio, range, config.pitch, session.session_id, spans);
  a.word_pitch = pitch::word_pitch(track, session.words);

  a.raw_segments = gaze::detect_address_segments(session.gaze, config.rule, config.gaze_period);
  a.segments = gaze::enforce_min_words(a.raw_segments, session.session_id, session.words, config.rule);

  a.addressed.assign(session.words.size(), false);
  if (!a.segments.empty()) {
    const auto seg_stream = gaze::to_stream(a.segments, session.session_id, session.speaker_id);
    for (const auto& [i, j] : timeline::join_elements(session.words.elements(), seg_stream.elements(),
                                                      config.min_overlap)) {
      a.addressed[i] = true;
    }
  }
  return a;
}

CorpusAnalysis analyze(std::span<const ingest::SessionData> sessions,
                       const ingest::SpeakerTable& speakers, const PipelineConfig& config) {
  CorpusAnalysis out;
  out.sessions.resize(sessions.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(sessions.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < sessions.size(); ++i) out.sessions[i] = analyze_session(sessions[i], speakers, config);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(sessions.size());
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < sessions.size(); i = next++) {
          try {
            out.sessions[i] = analyze_session(sessions[i], speakers, config);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<pitch::WordPitch> all;
  for (const auto& s : out.sessions) {
    out.missing_words += s.word_pitch.missing;
    all.insert(all.end(), s.word_pitch.words.begin(), s.word_pitch.words.end());
  }
  out.standardized = pitch::standardize_by_speaker(std::move(all), config.scope);
  return out;
}

std::string looks_name(const std::string& target_party) { return "looks_at_" + target_party; }

std::string interaction_name(const std::string& party, const std::string& target_party) {
  return "party[" + party + "]:" + looks_name(target_party);
}

stats::Panel build_panel(const CorpusAnalysis& analysis, const ingest::SpeakerTable& speakers,
                         const std::string& target_party) {
  // Parties with addressing words get an interaction column.
  std::set<std::string> interacting;
  for (const auto& s : analysis.sessions) {
    const auto spk = speakers.find(s.speaker_id);
    if (spk == speakers.end()) {
      throw Error(ErrorCode::MissingPartyMetadata, "speaker '" + s.speaker_id + "' has no party");
    }
    if (spk->second.party == target_party) continue;
    if (std::find(s.addressed.begin(), s.addressed.end(), true) != s.addressed.end()) {
      interacting.insert(spk->second.party);
    }
  }

  stats::Panel panel;
  panel.regressor_names.push_back(looks_name(target_party));
  for (const auto& p : interacting) panel.regressor_names.push_back(interaction_name(p, target_party));

  std::size_t offset = 0;
  for (const auto& s : analysis.sessions) {
    const auto& party = speakers.at(s.speaker_id).party;
    for (std::size_t i = 0; i < s.word_pitch.words.size(); ++i) {
      const auto& wp = analysis.standardized[offset + i];
      if (!wp.z) continue;
      stats::PanelRow row;
      row.y = *wp.z;
      row.group = s.speaker_id;
      row.regressors.assign(panel.regressor_names.size(), 0.0);
      const double looks = s.addressed[i] ? 1.0 : 0.0;
      row.regressors[0] = looks;
      if (party != target_party && interacting.count(party)) {
        const auto col = 1 + static_cast<std::size_t>(std::distance(interacting.begin(), interacting.find(party)));
        row.regressors[col] = looks;
      }
      panel.rows.push_back(std::move(row));
    }
    offset += s.word_pitch.words.size();
  }
  return panel;
}

std::vector<stats::MarginCell> party_cells(const stats::RegressionResult& result,
                                           const ingest::SpeakerTable& speakers,
                                           const std::string& target_party) {
  std::set<std::string> parties;
  for (const auto& [id, s] : speakers) parties.insert(s.party);
  const std::string looks = looks_name(target_party);
  std::vector<stats::MarginCell> cells;
  for (const auto& p : parties) {
    stats::MarginCell to_target{p + "|" + target_party, {{looks, 1.0}}};
    const auto inter = interaction_name(p, target_party);
    if (p != target_party) {
      if (std::find(result.names.begin(), result.names.end(), inter) == result.names.end()) continue;
      to_target.settings[inter] = 1.0;
    }
    cells.push_back(std::move(to_target));
    cells.push_back({p + "|others", {}});
  }
  return cells;
}

std::vector<timeline::ElementStream> segment_streams(const CorpusAnalysis& analysis) {
  std::vector<timeline::ElementStream> out;
  for (const auto& s : analysis.sessions) {
    if (s.segments.empty()) continue;
    out.push_back(gaze::to_stream(s.segments, s.session_id, s.speaker_id));
  }
  return out;
}

}  // namespace mmalign::pipeline
