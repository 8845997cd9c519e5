#include "mmalign/pitch.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "mmalign/error.hpp"

namespace mmalign::pitch {

std::size_t PitchTrack::voiced_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(frames.begin(), frames.end(), [](const PitchFrame& f) { return f.voiced(); }));
}

namespace {

struct LagWindow {
  std::size_t integration = 0;  // samples summed per lag
  std::size_t min_lag = 0;
  std::size_t max_lag = 0;      // inclusive search bound
  std::size_t last_lag = 0;     // highest lag computed (max_lag + 1 when it fits)
};

void validate_range(const PitchRange& range) {
  if (!(range.floor > 0.0) || !(range.ceiling > range.floor) || !std::isfinite(range.ceiling)) {
    throw Error(ErrorCode::InvalidRange, "pitch range requires 0 < floor < ceiling");
  }
}

LagWindow lag_window(std::size_t frame_length, int sample_rate, const PitchRange& range) {
  LagWindow w;
  w.integration = frame_length / 2;
  const double sr = static_cast<double>(sample_rate);
  w.min_lag = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(sr / range.ceiling)));
  w.max_lag = static_cast<std::size_t>(std::ceil(sr / range.floor));
  const std::size_t room = frame_length - w.integration;
  w.last_lag = std::min(w.max_lag + 1, room);
  w.max_lag = std::min(w.max_lag, w.last_lag - 1);
  return w;
}

std::optional<double> frame_f0(const double* x, int sample_rate, const PitchRange& range,
                               double threshold, const LagWindow& w, std::vector<double>& cmnd) {
  cmnd.assign(w.last_lag + 1, 1.0);
  double running = 0.0;
  std::size_t done = 0;  // cmnd is filled for lags 1..done
  // Lags are computed on demand; the search never looks further than one
  // lag past the chosen minimum.
  auto fill_to = [&](std::size_t upto) {
    for (std::size_t tau = done + 1; tau <= upto; ++tau) {
      const double* y = x + tau;
      double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
      std::size_t j = 0;
      for (; j + 4 <= w.integration; j += 4) {
        const double d0 = x[j] - y[j];
        const double d1 = x[j + 1] - y[j + 1];
        const double d2 = x[j + 2] - y[j + 2];
        const double d3 = x[j + 3] - y[j + 3];
        s0 += d0 * d0;
        s1 += d1 * d1;
        s2 += d2 * d2;
        s3 += d3 * d3;
      }
      for (; j < w.integration; ++j) {
        const double d = x[j] - y[j];
        s0 += d * d;
      }
      const double diff = (s0 + s1) + (s2 + s3);
      running += diff;
      cmnd[tau] = running > 0.0 ? diff * static_cast<double>(tau) / running : 1.0;
    }
    done = std::max(done, upto);
  };

  std::size_t tau = w.min_lag;
  fill_to(tau);
  while (tau <= w.max_lag && !(cmnd[tau] < threshold)) {
    ++tau;
    if (tau <= w.max_lag) fill_to(tau);
  }
  if (tau > w.max_lag) return std::nullopt;
  while (tau + 1 <= w.max_lag) {
    fill_to(tau + 1);
    if (!(cmnd[tau + 1] < cmnd[tau])) break;
    ++tau;
  }
  if (tau + 1 <= w.last_lag) fill_to(tau + 1);

  double refined = static_cast<double>(tau);
  if (tau >= 1 && tau + 1 <= w.last_lag) {
    const double a = cmnd[tau - 1];
    const double b = cmnd[tau];
    const double c = cmnd[tau + 1];
    const double denom = a - 2.0 * b + c;
    if (denom > 0.0) {
      const double shift = 0.5 * (a - c) / denom;
      if (std::abs(shift) <= 1.0) refined += shift;
    }
  }
  const double f0 = static_cast<double>(sample_rate) / refined;
  if (f0 < range.floor || f0 > range.ceiling) return std::nullopt;
  return f0;
}

}  // namespace

std::optional<double> estimate_frame_f0(std::span<const double> frame, int sample_rate,
                                        const PitchRange& range, double threshold) {
  validate_range(range);
  const auto w = lag_window(frame.size(), sample_rate, range);
  if (w.last_lag < 2 || w.max_lag < w.min_lag) {
    throw Error(ErrorCode::InvalidParameters, "frame too short for the pitch range");
  }
  std::vector<double> cmnd;
  return frame_f0(frame.data(), sample_rate, range, threshold, w, cmnd);
}

namespace {

PitchTrack track_frames(const AudioBuffer& audio, const PitchRange& range, const PitchParams& params,
                        std::string session_id,
                        std::optional<std::span<const timeline::TimeInterval>> only_within) {
  validate_range(range);
  if (audio.sample_rate < 8000) {
    throw Error(ErrorCode::InvalidParameters, "sample rate must be at least 8000 Hz");
  }
  if (params.hop == 0 || params.hop > params.frame_length) {
    throw Error(ErrorCode::InvalidParameters, "hop must be in [1, frame_length]");
  }
  if (!(params.threshold > 0.0)) {
    throw Error(ErrorCode::InvalidParameters, "threshold must be positive");
  }
  const double sr = static_cast<double>(audio.sample_rate);
  if (static_cast<double>(params.frame_length) < 2.0 * sr / range.floor) {
    throw Error(ErrorCode::InvalidParameters,
                "frame_length must hold two periods of the pitch floor");
  }
  if (audio.samples.size() < params.frame_length) {
    throw Error(ErrorCode::AudioTooShort, "audio shorter than one analysis frame");
  }

  const auto w = lag_window(params.frame_length, audio.sample_rate, range);
  const std::size_t n_frames = 1 + (audio.samples.size() - params.frame_length) / params.hop;

  PitchTrack track;
  track.session_id = std::move(session_id);
  track.hop_seconds = static_cast<double>(params.hop) / sr;
  track.frames.resize(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    const auto start = static_cast<double>(i * params.hop);
    track.frames[i].time = (start + static_cast<double>(params.frame_length) / 2.0) / sr;
  }
  std::vector<char> wanted(n_frames, only_within ? 0 : 1);
  if (only_within) {
    const auto by_time = [](const PitchFrame& f, double t) { return f.time < t; };
    for (const auto& iv : *only_within) {
      auto it = std::lower_bound(track.frames.begin(), track.frames.end(), iv.start, by_time);
      for (; it != track.frames.end() && it->time < iv.end; ++it) wanted[it - track.frames.begin()] = 1;
    }
  }
  std::vector<double> cmnd;
  for (std::size_t i = 0; i < n_frames; ++i) {
    if (!wanted[i]) continue;
    track.frames[i].f0 = frame_f0(audio.samples.data() + i * params.hop, audio.sample_rate, range,
                                  params.threshold, w, cmnd);
  }
  return track;
}

}  // namespace

PitchTrack estimate_pitch_track(const AudioBuffer& audio, const PitchRange& range,
                                const PitchParams& params, std::string session_id) {
  return track_frames(audio, range, params, std::move(session_id), std::nullopt);
}

PitchTrack estimate_pitch_track(const AudioBuffer& audio, const PitchRange& range,
                                const PitchParams& params, std::string session_id,
                                std::span<const timeline::TimeInterval> only_within) {
  return track_frames(audio, range, params, std::move(session_id), only_within);
}

WordPitchResult word_pitch(const PitchTrack& track, const timeline::ElementStream& words) {
  if (words.modality() != timeline::Modality::Text) {
    throw Error(ErrorCode::ModalityMismatch, "word pitch needs a text stream");
  }
  if (track.session_id != words.session_id()) {
    throw Error(ErrorCode::SessionMismatch, "pitch track session '" + track.session_id +
                                                "' differs from word session '" +
                                                words.session_id() + "'");
  }
  WordPitchResult result;
  result.words.reserve(words.size());
  const auto& frames = track.frames;
  std::size_t f = 0;
  for (const auto& word : words.elements()) {
    while (f < frames.size() && frames[f].time < word.interval.start) ++f;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t k = f; k < frames.size() && frames[k].time < word.interval.end; ++k) {
      if (frames[k].f0) {
        sum += *frames[k].f0;
        ++count;
      }
    }
    WordPitch wp;
    wp.word_id = word.id;
    wp.speaker_id = words.speaker_id().value_or("");
    wp.session_id = words.session_id();
    wp.voiced_frame_count = count;
    if (count > 0) {
      wp.mean_f0 = sum / static_cast<double>(count);
    } else {
      ++result.missing;
    }
    result.words.push_back(std::move(wp));
  }
  return result;
}

std::vector<WordPitch> standardize_by_speaker(std::vector<WordPitch> word_pitches,
                                              StandardizeScope scope) {
  using Key = std::pair<std::string, std::string>;
  std::map<Key, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < word_pitches.size(); ++i) {
    const auto& wp = word_pitches[i];
    if (!wp.mean_f0) continue;
    Key key{wp.speaker_id, scope == StandardizeScope::PerSpeakerSession ? wp.session_id : ""};
    groups[key].push_back(i);
  }
  for (const auto& [key, members] : groups) {
    const std::string who = key.second.empty() ? key.first : key.first + "@" + key.second;
    if (members.size() < 2) {
      throw Error(ErrorCode::DegenerateSpeaker, "speaker '" + who + "' has fewer than 2 word pitches");
    }
    double mean = 0.0;
    for (std::size_t i : members) mean += *word_pitches[i].mean_f0;
    mean /= static_cast<double>(members.size());
    double ss = 0.0;
    for (std::size_t i : members) {
      const double d = *word_pitches[i].mean_f0 - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(members.size() - 1));
    if (!(sd > 0.0)) {
      throw Error(ErrorCode::DegenerateSpeaker, "speaker '" + who + "' has zero pitch variance");
    }
    for (std::size_t i : members) word_pitches[i].z = (*word_pitches[i].mean_f0 - mean) / sd;
  }
  return word_pitches;
}

}  // namespace mmalign::pitch
