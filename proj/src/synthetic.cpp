#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "json.hpp"
#include "mmalign/error.hpp"
#include "mmalign/ingest.hpp"

namespace mmalign::ingest {

namespace {

constexpr double kLeadSilence = 0.3;
constexpr double kMinWord = 0.22;
constexpr double kMaxWord = 0.38;
// Gaps exceed the 64 ms lookback of a 2048-sample frame at 16 kHz, so no
// analysis frame centered in a word sees the previous word's tone.
constexpr double kMinGap = 0.08;
constexpr double kMaxGap = 0.16;
constexpr std::size_t kMinSegmentWords = 12;
constexpr std::size_t kMaxSegmentWords = 20;
constexpr double kToneAmplitude = 0.5;
constexpr double kFade = 0.005;

const char* const kVocabulary[] = {
    "und",       "die",      "der",       "wir",     "das",      "ist",      "nicht",
    "haben",     "Kollegen", "Damen",     "Herren",  "Regierung", "Antrag",  "Gesetz",
    "Menschen",  "Land",     "Deutschland", "Zukunft", "Arbeit",  "Familien", "Bildung",
    "Klima",     "Europa",   "Sicherheit", "Freiheit", "Wirtschaft", "Steuern", "Rente",
    "Gesundheit", "Kommunen", "Verantwortung", "Demokratie", "Debatte", "Präsident", "Haushalt",
};

const char* const kAddressVocabulary[] = {
    "AfD", "Hetze", "rechts", "Populismus", "Spaltung", "Lügen", "Ihnen", "Sie",
};

std::string padded(const char* prefix, std::size_t i, std::size_t total) {
  const int digits = std::max(2, static_cast<int>(std::to_string(total).size()));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, digits, i + 1);
  return buf;
}

// Word-index runs [first, last] that form planted address segments.
std::vector<std::pair<std::size_t, std::size_t>> plant_runs(std::size_t n_words, double density,
                                                            std::mt19937_64& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  if (density <= 0.0 || n_words < kMinSegmentWords) return runs;
  if (density >= 1.0) {
    runs.emplace_back(0, n_words - 1);
    return runs;
  }
  const double mean_segment = 0.5 * static_cast<double>(kMinSegmentWords + kMaxSegmentWords);
  const double mean_gap = std::max(1.0, mean_segment * (1.0 - density) / density);
  std::geometric_distribution<std::size_t> extra_gap(1.0 / mean_gap);
  std::uniform_int_distribution<std::size_t> seg_len(kMinSegmentWords, kMaxSegmentWords);
  std::size_t pos = 0;
  while (true) {
    pos += 1 + extra_gap(rng);
    if (pos >= n_words) break;
    const std::size_t len = seg_len(rng);
    const std::size_t last = std::min(n_words - 1, pos + len - 1);
    if (last - pos + 1 < kMinSegmentWords) break;
    runs.emplace_back(pos, last);
    pos = last + 1;
  }
  return runs;
}

}  // namespace

void validate(const SynthSpec& spec) {
  auto bad = [](const std::string& why) { return Error(ErrorCode::InvalidSpec, why); };
  if (spec.speakers == 0) throw bad("speakers must be positive");
  if (spec.words_per_speech == 0) throw bad("words_per_speech must be positive");
  if (!(spec.address_density >= 0.0 && spec.address_density <= 1.0)) {
    throw bad("address_density must be in [0, 1]");
  }
  if (!std::isfinite(spec.planted_effect)) throw bad("planted_effect must be finite");
  if (std::abs(spec.planted_effect) > 3.0) throw bad("planted_effect must be within 3 SD");
  if (spec.parties.empty()) throw bad("parties must be non-empty");
  if (std::find(spec.parties.begin(), spec.parties.end(), spec.target_party) == spec.parties.end()) {
    throw bad("target_party must be one of parties");
  }
  if (spec.sample_rate < 8000) throw bad("sample_rate must be at least 8000");
  if (!(spec.gaze_rate >= 5.0 && spec.gaze_rate <= 1000.0)) throw bad("gaze_rate must be in [5, 1000]");
}

SyntheticCorpus generate_synthetic(const SynthSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  std::normal_distribution<double> normal(0.0, 1.0);

  SyntheticCorpus corpus;
  corpus.truth.spec = spec;
  const std::size_t n_parties = spec.parties.size();

  for (std::size_t s = 0; s < spec.speakers; ++s) {
    TruthSpeaker ts;
    ts.speaker_id = padded("mp", s, spec.speakers);
    ts.party = spec.parties[s % n_parties];
    ts.gender = (s / n_parties) % 2 == 0 ? 'm' : 'f';
    if (ts.gender == 'm') {
      ts.baseline_hz = uniform(130.0, 150.0);
      ts.sd_hz = uniform(9.0, 12.0);
    } else {
      ts.baseline_hz = uniform(200.0, 230.0);
      ts.sd_hz = uniform(16.0, 22.0);
    }
    corpus.speakers.emplace(ts.speaker_id, SpeakerInfo{ts.speaker_id, ts.party, ts.gender});
    const bool reacts = ts.party != spec.target_party;

    // Word layout.
    const std::size_t n = spec.words_per_speech;
    std::vector<timeline::TimeInterval> spans(n);
    double t = kLeadSilence;
    for (std::size_t i = 0; i < n; ++i) {
      const double dur = uniform(kMinWord, kMaxWord);
      spans[i] = {t, t + dur, false};
      t += dur + uniform(kMinGap, kMaxGap);
    }
    const double total = spans.back().end + kLeadSilence;

    const auto runs = plant_runs(n, spec.address_density, rng);
    std::vector<bool> addressed(n, false);
    TruthSession truth;
    truth.session_id = padded("s", s, spec.speakers);
    for (const auto& [first, last] : runs) {
      for (std::size_t i = first; i <= last; ++i) addressed[i] = true;
      truth.segments.push_back({spans[first].start, spans[last].end, false});
    }

    // Words and tones.
    std::vector<timeline::Element> words;
    words.reserve(n);
    pitch::AudioBuffer audio;
    audio.sample_rate = spec.sample_rate;
    const double sr = static_cast<double>(spec.sample_rate);
    audio.samples.assign(static_cast<std::size_t>(std::ceil(total * sr)), 0.0);
    constexpr std::size_t kVocab = std::size(kVocabulary);
    constexpr std::size_t kAddrVocab = std::size(kAddressVocabulary);
    for (std::size_t i = 0; i < n; ++i) {
      std::string token;
      if (addressed[i] && reacts && unit(rng) < 0.25) {
        token = kAddressVocabulary[static_cast<std::size_t>(unit(rng) * kAddrVocab) % kAddrVocab];
      } else {
        token = kVocabulary[static_cast<std::size_t>(unit(rng) * kVocab) % kVocab];
      }
      const std::string id = "w" + std::to_string(i);
      const double shift = (addressed[i] && reacts) ? spec.planted_effect : 0.0;
      const double f0 = ts.baseline_hz + ts.sd_hz * (normal(rng) + shift);
      const double phase = uniform(0.0, 2.0 * std::numbers::pi);
      truth.word_f0[id] = f0;
      if (addressed[i]) truth.addressed_word_ids.push_back(id);
      words.push_back({id, spans[i], timeline::Word{token}});

      const auto first = static_cast<std::size_t>(std::ceil(spans[i].start * sr));
      const auto last = std::min(audio.samples.size(), static_cast<std::size_t>(std::ceil(spans[i].end * sr)));
      const double dur = spans[i].end - spans[i].start;
      for (std::size_t k = first; k < last; ++k) {
        const double local = static_cast<double>(k) / sr - spans[i].start;
        double env = 1.0;
        if (local < kFade) env = 0.5 - 0.5 * std::cos(std::numbers::pi * local / kFade);
        if (dur - local < kFade) env = 0.5 - 0.5 * std::cos(std::numbers::pi * (dur - local) / kFade);
        audio.samples[k] = kToneAmplitude * env * std::sin(2.0 * std::numbers::pi * f0 * local + phase);
      }
    }
    // Quantize as PCM16 does so in-memory and on-disk corpora agree.
    for (double& x : audio.samples) x = static_cast<double>(std::lround(x * 32768.0)) / 32768.0;

    // Gaze: notes glances inside segments, camera cuts between them.
    struct Window {
      double start, end;
    };
    std::vector<Window> dips;
    for (const auto& seg : truth.segments) {
      if (seg.duration() > 2.0 && unit(rng) < 0.5) {
        const double len = uniform(0.2, 0.5);
        const double a = uniform(seg.start + 0.5, seg.end - 0.5 - len);
        dips.push_back({a, a + len});
      }
    }
    std::vector<Window> cuts;
    {
      std::size_t i = 0;
      while (i < n) {
        if (addressed[i]) {
          ++i;
          continue;
        }
        std::size_t j = i;
        while (j < n && !addressed[j]) ++j;
        if (j - i >= 4 && unit(rng) < 0.3) {
          const std::size_t mid = i + (j - i) / 2;
          cuts.push_back({spans[mid].start, spans[mid].end});
        }
        i = j;
      }
    }
    auto inside = [](const std::vector<Window>& ws, double x) {
      return std::any_of(ws.begin(), ws.end(), [x](const Window& w) { return x >= w.start && x < w.end; });
    };
    auto in_segment = [&](double x) {
      return std::any_of(truth.segments.begin(), truth.segments.end(),
                         [x](const timeline::TimeInterval& iv) { return iv.contains(x); });
    };
    std::vector<gaze::GazeSample> samples;
    const auto n_gaze = static_cast<std::size_t>(std::floor(total * spec.gaze_rate));
    samples.reserve(n_gaze);
    for (std::size_t k = 0; k < n_gaze; ++k) {
      gaze::GazeSample g;
      g.t = static_cast<double>(k) / spec.gaze_rate;
      g.pitch_deg = std::clamp(3.0 * normal(rng), -10.0, 10.0);
      if (in_segment(g.t)) {
        if (inside(dips, g.t)) {
          g.yaw_deg = uniform(-10.0, 10.0);
          g.pitch_deg = uniform(-35.0, -25.0);
        } else {
          g.yaw_deg = uniform(50.0, 65.0);
        }
      } else if (inside(cuts, g.t)) {
        g.yaw_deg = uniform(45.0, 70.0);
        g.frontal = false;
      } else {
        g.yaw_deg = uniform(-40.0, 30.0);
      }
      samples.push_back(g);
    }

    SessionData session;
    session.session_id = truth.session_id;
    session.speaker_id = ts.speaker_id;
    session.words = timeline::build_stream(timeline::Modality::Text, truth.session_id, ts.speaker_id,
                                           std::move(words));
    session.audio = std::move(audio);
    session.gaze = std::move(samples);
    corpus.sessions.push_back(std::move(session));
    corpus.truth.sessions.push_back(std::move(truth));
    corpus.truth.speakers.push_back(ts);
  }
  return corpus;
}

SyntheticCorpus synth_corpus(const SynthSpec& spec, const fs::path& out_dir) {
  auto corpus = generate_synthetic(spec);
  fs::create_directories(out_dir / "sessions");

  CorpusManifest manifest;
  manifest.speakers = out_dir / "speakers.csv";
  write_speakers(manifest.speakers, corpus.speakers);
  for (const auto& s : corpus.sessions) {
    ManifestSession ms;
    ms.session_id = s.session_id;
    ms.speaker_id = s.speaker_id;
    ms.transcript = out_dir / "sessions" / (s.session_id + ".jsonl");
    ms.audio = out_dir / "sessions" / (s.session_id + ".wav");
    ms.gaze = out_dir / "sessions" / (s.session_id + ".gaze.csv");
    write_transcript(ms.transcript, s.words);
    write_wav(ms.audio, s.audio);
    write_gaze(ms.gaze, s.gaze);
    manifest.sessions.push_back(std::move(ms));
  }
  write_manifest(out_dir / "manifest.json", manifest);

  using nlohmann::json;
  const auto& t = corpus.truth;
  json doc;
  doc["seed"] = t.spec.seed;
  doc["planted_effect"] = t.spec.planted_effect;
  doc["address_density"] = t.spec.address_density;
  doc["target_party"] = t.spec.target_party;
  doc["label"] = t.spec.target_party;
  doc["parties"] = t.spec.parties;
  doc["speakers"] = json::array();
  for (const auto& s : t.speakers) {
    doc["speakers"].push_back({{"speaker_id", s.speaker_id},
                               {"party", s.party},
                               {"gender", std::string(1, s.gender)},
                               {"baseline_hz", s.baseline_hz},
                               {"sd_hz", s.sd_hz}});
  }
  json expected = json::object();
  expected["looks_at_" + t.spec.target_party] = 0.0;
  for (const auto& p : t.spec.parties) {
    if (p != t.spec.target_party) expected["party[" + p + "]:looks_at_" + t.spec.target_party] = t.spec.planted_effect;
  }
  doc["expected_coefficients"] = expected;
  doc["sessions"] = json::array();
  for (const auto& s : t.sessions) {
    json segs = json::array();
    for (const auto& iv : s.segments) segs.push_back({iv.start, iv.end});
    doc["sessions"].push_back({{"session_id", s.session_id},
                               {"segments", segs},
                               {"addressed_word_ids", s.addressed_word_ids},
                               {"word_f0", s.word_f0}});
  }
  std::ofstream out(out_dir / "ground_truth.json", std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write ground_truth.json");
  out << doc.dump(2) << "\n";
  return corpus;
}

}  // namespace mmalign::ingest
