#include "mmalign/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mmalign/csv.hpp"
#include "mmalign/error.hpp"
#include "mmalign/gaze.hpp"
#include "mmalign/ingest.hpp"
#include "mmalign/latent.hpp"
#include "mmalign/pipeline.hpp"
#include "mmalign/pitch.hpp"
#include "mmalign/stats.hpp"
#include "mmalign/timeline.hpp"

namespace mmalign::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Keys accepted in a --config file. Each corresponds to the flag of the same
// name with dashes replaced by underscores.
const std::set<std::string> kConfigKeys = {
    "index",       "manifest",  "out",       "threads",   "pitch_floor", "pitch_ceiling",
    "frame_length", "hop",      "threshold", "scope",     "yaw_min",     "yaw_max",
    "notes_pitch", "min_words", "target",    "gaze_period", "min_overlap", "prior",
    "y",           "group",     "regressors", "lowercase", "allow_single_group", "panel",
};

class Config {
 public:
  void load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config '" + path.string() + "'");
    try {
      doc_ = json::parse(in);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
    }
    if (!doc_.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
    for (const auto& [key, value] : doc_.items()) {
      if (!kConfigKeys.count(key)) throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
    }
  }

  // flag > config > fallback
  template <typename T>
  T pick(const std::optional<T>& flag, const std::string& key, T fallback) const {
    if (flag) return *flag;
    if (auto v = get<T>(key)) return *v;
    return fallback;
  }

  template <typename T>
  std::optional<T> pick(const std::optional<T>& flag, const std::string& key) const {
    if (flag) return flag;
    return get<T>(key);
  }

 private:
  template <typename T>
  std::optional<T> get(const std::string& key) const {
    if (!doc_.is_object() || !doc_.contains(key)) return std::nullopt;
    try {
      return doc_.at(key).get<T>();
    } catch (const json::exception&) {
      throw Error(ErrorCode::InvalidConfig, "config key '" + key + "' has the wrong type");
    }
  }

  json doc_ = json::object();
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void make_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

// Writes to `path`, or to the command's stdout when no path was given.
class Output {
 public:
  Output(const std::optional<std::string>& path, std::ostream& fallback) : path_(path), fallback_(fallback) {}

  std::ostream& stream() { return buffer_; }

  void commit() {
    if (!path_) {
      fallback_ << buffer_.str();
      return;
    }
    make_parent(*path_);
    std::ofstream f(*path_, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::IoError, "cannot write '" + *path_ + "'");
    f << buffer_.str();
    if (!f) throw Error(ErrorCode::IoError, "failed writing '" + *path_ + "'");
  }

 private:
  std::optional<std::string> path_;
  std::ostream& fallback_;
  std::ostringstream buffer_;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  f << content;
  if (!f) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

std::string fmt(double v) { return csv::format_double(v); }

std::string fmt(const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string(); }

// Flags shared by the analysis commands.
struct AnalysisFlags {
  std::optional<std::string> index;
  std::optional<double> pitch_floor, pitch_ceiling;
  std::optional<std::size_t> frame_length, hop;
  std::optional<double> threshold;
  std::optional<std::string> scope;
  std::optional<double> yaw_min, yaw_max, notes_pitch;
  std::optional<std::size_t> min_words;
  std::optional<std::string> target;
  std::optional<double> gaze_period;
  std::optional<double> min_overlap;
};

void add_index_flag(CLI::App* cmd, AnalysisFlags& f) {
  cmd->add_option("--index", f.index, "Corpus index directory built by `ingest` (path)");
}

void add_gaze_flags(CLI::App* cmd, AnalysisFlags& f, const std::string& party_flag = "--target") {
  cmd->add_option("--yaw-min", f.yaw_min, "Lower edge of the addressing yaw band (degrees, default 45)");
  cmd->add_option("--yaw-max", f.yaw_max, "Upper edge of the addressing yaw band (degrees, default 70)");
  cmd->add_option("--notes-pitch", f.notes_pitch,
                  "Head pitch below which an open segment continues (degrees, default -20)");
  cmd->add_option("--min-words", f.min_words, "Minimum words inside a kept segment (words, default 10)");
  cmd->add_option(party_flag, f.target, "Party addressed by the yaw band (party name, default AfD)");
  cmd->add_option("--gaze-period", f.gaze_period,
                  "Gaze sample period (seconds, default: median timestamp spacing)");
}

void add_pitch_flags(CLI::App* cmd, AnalysisFlags& f) {
  cmd->add_option("--pitch-floor", f.pitch_floor,
                  "Lowest f0 searched (Hz, default by speaker gender: 75 male, 100 female)");
  cmd->add_option("--pitch-ceiling", f.pitch_ceiling,
                  "Highest f0 searched (Hz, default by speaker gender: 300 male, 500 female)");
  cmd->add_option("--frame-length", f.frame_length, "Analysis frame length (samples, default 2048)");
  cmd->add_option("--hop", f.hop, "Frame hop (samples, default 512)");
  cmd->add_option("--threshold", f.threshold,
                  "Absolute threshold on the normalized difference (unitless, default 0.15)");
  cmd->add_option("--scope", f.scope,
                  "Standardization group: speaker or speaker-session (enum, default speaker)");
}

pipeline::PipelineConfig pipeline_config(const AnalysisFlags& f, const Config& cfg, unsigned threads) {
  pipeline::PipelineConfig pc;
  pc.pitch.frame_length = cfg.pick<std::size_t>(f.frame_length, "frame_length", pc.pitch.frame_length);
  pc.pitch.hop = cfg.pick<std::size_t>(f.hop, "hop", pc.pitch.hop);
  pc.pitch.threshold = cfg.pick<double>(f.threshold, "threshold", pc.pitch.threshold);
  const auto floor = cfg.pick<double>(f.pitch_floor, "pitch_floor");
  const auto ceiling = cfg.pick<double>(f.pitch_ceiling, "pitch_ceiling");
  if (floor.has_value() != ceiling.has_value()) {
    throw Error(ErrorCode::InvalidRange, "--pitch-floor and --pitch-ceiling must be given together");
  }
  if (floor) pc.range_override = pitch::PitchRange{*floor, *ceiling};
  const auto scope = cfg.pick<std::string>(f.scope, "scope", "speaker");
  if (scope == "speaker") {
    pc.scope = pitch::StandardizeScope::PerSpeaker;
  } else if (scope == "speaker-session") {
    pc.scope = pitch::StandardizeScope::PerSpeakerSession;
  } else {
    throw Error(ErrorCode::InvalidParameters, "unknown scope '" + scope + "'");
  }
  pc.rule.yaw_min = cfg.pick<double>(f.yaw_min, "yaw_min", pc.rule.yaw_min);
  pc.rule.yaw_max = cfg.pick<double>(f.yaw_max, "yaw_max", pc.rule.yaw_max);
  pc.rule.notes_pitch_threshold = cfg.pick<double>(f.notes_pitch, "notes_pitch", pc.rule.notes_pitch_threshold);
  pc.rule.min_words = cfg.pick<std::size_t>(f.min_words, "min_words", pc.rule.min_words);
  pc.target_party = cfg.pick<std::string>(f.target, "target", pc.target_party);
  pc.rule.label = pc.target_party;
  if (!(pc.rule.yaw_min < pc.rule.yaw_max)) {
    throw Error(ErrorCode::InvalidParameters, "--yaw-min must be below --yaw-max");
  }
  pc.gaze_period = cfg.pick<double>(f.gaze_period, "gaze_period");
  if (pc.gaze_period && !(*pc.gaze_period > 0.0)) {
    throw Error(ErrorCode::InvalidParameters, "--gaze-period must be positive");
  }
  pc.min_overlap = cfg.pick<double>(f.min_overlap, "min_overlap", 0.0);
  if (pc.min_overlap < 0.0) throw Error(ErrorCode::InvalidParameters, "--min-overlap must be >= 0");
  pc.threads = threads;
  return pc;
}

ingest::CorpusIndex open_index(const AnalysisFlags& f, const Config& cfg) {
  const auto dir = cfg.pick<std::string>(f.index, "index");
  if (!dir) throw Error(ErrorCode::InvalidConfig, "--index is required");
  return ingest::CorpusIndex::open(*dir);
}

// Retained address segments of one session (no pitch tracking involved).
std::vector<gaze::AddressSegment> session_segments(const ingest::SessionData& s,
                                                   const pipeline::PipelineConfig& pc) {
  const auto raw = gaze::detect_address_segments(s.gaze, pc.rule, pc.gaze_period);
  return gaze::enforce_min_words(raw, s.session_id, s.words, pc.rule);
}

// Per-session element streams for align and query.
struct SessionStreams {
  std::vector<timeline::ElementStream> streams;

  const timeline::ElementStream* find(timeline::Modality m) const {
    for (const auto& s : streams) {
      if (s.modality() == m) return &s;
    }
    return nullptr;
  }
};

SessionStreams build_streams(const ingest::SessionData& s, const ingest::SpeakerTable& speakers,
                             const pipeline::PipelineConfig& pc, const std::set<timeline::Modality>& wanted) {
  using timeline::Modality;
  SessionStreams out;
  if (wanted.count(Modality::Text)) out.streams.push_back(s.words);
  if (wanted.count(Modality::Audio)) {
    const auto spk = speakers.find(s.speaker_id);
    if (spk == speakers.end()) {
      throw Error(ErrorCode::MissingPartyMetadata, "speaker '" + s.speaker_id + "' is not in the speaker table");
    }
    const auto range = pc.range_override.value_or(spk->second.range());
    const auto track = pitch::estimate_pitch_track(s.audio, range, pc.pitch, s.session_id);
    const double half = track.hop_seconds / 2.0;
    std::vector<timeline::Element> frames;
    for (std::size_t i = 0; i < track.frames.size(); ++i) {
      const auto& fr = track.frames[i];
      if (!fr.f0) continue;
      frames.push_back({"f" + std::to_string(i), {std::max(0.0, fr.time - half), fr.time + half, false}, *fr.f0});
    }
    if (!frames.empty()) {
      out.streams.push_back(timeline::build_stream(Modality::Audio, s.session_id, s.speaker_id, std::move(frames)));
    }
  }
  if (wanted.count(Modality::Visual) && !s.gaze.empty()) {
    const double period = pc.gaze_period.value_or(gaze::median_sample_period(s.gaze).value_or(0.0));
    std::vector<timeline::Element> samples;
    for (std::size_t i = 0; i < s.gaze.size(); ++i) {
      const auto& g = s.gaze[i];
      samples.push_back({"g" + std::to_string(i), {g.t, g.t + period, period == 0.0},
                         timeline::AnglePair{g.yaw_deg, g.pitch_deg}});
    }
    out.streams.push_back(timeline::build_stream(Modality::Visual, s.session_id, s.speaker_id, std::move(samples)));
  }
  if (wanted.count(Modality::Derived)) {
    const auto segs = session_segments(s, pc);
    if (!segs.empty()) out.streams.push_back(gaze::to_stream(segs, s.session_id, s.speaker_id));
  }
  return out;
}

timeline::Modality modality_arg(const std::string& s, const char* flag) {
  const auto m = timeline::parse_modality(s);
  if (!m) throw Error(ErrorCode::InvalidParameters, std::string("unknown modality for ") + flag + ": '" + s + "'");
  return *m;
}

std::string payload_text(const timeline::Element& e) {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, timeline::Word>) {
          return p.text;
        } else if constexpr (std::is_same_v<T, double>) {
          return csv::format_double(p);
        } else if constexpr (std::is_same_v<T, timeline::AnglePair>) {
          return csv::format_double(p.yaw_deg) + "/" + csv::format_double(p.pitch_deg);
        } else {
          return p.value;
        }
      },
      e.payload);
}

// Table labels for the pipeline's regressor names; other names pass through.
std::string coefficient_label(const std::string& name) {
  const std::string looks = "looks_at_";
  if (name.rfind(looks, 0) == 0) return "Looks at " + name.substr(looks.size());
  const std::string party = "party[";
  const auto close = name.find("]:");
  if (name.rfind(party, 0) == 0 && close != std::string::npos) {
    const auto rest = name.substr(close + 2);
    const auto p = name.substr(party.size(), close - party.size());
    if (rest.rfind(looks, 0) == 0) return "Party: " + p + " x Looks at " + rest.substr(looks.size());
  }
  return name;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string results_table(const stats::RegressionResult& r) {
  std::ostringstream t;
  std::size_t width = 24;
  for (const auto& n : r.names) width = std::max(width, coefficient_label(n).size() + 2);
  auto line = [&] { t << std::string(width + 46, '-') << "\n"; };
  t << std::left << std::setw(static_cast<int>(width)) << "Standardized pitch" << std::right << std::setw(12)
    << "Estimate" << std::setw(12) << "Std. Error" << std::setw(22) << "95% CI" << "\n";
  line();
  for (std::size_t i = 0; i < r.names.size(); ++i) {
    const double b = r.coefficients(static_cast<Eigen::Index>(i));
    const double se = r.standard_errors(static_cast<Eigen::Index>(i));
    const std::string ci = "[" + fixed(b - stats::kZ95 * se, 3) + ", " + fixed(b + stats::kZ95 * se, 3) + "]";
    t << std::left << std::setw(static_cast<int>(width)) << coefficient_label(r.names[i]) << std::right
      << std::setw(12) << fixed(b, 3) << std::setw(12) << ("(" + fixed(se, 3) + ")") << std::setw(22) << ci
      << "\n";
  }
  line();
  auto stat = [&](const std::string& label, const std::string& value) {
    t << std::left << std::setw(static_cast<int>(width)) << label << std::right << std::setw(12) << value << "\n";
  };
  stat("Speaker fixed effects", "yes");
  stat("Observations", std::to_string(r.n_obs));
  stat("Groups", std::to_string(r.n_groups));
  stat("Log Likelihood", fixed(r.log_likelihood, 3));
  stat("Deviance", fixed(r.deviance, 3));
  line();
  return t.str();
}

int report(const Error& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  return is_validation_error(e.code()) ? kExitValidation : kExitData;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multimodal alignment: pitch, gaze and transcript streams on a shared clock", "mmalign"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Print help for every command");

  std::optional<std::string> config_path;
  std::optional<unsigned> threads_flag;
  app.add_option("--config", config_path, "JSON config file; flags override its keys (path)");
  app.add_option("--threads", threads_flag, "Worker threads for per-session work (count, default 1)")
      ->check(CLI::PositiveNumber);

  // ingest
  std::optional<std::string> ingest_manifest, ingest_out;
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate a corpus manifest and build an index directory");
  ingest_cmd->add_option("--manifest", ingest_manifest, "Corpus manifest (path to JSON)");
  ingest_cmd->add_option("--out", ingest_out, "Index directory to create or replace (path)");

  // pitch
  AnalysisFlags pitch_f;
  std::optional<std::string> pitch_out;
  auto* pitch_cmd = app.add_subcommand("pitch", "Per-word mean f0 and per-speaker z-scores as CSV");
  add_index_flag(pitch_cmd, pitch_f);
  add_pitch_flags(pitch_cmd, pitch_f);
  pitch_cmd->add_option("--out", pitch_out, "Output CSV (path, default stdout)");

  // segments
  AnalysisFlags seg_f;
  std::optional<std::string> seg_out;
  bool seg_raw = false;
  auto* seg_cmd = app.add_subcommand("segments", "Address segments detected from head pose as CSV");
  add_index_flag(seg_cmd, seg_f);
  add_gaze_flags(seg_cmd, seg_f);
  seg_cmd->add_flag("--raw", seg_raw, "Also list segments dropped by the word minimum (boolean)");
  seg_cmd->add_option("--out", seg_out, "Output CSV (path, default stdout)");

  // align
  AnalysisFlags align_f;
  std::string align_source = "text", align_target = "gaze";
  std::optional<std::string> align_out;
  auto* align_cmd = app.add_subcommand("align", "Temporal join of two streams per session as CSV");
  add_index_flag(align_cmd, align_f);
  add_pitch_flags(align_cmd, align_f);
  add_gaze_flags(align_cmd, align_f, "--target-party");
  align_cmd->add_option("--source", align_source, "Source stream: text, audio, visual or gaze (enum, default text)");
  align_cmd->add_option("--target", align_target, "Target stream: text, audio, visual or gaze (enum, default gaze)");
  align_cmd->add_option("--min-overlap", align_f.min_overlap,
                        "Pairs must overlap by more than this (seconds, default 0)");
  align_cmd->add_option("--out", align_out, "Output CSV (path, default stdout)");

  // query
  AnalysisFlags query_f;
  std::optional<std::string> query_select, query_where, query_out;
  auto* query_cmd = app.add_subcommand("query", "Elements of one stream overlapping matches in another");
  add_index_flag(query_cmd, query_f);
  add_pitch_flags(query_cmd, query_f);
  add_gaze_flags(query_cmd, query_f);
  query_cmd->add_option("--select", query_select, "Stream to return: text, audio, visual or gaze (enum)");
  query_cmd->add_option("--where", query_where,
                        "Predicate <stream>.<field><op><value>, e.g. gaze.label==AfD (expression; "
                        "yaw/pitch in degrees, audio value in Hz)");
  query_cmd->add_option("--out", query_out, "Output CSV (path, default stdout)");

  // regress
  AnalysisFlags reg_f;
  std::optional<std::string> reg_panel, reg_y, reg_group, reg_regressors, reg_out, reg_export;
  bool reg_single_flag = false;
  auto* reg_cmd = app.add_subcommand("regress", "Fixed-effects regression with margins");
  add_index_flag(reg_cmd, reg_f);
  add_pitch_flags(reg_cmd, reg_f);
  add_gaze_flags(reg_cmd, reg_f);
  reg_cmd->add_option("--panel", reg_panel, "Panel CSV used instead of --index (path)");
  reg_cmd->add_option("--y", reg_y, "Outcome column of --panel (column name, default y)");
  reg_cmd->add_option("--group", reg_group, "Group column of --panel (column name, default group)");
  reg_cmd->add_option("--regressors", reg_regressors, "Regressor columns of --panel (comma-separated names)");
  reg_cmd->add_option("--export-panel", reg_export, "Also write the regression panel (path to CSV)");
  auto* reg_single_opt =
      reg_cmd->add_flag("--allow-single-group", reg_single_flag, "Accept a panel with one group (boolean)");
  reg_cmd->add_option("--out", reg_out,
                      "Directory for results.json, results.txt and margins.csv (path, required)");

  // fw
  AnalysisFlags fw_f;
  std::optional<std::string> fw_a, fw_b, fw_out;
  std::optional<double> fw_prior;
  bool fw_keep_case_flag = false;
  auto* fw_cmd = app.add_subcommand("fw", "Fightin' Words log-odds z-scores as CSV");
  add_index_flag(fw_cmd, fw_f);
  add_gaze_flags(fw_cmd, fw_f);
  fw_cmd->add_option("--counts-a", fw_a, "Word counts of group a (path to CSV word,count)");
  fw_cmd->add_option("--counts-b", fw_b, "Word counts of group b (path to CSV word,count)");
  fw_cmd->add_option("--prior", fw_prior, "Prior scale alpha0 (pseudo-counts, default 1)");
  auto* fw_keep_case_opt = fw_cmd->add_flag("--keep-case", fw_keep_case_flag, "Do not lowercase tokens (boolean)");
  fw_cmd->add_option("--out", fw_out, "Output CSV (path, default stdout)");

  // advise
  std::string adv_data;
  std::optional<std::string> adv_repr, adv_integ;
  auto* adv_cmd = app.add_subcommand("advise", "Suggest alignment techniques for a kind of data");
  adv_cmd->add_option("--data", adv_data, "Data kind: continuous or discrete (enum)")->required();
  adv_cmd->add_option("--representation", adv_repr,
                      "Element representation for discrete data: semantic or non-semantic (enum)");
  adv_cmd->add_option("--integration", adv_integ,
                      "Alignment step for discrete data: explicit or implicit (enum)");

  // synth
  std::optional<std::string> syn_spec, syn_out;
  std::optional<std::uint64_t> syn_seed;
  std::optional<std::size_t> syn_speakers, syn_words;
  std::optional<double> syn_effect, syn_density;
  auto* syn_cmd = app.add_subcommand("synth", "Write a synthetic corpus with planted ground truth");
  syn_cmd->add_option("--spec", syn_spec, "Synthetic corpus spec (path to JSON)");
  syn_cmd->add_option("--seed", syn_seed, "Random seed (integer)");
  syn_cmd->add_option("--speakers", syn_speakers, "Number of speakers, one speech each (count)");
  syn_cmd->add_option("--words", syn_words, "Words per speech (count)");
  syn_cmd->add_option("--effect", syn_effect, "Planted addressing effect (speaker SD units)");
  syn_cmd->add_option("--density", syn_density, "Fraction of words inside address segments (fraction 0-1)");
  syn_cmd->add_option("--out", syn_out, "Corpus directory (path, required)");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: InvalidConfig: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    Config cfg;
    if (config_path) cfg.load(*config_path);
    const unsigned threads = cfg.pick<unsigned>(threads_flag, "threads", 1u);
    if (threads == 0) throw Error(ErrorCode::InvalidConfig, "--threads must be positive");

    if (*ingest_cmd) {
      const auto manifest = cfg.pick<std::string>(ingest_manifest, "manifest");
      const auto dir = cfg.pick<std::string>(ingest_out, "out");
      if (!manifest || !dir) throw Error(ErrorCode::InvalidConfig, "ingest needs --manifest and --out");
      ingest::build_index(*manifest, *dir);
      const auto idx = ingest::CorpusIndex::open(*dir);
      out << "indexed " << idx.session_ids().size() << " sessions\n";
      return kExitOk;
    }

    if (*pitch_cmd) {
      const auto pc = pipeline_config(pitch_f, cfg, threads);
      const auto idx = open_index(pitch_f, cfg);
      const auto sessions = idx.load_all();
      const auto analysis = pipeline::analyze(sessions, idx.speakers(), pc);
      Output o(cfg.pick<std::string>(pitch_out, "out"), out);
      o.stream() << "session_id,speaker_id,word_id,word,start_s,end_s,mean_f0_hz,voiced_frames,z\n";
      std::size_t k = 0;
      for (std::size_t si = 0; si < analysis.sessions.size(); ++si) {
        const auto& words = sessions[si].words.elements();
        for (std::size_t i = 0; i < words.size(); ++i, ++k) {
          const auto& wp = analysis.standardized[k];
          o.stream() << csv::row({wp.session_id, wp.speaker_id, wp.word_id,
                                  std::get<timeline::Word>(words[i].payload).text, fmt(words[i].interval.start),
                                  fmt(words[i].interval.end), fmt(wp.mean_f0),
                                  std::to_string(wp.voiced_frame_count), fmt(wp.z)});
        }
      }
      o.commit();
      return kExitOk;
    }

    if (*seg_cmd) {
      const auto pc = pipeline_config(seg_f, cfg, threads);
      const auto idx = open_index(seg_f, cfg);
      Output o(cfg.pick<std::string>(seg_out, "out"), out);
      o.stream() << "session_id,speaker_id,segment_id,start_s,end_s,label,word_count,kept\n";
      for (const auto& id : idx.session_ids()) {
        const auto s = idx.load_session(id);
        const auto raw = gaze::detect_address_segments(s.gaze, pc.rule, pc.gaze_period);
        auto counted = raw;
        if (!raw.empty()) {
          const auto seg_stream = gaze::to_stream(raw, s.session_id, s.speaker_id);
          for (auto& seg : counted) seg.word_count = 0;
          for (const auto& [w, k] : timeline::join_elements(s.words.elements(), seg_stream.elements())) {
            (void)w;
            ++counted[k].word_count;
          }
        }
        std::size_t kept_k = 0;
        for (const auto& seg : counted) {
          const bool kept = seg.word_count >= pc.rule.min_words;
          if (!kept && !seg_raw) continue;
          const std::string seg_id = kept ? "seg" + std::to_string(kept_k++) : std::string();
          o.stream() << csv::row({s.session_id, s.speaker_id, seg_id, fmt(seg.interval.start),
                                  fmt(seg.interval.end), seg.label, std::to_string(seg.word_count),
                                  kept ? "1" : "0"});
        }
      }
      o.commit();
      return kExitOk;
    }

    if (*align_cmd) {
      const auto pc = pipeline_config(align_f, cfg, threads);
      const auto src = modality_arg(align_source, "--source");
      const auto tgt = modality_arg(align_target, "--target");
      const auto idx = open_index(align_f, cfg);
      Output o(cfg.pick<std::string>(align_out, "out"), out);
      o.stream() << "session_id,source_id,target_id,overlap_s,session_cardinality\n";
      bool any_source = false, any_target = false;
      for (const auto& id : idx.session_ids()) {
        const auto s = idx.load_session(id);
        const auto streams = build_streams(s, idx.speakers(), pc, {src, tgt});
        const auto* a = streams.find(src);
        const auto* b = streams.find(tgt);
        any_source |= a != nullptr;
        any_target |= b != nullptr;
        if (!a || !b) continue;
        const auto map = timeline::join_streams(*a, *b, pc.min_overlap);
        const std::string card(timeline::to_string(map.cardinality));
        for (const auto& p : map.pairs) {
          o.stream() << csv::row({s.session_id, p.source_id, p.target_id, fmt(p.overlap), card});
        }
      }
      if (!any_source || !any_target) {
        throw Error(ErrorCode::ModalityAbsent, "no session has a " +
                                                   std::string(timeline::to_string(any_source ? tgt : src)) +
                                                   " stream");
      }
      o.commit();
      return kExitOk;
    }

    if (*query_cmd) {
      const auto pc = pipeline_config(query_f, cfg, threads);
      if (!query_select || !query_where) throw Error(ErrorCode::InvalidQuery, "query needs --select and --where");
      const auto select = modality_arg(*query_select, "--select");
      const auto where = timeline::parse_predicate(*query_where);
      const auto idx = open_index(query_f, cfg);
      std::vector<timeline::ElementStream> corpus;
      for (const auto& id : idx.session_ids()) {
        auto streams = build_streams(idx.load_session(id), idx.speakers(), pc, {select, where.modality});
        for (auto& st : streams.streams) corpus.push_back(std::move(st));
      }
      const auto hits = timeline::query_crossmodal(corpus, select, where);
      Output o(cfg.pick<std::string>(query_out, "out"), out);
      o.stream() << "session_id,element_id,start_s,end_s,value\n";
      for (const auto& h : hits) {
        o.stream() << csv::row({h.session_id, h.element.id, fmt(h.element.interval.start),
                                fmt(h.element.interval.end), payload_text(h.element)});
      }
      o.commit();
      return kExitOk;
    }

    if (*reg_cmd) {
      const auto dir = cfg.pick<std::string>(reg_out, "out");
      if (!dir) throw Error(ErrorCode::InvalidConfig, "regress needs --out");
      const bool single = cfg.pick<bool>(
          reg_single_opt->count() ? std::optional<bool>(reg_single_flag) : std::nullopt, "allow_single_group", false);
      const auto panel_path = cfg.pick<std::string>(reg_panel, "panel");
      stats::Panel panel;
      std::vector<stats::MarginCell> cells;
      std::optional<ingest::SpeakerTable> speakers;
      std::string target;
      if (panel_path) {
        std::vector<std::string> regs;
        if (reg_regressors) {
          regs = split_list(*reg_regressors);
        } else if (auto v = cfg.pick<std::vector<std::string>>(std::nullopt, "regressors")) {
          regs = *v;
        }
        if (regs.empty()) throw Error(ErrorCode::InvalidConfig, "--panel needs --regressors");
        panel = ingest::load_panel(*panel_path, cfg.pick<std::string>(reg_y, "y", "y"),
                                   cfg.pick<std::string>(reg_group, "group", "group"), regs);
      } else {
        const auto pc = pipeline_config(reg_f, cfg, threads);
        const auto idx = open_index(reg_f, cfg);
        const auto sessions = idx.load_all();
        const auto analysis = pipeline::analyze(sessions, idx.speakers(), pc);
        panel = pipeline::build_panel(analysis, idx.speakers(), pc.target_party);
        speakers = idx.speakers();
        target = pc.target_party;
      }
      if (reg_export) {
        make_parent(*reg_export);
        ingest::write_panel(*reg_export, panel);
      }
      const auto result = stats::fe_regress(panel, single);
      if (speakers) {
        cells = pipeline::party_cells(result, *speakers, target);
      } else {
        cells.push_back({"baseline", {}});
        for (const auto& n : result.names) cells.push_back({n + "=1", {{n, 1.0}}});
      }
      const auto marg = stats::margins(result, cells);

      fs::create_directories(*dir);
      json doc;
      doc["n_obs"] = result.n_obs;
      doc["n_groups"] = result.n_groups;
      doc["df_residual"] = result.df_residual;
      doc["rss"] = result.rss;
      doc["sigma2"] = result.sigma2;
      doc["log_likelihood"] = result.log_likelihood;
      doc["deviance"] = result.deviance;
      doc["coefficients"] = json::array();
      for (std::size_t i = 0; i < result.names.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double b = result.coefficients(ii);
        const double se = result.standard_errors(ii);
        doc["coefficients"].push_back({{"name", result.names[i]},
                                       {"label", coefficient_label(result.names[i])},
                                       {"estimate", b},
                                       {"se", se},
                                       {"z", b / se},
                                       {"ci_low", b - stats::kZ95 * se},
                                       {"ci_high", b + stats::kZ95 * se}});
      }
      doc["margins"] = json::array();
      std::string mcsv = "cell,predicted,se,ci_low,ci_high\n";
      for (const auto& m : marg) {
        doc["margins"].push_back({{"cell", m.label},
                                  {"predicted", m.predicted},
                                  {"se", m.se},
                                  {"ci_low", m.ci_low},
                                  {"ci_high", m.ci_high}});
        mcsv += csv::row({m.label, fmt(m.predicted), fmt(m.se), fmt(m.ci_low), fmt(m.ci_high)});
      }
      write_file(fs::path(*dir) / "results.json", doc.dump(2) + "\n");
      write_file(fs::path(*dir) / "results.txt", results_table(result));
      write_file(fs::path(*dir) / "margins.csv", mcsv);
      out << results_table(result);
      return kExitOk;
    }

    if (*fw_cmd) {
      const double prior = cfg.pick<double>(fw_prior, "prior", stats::kDefaultPriorScale);
      stats::TokenOptions topt;
      topt.lowercase = cfg.pick<bool>(fw_keep_case_opt->count() ? std::optional<bool>(!fw_keep_case_flag) : std::nullopt,
                                      "lowercase", true);
      std::vector<std::pair<std::string, stats::FightinWordsResult>> comparisons;
      if (fw_a || fw_b) {
        if (!fw_a || !fw_b) throw Error(ErrorCode::InvalidConfig, "--counts-a and --counts-b go together");
        comparisons.emplace_back("a_vs_b",
                                 stats::fightin_words(ingest::load_counts(*fw_a), ingest::load_counts(*fw_b), prior));
      } else {
        const auto pc = pipeline_config(fw_f, cfg, threads);
        const auto idx = open_index(fw_f, cfg);
        std::vector<timeline::ElementStream> transcripts;
        std::map<std::string, std::vector<gaze::AddressSegment>> segs;
        for (const auto& id : idx.session_ids()) {
          auto s = idx.load_session(id);
          segs[s.session_id] = session_segments(s, pc);
          transcripts.push_back(std::move(s.words));
        }
        std::map<std::string, std::string> party;
        for (const auto& [id, sp] : idx.speakers()) party[id] = sp.party;
        const auto split = stats::four_situation_split(transcripts, segs, party, pc.target_party, topt);
        for (const auto s : stats::kAllSituations) {
          const auto& a = split.at(s);
          const auto b = split.rest(s);
          if (a.empty() || b.empty()) continue;
          comparisons.emplace_back(stats::situation_name(s, pc.target_party) + "_vs_rest",
                                   stats::fightin_words(a, b, prior));
        }
        if (comparisons.empty()) throw Error(ErrorCode::EmptyVocabulary, "no situation has tokens on both sides");
      }
      Output o(cfg.pick<std::string>(fw_out, "out"), out);
      o.stream() << "comparison,word,count_a,count_b,delta,variance,z\n";
      for (const auto& [name, res] : comparisons) {
        for (const auto& w : res.words) {
          o.stream() << csv::row({name, w.word, std::to_string(w.count_a), std::to_string(w.count_b),
                                  fmt(w.delta), fmt(w.variance), fmt(w.z)});
        }
      }
      o.commit();
      return kExitOk;
    }

    if (*adv_cmd) {
      latent::StrategyQuery q;
      const auto kind = latent::parse_data_kind(adv_data);
      if (!kind) throw Error(ErrorCode::InvalidQuery, "unknown data kind '" + adv_data + "'");
      q.data_kind = *kind;
      if (adv_repr) {
        q.representation = latent::parse_representation(*adv_repr);
        if (!q.representation) throw Error(ErrorCode::InvalidQuery, "unknown representation '" + *adv_repr + "'");
      }
      if (adv_integ) {
        q.integration = latent::parse_integration(*adv_integ);
        if (!q.integration) throw Error(ErrorCode::InvalidQuery, "unknown integration '" + *adv_integ + "'");
      }
      for (const auto& s : latent::advise(q)) out << s.name << "\n";
      return kExitOk;
    }

    if (*syn_cmd) {
      ingest::SynthSpec spec;
      if (syn_spec) {
        std::ifstream in(*syn_spec);
        if (!in) throw Error(ErrorCode::MissingFile, "cannot open '" + *syn_spec + "'");
        json doc;
        try {
          doc = json::parse(in);
          if (!doc.is_object()) throw Error(ErrorCode::InvalidSpec, "spec must be a JSON object");
          for (const auto& [key, v] : doc.items()) {
            if (key == "seed") spec.seed = v.get<std::uint64_t>();
            else if (key == "speakers") spec.speakers = v.get<std::size_t>();
            else if (key == "words_per_speech") spec.words_per_speech = v.get<std::size_t>();
            else if (key == "planted_effect") spec.planted_effect = v.get<double>();
            else if (key == "address_density") spec.address_density = v.get<double>();
            else if (key == "parties") spec.parties = v.get<std::vector<std::string>>();
            else if (key == "target_party") spec.target_party = v.get<std::string>();
            else if (key == "sample_rate") spec.sample_rate = v.get<int>();
            else if (key == "gaze_rate") spec.gaze_rate = v.get<double>();
            else throw Error(ErrorCode::InvalidSpec, "unknown spec key '" + key + "'");
          }
        } catch (const json::exception& e) {
          throw Error(ErrorCode::InvalidSpec, *syn_spec + ": " + e.what());
        }
      }
      if (syn_seed) spec.seed = *syn_seed;
      if (syn_speakers) spec.speakers = *syn_speakers;
      if (syn_words) spec.words_per_speech = *syn_words;
      if (syn_effect) spec.planted_effect = *syn_effect;
      if (syn_density) spec.address_density = *syn_density;
      const auto dir = cfg.pick<std::string>(syn_out, "out");
      if (!dir) throw Error(ErrorCode::InvalidConfig, "synth needs --out");
      ingest::validate(spec);
      const auto corpus = ingest::synth_corpus(spec, *dir);
      out << "wrote " << corpus.sessions.size() << " sessions to " << *dir << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    return report(e, err);
  } catch (const fs::filesystem_error& e) {
    err << "error: IoError: " << e.what() << "\n";
    return kExitData;
  }
  return kExitValidation;
}

}  // namespace mmalign::cli
