#include "mmalign/ingest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "json.hpp"
#include "mmalign/csv.hpp"
#include "mmalign/error.hpp"

namespace mmalign::ingest {

using nlohmann::json;

namespace {

Error parse_error(const fs::path& path, std::size_t line, const std::string& what) {
  return Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  return out;
}

void write_text(const fs::path& path, const std::string& content) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw parse_error(path, 0, e.what());
  }
}

bool safe_id(const std::string& id) {
  if (id.empty() || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xFF));
  s.push_back(static_cast<char>((v >> 8) & 0xFF));
}

json words_to_json(const timeline::ElementStream& words) {
  json arr = json::array();
  for (const auto& e : words.elements()) {
    arr.push_back({{"id", e.id},
                   {"word", std::get<timeline::Word>(e.payload).text},
                   {"start", e.interval.start},
                   {"end", e.interval.end}});
  }
  return arr;
}

}  // namespace

// --- transcripts ------------------------------------------------------------

timeline::ElementStream load_transcript(const fs::path& path, const std::string& session_id) {
  auto in = open_in(path);
  std::vector<timeline::Element> elements;
  std::optional<std::string> speaker;
  std::string line;
  std::size_t line_no = 0;
  double prev_start = -1.0;
  double prev_end = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error&) {
      throw parse_error(path, line_no, "not a JSON object");
    }
    if (!obj.is_object()) throw parse_error(path, line_no, "not a JSON object");
    for (const char* key : {"word", "start", "end", "speaker_id"}) {
      if (!obj.contains(key)) throw parse_error(path, line_no, std::string("missing '") + key + "'");
    }
    if (!obj["word"].is_string() || !obj["speaker_id"].is_string() ||
        !obj["start"].is_number() || !obj["end"].is_number()) {
      throw parse_error(path, line_no, "field has the wrong type");
    }
    const double start = obj["start"].get<double>();
    const double end = obj["end"].get<double>();
    if (!std::isfinite(start) || !std::isfinite(end) || start < 0.0) {
      throw parse_error(path, line_no, "invalid timestamp");
    }
    if (!(end > start)) throw parse_error(path, line_no, "end must be after start");
    if (start < prev_start) throw parse_error(path, line_no, "words are not in time order");
    if (!elements.empty() && start < prev_end) {
      throw Error(ErrorCode::OverlappingWords,
                  path.string() + ":" + std::to_string(line_no) + ": word overlaps its predecessor");
    }
    const auto spk = obj["speaker_id"].get<std::string>();
    if (speaker && *speaker != spk) {
      throw parse_error(path, line_no, "speaker '" + spk + "' differs from '" + *speaker + "'");
    }
    speaker = spk;
    std::string id;
    if (obj.contains("id")) {
      if (!obj["id"].is_string()) throw parse_error(path, line_no, "id must be a string");
      id = obj["id"].get<std::string>();
    } else {
      id = "w" + std::to_string(elements.size());
    }
    elements.push_back({std::move(id), {start, end, false}, timeline::Word{obj["word"].get<std::string>()}});
    prev_start = start;
    prev_end = end;
  }
  if (elements.empty()) throw parse_error(path, line_no, "transcript has no words");
  try {
    return timeline::build_stream(timeline::Modality::Text, session_id, speaker, std::move(elements));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_transcript(const fs::path& path, const timeline::ElementStream& words) {
  std::string out;
  for (const auto& e : words.elements()) {
    json obj = {{"id", e.id},
                {"word", std::get<timeline::Word>(e.payload).text},
                {"start", e.interval.start},
                {"end", e.interval.end},
                {"speaker_id", words.speaker_id().value_or("")}};
    out += obj.dump();
    out.push_back('\n');
  }
  write_text(path, out);
}

// --- gaze -------------------------------------------------------------------

std::vector<gaze::GazeSample> load_gaze(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  std::vector<std::string> f;
  if (!std::getline(in, line)) throw parse_error(path, 1, "missing header");
  if (!csv::split_record(line, f) || f != std::vector<std::string>{"t", "yaw_deg", "pitch_deg", "frontal"}) {
    throw parse_error(path, 1, "header must be t,yaw_deg,pitch_deg,frontal");
  }
  std::vector<gaze::GazeSample> samples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!csv::split_record(line, f) || f.size() != 4) throw parse_error(path, line_no, "expected 4 fields");
    gaze::GazeSample s;
    long long frontal = 0;
    if (!csv::parse_double(f[0], s.t) || !csv::parse_double(f[1], s.yaw_deg) ||
        !csv::parse_double(f[2], s.pitch_deg) || !csv::parse_int(f[3], frontal) ||
        (frontal != 0 && frontal != 1)) {
      throw parse_error(path, line_no, "malformed row");
    }
    if (s.t < 0.0) throw parse_error(path, line_no, "negative timestamp");
    if (s.yaw_deg < -180.0 || s.yaw_deg > 180.0 || s.pitch_deg < -90.0 || s.pitch_deg > 90.0) {
      throw Error(ErrorCode::AngleOutOfRange,
                  path.string() + ":" + std::to_string(line_no) + ": angle out of range");
    }
    s.frontal = frontal == 1;
    samples.push_back(s);
  }
  std::stable_sort(samples.begin(), samples.end(),
                   [](const gaze::GazeSample& a, const gaze::GazeSample& b) { return a.t < b.t; });
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].t == samples[i - 1].t) {
      throw parse_error(path, 0, "duplicate timestamp " + csv::format_double(samples[i].t));
    }
  }
  return samples;
}

void write_gaze(const fs::path& path, const std::vector<gaze::GazeSample>& samples) {
  std::string out = "t,yaw_deg,pitch_deg,frontal\n";
  for (const auto& s : samples) {
    out += csv::format_double(s.t) + "," + csv::format_double(s.yaw_deg) + "," +
           csv::format_double(s.pitch_deg) + "," + (s.frontal ? "1" : "0") + "\n";
  }
  write_text(path, out);
}

// --- speakers ---------------------------------------------------------------

SpeakerTable load_speakers(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  std::vector<std::string> f;
  if (!std::getline(in, line)) throw parse_error(path, 1, "missing header");
  if (!csv::split_record(line, f) || f != std::vector<std::string>{"speaker_id", "party", "gender"}) {
    throw parse_error(path, 1, "header must be speaker_id,party,gender");
  }
  SpeakerTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!csv::split_record(line, f) || f.size() != 3) throw parse_error(path, line_no, "expected 3 fields");
    if (f[0].empty() || f[1].empty()) throw parse_error(path, line_no, "empty speaker or party");
    SpeakerInfo info{f[0], f[1], 'm'};
    if (f[2] == "m" || f[2] == "M" || f[2] == "male") {
      info.gender = 'm';
    } else if (f[2] == "f" || f[2] == "F" || f[2] == "female") {
      info.gender = 'f';
    } else {
      throw parse_error(path, line_no, "gender must be m or f");
    }
    if (!table.emplace(info.speaker_id, info).second) {
      throw parse_error(path, line_no, "duplicate speaker '" + info.speaker_id + "'");
    }
  }
  return table;
}

void write_speakers(const fs::path& path, const SpeakerTable& speakers) {
  std::string out = "speaker_id,party,gender\n";
  for (const auto& [id, s] : speakers) out += csv::row({s.speaker_id, s.party, std::string(1, s.gender)});
  write_text(path, out);
}

// --- audio ------------------------------------------------------------------

pitch::AudioBuffer read_wav(const fs::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  auto bad = [&](const std::string& why) { return parse_error(path, 0, why); };
  if (bytes.size() < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0) {
    throw bad("not a RIFF/WAVE file");
  }
  std::size_t pos = 12;
  int channels = 0;
  int sample_rate = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = le32(p + pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) throw bad("truncated chunk");
    if (std::memcmp(p + pos, "fmt ", 4) == 0) {
      if (size < 16) throw bad("short fmt chunk");
      const std::uint16_t format = le16(p + body);
      channels = le16(p + body + 2);
      sample_rate = static_cast<int>(le32(p + body + 4));
      const std::uint16_t bits = le16(p + body + 14);
      const bool pcm = format == 1 || (format == 0xFFFE && size >= 26 && le16(p + body + 24) == 1);
      if (!pcm || bits != 16) throw bad("only PCM 16-bit audio is supported");
      if (channels < 1 || channels > 2) throw bad("only mono or stereo audio is supported");
      have_fmt = true;
    } else if (std::memcmp(p + pos, "data", 4) == 0) {
      data = p + body;
      data_size = size;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt || data == nullptr) throw bad("missing fmt or data chunk");
  const std::size_t frame_bytes = 2 * static_cast<std::size_t>(channels);
  const std::size_t frames = data_size / frame_bytes;
  pitch::AudioBuffer audio;
  audio.sample_rate = sample_rate;
  audio.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      acc += static_cast<std::int16_t>(le16(data + i * frame_bytes + 2 * static_cast<std::size_t>(c)));
    }
    audio.samples[i] = acc / channels / 32768.0;
  }
  return audio;
}

void write_wav(const fs::path& path, const pitch::AudioBuffer& audio) {
  const auto n = static_cast<std::uint32_t>(audio.samples.size());
  std::string out;
  out.reserve(44 + 2 * static_cast<std::size_t>(n));
  out += "RIFF";
  put32(out, 36 + 2 * n);
  out += "WAVEfmt ";
  put32(out, 16);
  put16(out, 1);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(audio.sample_rate));
  put32(out, static_cast<std::uint32_t>(audio.sample_rate) * 2);
  put16(out, 2);
  put16(out, 16);
  out += "data";
  put32(out, 2 * n);
  for (double x : audio.samples) {
    const long code = std::clamp(std::lround(std::clamp(x, -1.0, 1.0) * 32768.0), -32768L, 32767L);
    put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(code)));
  }
  write_text(path, out);
}

// --- panels and counts -----------------------------------------------------

stats::Panel load_panel(const fs::path& path, const std::string& y_column,
                        const std::string& group_column, const std::vector<std::string>& regressors) {
  auto in = open_in(path);
  std::string line;
  std::vector<std::string> f;
  if (!std::getline(in, line) || !csv::split_record(line, f)) throw parse_error(path, 1, "missing header");
  auto column = [&](const std::string& name) {
    const auto it = std::find(f.begin(), f.end(), name);
    if (it == f.end()) throw parse_error(path, 1, "no column '" + name + "'");
    return static_cast<std::size_t>(it - f.begin());
  };
  const std::size_t width = f.size();
  const std::size_t y_col = column(y_column);
  const std::size_t g_col = column(group_column);
  std::vector<std::size_t> x_cols;
  for (const auto& r : regressors) x_cols.push_back(column(r));

  stats::Panel panel;
  panel.regressor_names = regressors;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!csv::split_record(line, f) || f.size() != width) {
      throw parse_error(path, line_no, "expected " + std::to_string(width) + " fields");
    }
    stats::PanelRow row;
    if (!csv::parse_double(f[y_col], row.y)) throw parse_error(path, line_no, "y is not a number");
    row.group = f[g_col];
    if (row.group.empty()) throw parse_error(path, line_no, "empty group");
    for (std::size_t c : x_cols) {
      double v = 0.0;
      if (!csv::parse_double(f[c], v)) throw parse_error(path, line_no, "regressor is not a number");
      row.regressors.push_back(v);
    }
    panel.rows.push_back(std::move(row));
  }
  return panel;
}

void write_panel(const fs::path& path, const stats::Panel& panel) {
  std::vector<std::string> header = {"y", "group"};
  header.insert(header.end(), panel.regressor_names.begin(), panel.regressor_names.end());
  std::string out = csv::row(header);
  for (const auto& r : panel.rows) {
    std::vector<std::string> fields = {csv::format_double(r.y), r.group};
    for (double v : r.regressors) fields.push_back(csv::format_double(v));
    out += csv::row(fields);
  }
  write_text(path, out);
}

stats::WordCounts load_counts(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  std::vector<std::string> f;
  if (!std::getline(in, line) || !csv::split_record(line, f) ||
      f != std::vector<std::string>{"word", "count"}) {
    throw parse_error(path, 1, "header must be word,count");
  }
  stats::WordCounts counts;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    long long c = 0;
    if (!csv::split_record(line, f) || f.size() != 2 || f[0].empty() || !csv::parse_int(f[1], c) || c < 0) {
      throw parse_error(path, line_no, "expected word,count with a non-negative count");
    }
    counts[f[0]] += c;
  }
  return counts;
}

// --- manifest ---------------------------------------------------------------

CorpusManifest load_manifest(const fs::path& path) {
  const json doc = read_json(path);
  const fs::path base = path.parent_path();
  CorpusManifest m;
  try {
    m.format_version = doc.at("format_version").get<int>();
    if (m.format_version != kFormatVersion) {
      throw Error(ErrorCode::VersionMismatch, path.string() + ": format_version " +
                                                  std::to_string(m.format_version) + ", expected " +
                                                  std::to_string(kFormatVersion));
    }
    m.speakers = base / doc.at("speakers").get<std::string>();
    std::set<std::string> seen;
    for (const auto& s : doc.at("sessions")) {
      ManifestSession ms;
      ms.session_id = s.at("session_id").get<std::string>();
      ms.transcript = base / s.at("transcript").get<std::string>();
      ms.audio = base / s.at("audio").get<std::string>();
      ms.gaze = base / s.at("gaze").get<std::string>();
      ms.speaker_id = s.at("speaker_id").get<std::string>();
      if (!safe_id(ms.session_id)) throw parse_error(path, 0, "invalid session id '" + ms.session_id + "'");
      if (!seen.insert(ms.session_id).second) {
        throw parse_error(path, 0, "duplicate session id '" + ms.session_id + "'");
      }
      m.sessions.push_back(std::move(ms));
    }
  } catch (const json::exception& e) {
    throw parse_error(path, 0, e.what());
  }
  auto require = [](const fs::path& p) {
    if (!fs::exists(p)) throw Error(ErrorCode::MissingFile, "missing file '" + p.string() + "'");
  };
  require(m.speakers);
  for (const auto& s : m.sessions) {
    require(s.transcript);
    require(s.audio);
    require(s.gaze);
  }
  return m;
}

void write_manifest(const fs::path& path, const CorpusManifest& manifest) {
  const fs::path base = path.parent_path();
  auto rel = [&](const fs::path& p) { return p.lexically_relative(base).generic_string(); };
  json doc;
  doc["format_version"] = manifest.format_version;
  doc["speakers"] = rel(manifest.speakers);
  doc["sessions"] = json::array();
  for (const auto& s : manifest.sessions) {
    doc["sessions"].push_back({{"session_id", s.session_id},
                               {"transcript", rel(s.transcript)},
                               {"audio", rel(s.audio)},
                               {"gaze", rel(s.gaze)},
                               {"speaker_id", s.speaker_id}});
  }
  write_text(path, doc.dump(2) + "\n");
}

std::vector<SessionData> load_sessions(const CorpusManifest& manifest) {
  std::vector<SessionData> out;
  out.reserve(manifest.sessions.size());
  for (const auto& s : manifest.sessions) {
    SessionData d;
    d.session_id = s.session_id;
    d.speaker_id = s.speaker_id;
    d.words = load_transcript(s.transcript, s.session_id);
    if (d.words.speaker_id() != s.speaker_id) {
      throw parse_error(s.transcript, 0, "speaker differs from manifest speaker '" + s.speaker_id + "'");
    }
    d.audio = read_wav(s.audio);
    d.gaze = load_gaze(s.gaze);
    out.push_back(std::move(d));
  }
  return out;
}

// --- index ------------------------------------------------------------------

void build_index(const fs::path& manifest_path, const fs::path& out_dir) {
  const auto manifest = load_manifest(manifest_path);
  const auto speakers = load_speakers(manifest.speakers);
  const auto sessions = load_sessions(manifest);
  for (const auto& s : sessions) {
    if (!speakers.count(s.speaker_id)) {
      throw Error(ErrorCode::MissingPartyMetadata,
                  "speaker '" + s.speaker_id + "' missing from " + manifest.speakers.string());
    }
  }

  fs::path target = out_dir;
  if (target.filename().empty()) target = target.parent_path();
  const fs::path tmp = target.string() + ".tmp";
  std::error_code ec;
  fs::remove_all(tmp, ec);
  fs::create_directories(tmp / "sessions");
  fs::create_directories(tmp / "audio");

  json index;
  index["format_version"] = kFormatVersion;
  index["speakers"] = json::array();
  for (const auto& [id, s] : speakers) {
    index["speakers"].push_back({{"speaker_id", s.speaker_id}, {"party", s.party}, {"gender", std::string(1, s.gender)}});
  }
  index["sessions"] = json::array();
  for (const auto& s : sessions) {
    json blob;
    blob["format_version"] = kFormatVersion;
    blob["session_id"] = s.session_id;
    blob["speaker_id"] = s.speaker_id;
    blob["words"] = words_to_json(s.words);
    json gz = json::array();
    for (const auto& g : s.gaze) gz.push_back({g.t, g.yaw_deg, g.pitch_deg, g.frontal ? 1 : 0});
    blob["gaze"] = std::move(gz);
    const std::string blob_rel = "sessions/" + s.session_id + ".json";
    const std::string audio_rel = "audio/" + s.session_id + ".wav";
    write_text(tmp / blob_rel, blob.dump() + "\n");
    write_wav(tmp / audio_rel, s.audio);
    index["sessions"].push_back({{"session_id", s.session_id},
                                 {"speaker_id", s.speaker_id},
                                 {"blob", blob_rel},
                                 {"audio", audio_rel},
                                 {"words", s.words.size()},
                                 {"gaze_samples", s.gaze.size()},
                                 {"audio_samples", s.audio.samples.size()},
                                 {"sample_rate", s.audio.sample_rate}});
  }
  write_text(tmp / "manifest.json", index.dump(2) + "\n");

  const fs::path old = target.string() + ".old";
  fs::remove_all(old, ec);
  if (fs::exists(target)) fs::rename(target, old);
  fs::rename(tmp, target);
  fs::remove_all(old, ec);
}

CorpusIndex CorpusIndex::open(const fs::path& dir) {
  const fs::path mpath = dir / "manifest.json";
  if (!fs::exists(mpath)) throw Error(ErrorCode::MissingFile, "no index at '" + dir.string() + "'");
  const json doc = read_json(mpath);
  CorpusIndex idx;
  idx.dir_ = dir;
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kFormatVersion) {
      throw Error(ErrorCode::VersionMismatch, mpath.string() + ": format_version " +
                                                  std::to_string(version) + ", expected " +
                                                  std::to_string(kFormatVersion));
    }
    for (const auto& s : doc.at("speakers")) {
      SpeakerInfo info;
      info.speaker_id = s.at("speaker_id").get<std::string>();
      info.party = s.at("party").get<std::string>();
      info.gender = s.at("gender").get<std::string>() == "f" ? 'f' : 'm';
      idx.speakers_.emplace(info.speaker_id, info);
    }
    for (const auto& s : doc.at("sessions")) idx.session_ids_.push_back(s.at("session_id").get<std::string>());
  } catch (const json::exception& e) {
    throw parse_error(mpath, 0, e.what());
  }
  return idx;
}

SessionData CorpusIndex::load_session(const std::string& session_id) const {
  if (std::find(session_ids_.begin(), session_ids_.end(), session_id) == session_ids_.end()) {
    throw Error(ErrorCode::MissingFile, "session '" + session_id + "' not in index");
  }
  const fs::path blob_path = dir_ / "sessions" / (session_id + ".json");
  const json blob = read_json(blob_path);
  SessionData d;
  try {
    if (blob.at("format_version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::VersionMismatch, blob_path.string() + ": unexpected format_version");
    }
    d.session_id = blob.at("session_id").get<std::string>();
    d.speaker_id = blob.at("speaker_id").get<std::string>();
    std::vector<timeline::Element> words;
    for (const auto& w : blob.at("words")) {
      words.push_back({w.at("id").get<std::string>(),
                       {w.at("start").get<double>(), w.at("end").get<double>(), false},
                       timeline::Word{w.at("word").get<std::string>()}});
    }
    d.words = timeline::build_stream(timeline::Modality::Text, d.session_id, d.speaker_id, std::move(words));
    for (const auto& g : blob.at("gaze")) {
      d.gaze.push_back({g.at(0).get<double>(), g.at(1).get<double>(), g.at(2).get<double>(),
                        g.at(3).get<int>() == 1});
    }
  } catch (const json::exception& e) {
    throw parse_error(blob_path, 0, e.what());
  }
  d.audio = read_wav(dir_ / "audio" / (session_id + ".wav"));
  return d;
}

std::vector<SessionData> CorpusIndex::load_all() const {
  std::vector<SessionData> out;
  out.reserve(session_ids_.size());
  for (const auto& id : session_ids_) out.push_back(load_session(id));
  return out;
}

}  // namespace mmalign::ingest
