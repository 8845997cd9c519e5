#include "doctest.h"

#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include "mmalign/error.hpp"
#include "mmalign/ingest.hpp"
#include "mmalign/pipeline.hpp"

using namespace mmalign;
using namespace mmalign::ingest;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("mmalign_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  f << s;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ErrorCode code_of(const std::function<void()>& f, std::string* message = nullptr) {
  try {
    f();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidConfig;
}

// Every file under `dir`, relative path -> bytes.
std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).generic_string()] = slurp(e.path());
  }
  return out;
}

SynthSpec small_spec() {
  SynthSpec s;
  s.speakers = 4;
  s.words_per_speech = 60;
  s.parties = {"AfD", "Greens"};
  return s;
}

}  // namespace

TEST_CASE("transcript loading") {
  TempDir d;
  write(d.path / "t.jsonl",
        "{\"word\":\"Guten\",\"start\":0.0,\"end\":0.4,\"speaker_id\":\"mp1\"}\n"
        "\n"
        "{\"word\":\"Tag\",\"start\":0.5,\"end\":0.9,\"speaker_id\":\"mp1\",\"id\":\"x7\"}\n");
  auto s = load_transcript(d.path / "t.jsonl", "s1");
  REQUIRE(s.size() == 2);
  CHECK(s[0].id == "w0");
  CHECK(s[1].id == "x7");
  CHECK(s.speaker_id() == "mp1");
  CHECK(s.session_id() == "s1");

  write(d.path / "bad.jsonl",
        "{\"word\":\"a\",\"start\":0.0,\"end\":0.4,\"speaker_id\":\"mp1\"}\n"
        "{\"word\":\"b\",\"start\":0.9,\"end\":0.5,\"speaker_id\":\"mp1\"}\n");
  std::string msg;
  CHECK(code_of([&] { load_transcript(d.path / "bad.jsonl", "s"); }, &msg) == ErrorCode::ParseError);
  CHECK(msg.find("bad.jsonl:2") != std::string::npos);

  write(d.path / "ov.jsonl",
        "{\"word\":\"a\",\"start\":0.0,\"end\":0.6,\"speaker_id\":\"mp1\"}\n"
        "{\"word\":\"b\",\"start\":0.5,\"end\":0.9,\"speaker_id\":\"mp1\"}\n");
  CHECK(code_of([&] { load_transcript(d.path / "ov.jsonl", "s"); }) == ErrorCode::OverlappingWords);

  write(d.path / "spk.jsonl",
        "{\"word\":\"a\",\"start\":0.0,\"end\":0.4,\"speaker_id\":\"mp1\"}\n"
        "{\"word\":\"b\",\"start\":0.5,\"end\":0.9,\"speaker_id\":\"mp2\"}\n");
  CHECK(code_of([&] { load_transcript(d.path / "spk.jsonl", "s"); }) == ErrorCode::ParseError);
  write(d.path / "junk.jsonl", "not json\n");
  CHECK(code_of([&] { load_transcript(d.path / "junk.jsonl", "s"); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { load_transcript(d.path / "absent.jsonl", "s"); }) == ErrorCode::MissingFile);

  write_transcript(d.path / "rt.jsonl", s);
  CHECK(load_transcript(d.path / "rt.jsonl", "s1") == s);
}

TEST_CASE("gaze loading") {
  TempDir d;
  write(d.path / "g.csv", "t,yaw_deg,pitch_deg,frontal\n0.04,10,1,0\n0.0,50,0,1\n");
  auto g = load_gaze(d.path / "g.csv");
  REQUIRE(g.size() == 2);
  CHECK(g[0] == gaze::GazeSample{0.0, 50, 0, true});
  CHECK(g[1].frontal == false);

  write(d.path / "a.csv", "t,yaw_deg,pitch_deg,frontal\n0.0,200,0,1\n");
  CHECK(code_of([&] { load_gaze(d.path / "a.csv"); }) == ErrorCode::AngleOutOfRange);
  write(d.path / "h.csv", "time,yaw,pitch,frontal\n0.0,20,0,1\n");
  CHECK(code_of([&] { load_gaze(d.path / "h.csv"); }) == ErrorCode::ParseError);
  write(d.path / "f.csv", "t,yaw_deg,pitch_deg,frontal\n0.0,20,0,2\n");
  CHECK(code_of([&] { load_gaze(d.path / "f.csv"); }) == ErrorCode::ParseError);
  write(d.path / "x.csv", "t,yaw_deg,pitch_deg,frontal\n0.0,20,0\n");
  std::string msg;
  CHECK(code_of([&] { load_gaze(d.path / "x.csv"); }, &msg) == ErrorCode::ParseError);
  CHECK(msg.find("x.csv:2") != std::string::npos);

  write_gaze(d.path / "rt.csv", g);
  CHECK(load_gaze(d.path / "rt.csv") == g);
}

TEST_CASE("speakers, counts and panels") {
  TempDir d;
  write(d.path / "s.csv", "speaker_id,party,gender\nmp1,AfD,m\nmp2,\"CDU/CSU\",female\n");
  auto sp = load_speakers(d.path / "s.csv");
  CHECK(sp.at("mp2").party == "CDU/CSU");
  CHECK(sp.at("mp2").range().floor == 100.0);
  CHECK(sp.at("mp1").range().ceiling == 300.0);
  write_speakers(d.path / "s2.csv", sp);
  CHECK(load_speakers(d.path / "s2.csv").size() == 2);

  write(d.path / "c.csv", "word,count\nhaus,3\nstaat,0\nhaus,2\n");
  CHECK(load_counts(d.path / "c.csv") == stats::WordCounts{{"haus", 5}, {"staat", 0}});
  write(d.path / "c2.csv", "word,count\nhaus,-1\n");
  CHECK(code_of([&] { load_counts(d.path / "c2.csv"); }) == ErrorCode::ParseError);

  stats::Panel p;
  p.regressor_names = {"a", "b"};
  p.rows = {{0.1, "g1", {1, 0}}, {-0.25, "g2", {0, 1}}};
  write_panel(d.path / "p.csv", p);
  auto q = load_panel(d.path / "p.csv", "y", "group", {"b"});
  REQUIRE(q.rows.size() == 2);
  CHECK(q.rows[1].y == -0.25);
  CHECK(q.rows[1].regressors == std::vector<double>{1});
  CHECK(code_of([&] { load_panel(d.path / "p.csv", "y", "group", {"c"}); }) == ErrorCode::ParseError);
}

TEST_CASE("wav round trip") {
  TempDir d;
  pitch::AudioBuffer a;
  a.sample_rate = 16000;
  for (int i = 0; i < 1000; ++i) a.samples.push_back(std::sin(i * 0.05) * 0.8);
  a.samples.push_back(2.0);  // clamps
  write_wav(d.path / "a.wav", a);
  auto b = read_wav(d.path / "a.wav");
  CHECK(b.sample_rate == 16000);
  REQUIRE(b.samples.size() == a.samples.size());
  for (std::size_t i = 0; i + 1 < a.samples.size(); ++i) CHECK(std::abs(a.samples[i] - b.samples[i]) <= 0.5 / 32768.0);
  CHECK(b.samples.back() == 32767.0 / 32768.0);
  // A second round trip is exact.
  write_wav(d.path / "b.wav", b);
  CHECK(read_wav(d.path / "b.wav").samples == b.samples);

  write(d.path / "bad.wav", "RIFF....WAVEjunk");
  CHECK(code_of([&] { read_wav(d.path / "bad.wav"); }) == ErrorCode::ParseError);
}

TEST_CASE("synthetic corpus is deterministic and indexable") {
  TempDir d;
  synth_corpus(small_spec(), d.path / "a");
  synth_corpus(small_spec(), d.path / "b");
  CHECK(tree(d.path / "a") == tree(d.path / "b"));
  auto other = small_spec();
  other.seed = 8;
  synth_corpus(other, d.path / "c");
  CHECK(tree(d.path / "a") != tree(d.path / "c"));

  build_index(d.path / "a" / "manifest.json", d.path / "idx1");
  build_index(d.path / "a" / "manifest.json", d.path / "idx2");
  CHECK(tree(d.path / "idx1") == tree(d.path / "idx2"));
  // Rebuilding in place replaces the directory.
  build_index(d.path / "a" / "manifest.json", d.path / "idx1");
  CHECK(tree(d.path / "idx1") == tree(d.path / "idx2"));
  CHECK(!fs::exists(d.path / "idx1.tmp"));
  CHECK(!fs::exists(d.path / "idx1.old"));

  const auto idx = CorpusIndex::open(d.path / "idx1");
  CHECK(idx.session_ids().size() == 4);
  CHECK(fs::exists(d.path / "idx1" / "sessions" / "s01.json"));

  // Index content equals freshly parsed inputs.
  const auto fresh = load_sessions(load_manifest(d.path / "a" / "manifest.json"));
  const auto indexed = idx.load_all();
  REQUIRE(fresh.size() == indexed.size());
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    CHECK(fresh[i].words == indexed[i].words);
    CHECK(fresh[i].gaze == indexed[i].gaze);
    CHECK(fresh[i].audio.samples == indexed[i].audio.samples);
  }

  // In-memory generation matches what was written.
  const auto mem = generate_synthetic(small_spec());
  for (std::size_t i = 0; i < fresh.size(); ++i) {
    CHECK(mem.sessions[i].words == fresh[i].words);
    CHECK(mem.sessions[i].audio.samples == fresh[i].audio.samples);
    CHECK(mem.sessions[i].gaze == fresh[i].gaze);
  }
}

TEST_CASE("synthetic ground truth is consistent with the pipeline") {
  auto spec = small_spec();
  spec.words_per_speech = 200;
  const auto corpus = generate_synthetic(spec);
  const auto analysis = pipeline::analyze(corpus.sessions, corpus.speakers, {});
  for (std::size_t si = 0; si < corpus.sessions.size(); ++si) {
    const auto& s = corpus.sessions[si];
    const auto& truth = corpus.truth.sessions[si];
    std::set<std::string> planted(truth.addressed_word_ids.begin(), truth.addressed_word_ids.end());
    std::set<std::string> found;
    for (std::size_t i = 0; i < s.words.size(); ++i) {
      if (analysis.sessions[si].addressed[i]) found.insert(s.words[i].id);
    }
    CHECK(found == planted);
    CHECK(analysis.sessions[si].segments.size() == truth.segments.size());
    // Word pitch recovers the planted tone.
    for (const auto& wp : analysis.sessions[si].word_pitch.words) {
      REQUIRE(wp.mean_f0);
      CHECK(std::abs(*wp.mean_f0 - truth.word_f0.at(wp.word_id)) / truth.word_f0.at(wp.word_id) < 0.01);
    }
  }
}

TEST_CASE("manifest errors") {
  TempDir d;
  synth_corpus(small_spec(), d.path / "c");
  fs::remove(d.path / "c" / "sessions" / "s02.wav");
  std::string msg;
  CHECK(code_of([&] { build_index(d.path / "c" / "manifest.json", d.path / "idx"); }, &msg) ==
        ErrorCode::MissingFile);
  CHECK(msg.find("s02.wav") != std::string::npos);

  write(d.path / "v.json", "{\"format_version\": 9, \"speakers\": \"s.csv\", \"sessions\": []}");
  CHECK(code_of([&] { load_manifest(d.path / "v.json"); }) == ErrorCode::VersionMismatch);
  CHECK(code_of([&] { CorpusIndex::open(d.path / "nothing"); }) == ErrorCode::MissingFile);

  SynthSpec bad = small_spec();
  bad.address_density = 1.5;
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::InvalidSpec);
  bad = small_spec();
  bad.target_party = "SPD";
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::InvalidSpec);
}
