#include "doctest.h"

#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <unistd.h>

#include "json.hpp"
#include "mmalign/cli.hpp"
#include "mmalign/ingest.hpp"

using namespace mmalign;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mmalign");
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// One small corpus and index shared by the tests in this file.
struct Fixture {
  fs::path root;
  fs::path corpus;
  fs::path index;

  Fixture() {
    root = fs::temp_directory_path() / ("mmalign_cli_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    corpus = root / "corpus";
    index = root / "index";
    std::ofstream(root / "spec.json") << R"({"seed": 5, "speakers": 4, "words_per_speech": 80,
                                            "parties": ["AfD", "Greens"], "planted_effect": 0.15})";
    REQUIRE(run_cli({"synth", "--spec", (root / "spec.json").string(), "--out", corpus.string()}).code == 0);
    REQUIRE(run_cli({"ingest", "--manifest", (corpus / "manifest.json").string(), "--out", index.string()}).code == 0);
  }
  ~Fixture() { fs::remove_all(root); }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

}  // namespace

TEST_CASE("advise prints the strategy names") {
  auto r = run_cli({"advise", "--data", "continuous"});
  CHECK(r.code == 0);
  CHECK(r.out == "adversarial training\ndynamic time warping\n");
  r = run_cli({"advise", "--data", "discrete", "--representation", "non-semantic", "--integration", "implicit"});
  CHECK(r.out == "late fusion\nhidden Markov models\n");
  r = run_cli({"advise", "--data", "discrete"});
  CHECK(r.code == cli::kExitValidation);
  CHECK(r.err.find("IncompleteQuery") != std::string::npos);
  CHECK(run_cli({"advise", "--data", "liquid"}).code == cli::kExitValidation);
}

TEST_CASE("every flag in every command's help has a unit") {
  for (const char* cmd : {"ingest", "pitch", "segments", "align", "query", "regress", "fw", "advise", "synth"}) {
    auto r = run_cli({cmd, "--help"});
    CHECK(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    int flags = 0;
    while (std::getline(lines, line)) {
      if (line.rfind("  --", 0) != 0 || line.find("--help") != std::string::npos) continue;
      ++flags;
      INFO(cmd << ": " << line);
      CHECK(std::regex_search(line, std::regex(R"(\((path|Hz|samples|seconds|degrees|words|count|enum|unitless|boolean|integer|fraction|speaker SD|pseudo-counts|party name|column name|comma-separated|expression)[^)]*\))")));
    }
    CHECK(flags > 0);
  }
  auto top = run_cli({"--help"});
  CHECK(top.out.find("--threads") != std::string::npos);
  CHECK(top.out.find("(count") != std::string::npos);
}

TEST_CASE("usage and data errors map to exit codes") {
  auto& f = fixture();
  CHECK(run_cli({}).code == cli::kExitValidation);
  CHECK(run_cli({"frobnicate"}).code == cli::kExitValidation);
  CHECK(run_cli({"pitch", "--bogus"}).code == cli::kExitValidation);
  auto r = run_cli({"pitch", "--index", (f.root / "missing").string()});
  CHECK(r.code == cli::kExitData);
  CHECK(r.err.find("MissingFile") != std::string::npos);
  r = run_cli({"pitch", "--index", f.index.string(), "--pitch-floor", "300", "--pitch-ceiling", "100"});
  CHECK(r.code == cli::kExitValidation);
  CHECK(r.err.find("InvalidRange") != std::string::npos);
  CHECK(run_cli({"query", "--index", f.index.string(), "--select", "text", "--where", "gaze.colour==x"}).code ==
        cli::kExitValidation);

  std::ofstream(f.root / "bad.json") << R"({"unknown_key": 1})";
  r = run_cli({"--config", (f.root / "bad.json").string(), "advise", "--data", "continuous"});
  CHECK(r.code == cli::kExitValidation);
  CHECK(r.err.find("InvalidConfig") != std::string::npos);
}

TEST_CASE("config precedence: flag over config over default") {
  auto& f = fixture();
  std::ofstream(f.root / "cfg.json") << "{\"index\": \"" << f.index.generic_string() << "\", \"min_words\": 1000}";
  const auto cfg = (f.root / "cfg.json").string();
  auto via_config = run_cli({"--config", cfg, "segments"});
  REQUIRE(via_config.code == 0);
  CHECK(via_config.out == "session_id,speaker_id,segment_id,start_s,end_s,label,word_count,kept\n");
  auto via_flag = run_cli({"--config", cfg, "segments", "--min-words", "10"});
  auto plain = run_cli({"segments", "--index", f.index.string()});
  CHECK(via_flag.out == plain.out);
  CHECK(plain.out.find(",AfD,") != std::string::npos);
  // Global flags may follow the subcommand.
  CHECK(run_cli({"segments", "--index", f.index.string(), "--threads", "2"}).out == plain.out);
}

TEST_CASE("query returns exactly the planted in-segment words") {
  auto& f = fixture();
  auto r = run_cli({"query", "--index", f.index.string(), "--select", "text", "--where", "gaze.label==AfD"});
  REQUIRE(r.code == 0);
  std::set<std::pair<std::string, std::string>> got;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "session_id,element_id,start_s,end_s,value");
  while (std::getline(lines, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    got.emplace(line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1));
  }
  const auto truth = nlohmann::json::parse(slurp(f.corpus / "ground_truth.json"));
  std::set<std::pair<std::string, std::string>> expect;
  for (const auto& s : truth.at("sessions")) {
    for (const auto& w : s.at("addressed_word_ids")) expect.emplace(s.at("session_id"), w.get<std::string>());
  }
  CHECK(!expect.empty());
  CHECK(got == expect);
}

TEST_CASE("regress writes results files; panel round trip") {
  auto& f = fixture();
  const auto out = f.root / "reg";
  const auto panel = f.root / "panel.csv";
  auto r = run_cli({"regress", "--index", f.index.string(), "--out", out.string(), "--export-panel", panel.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("Party: Greens x Looks at AfD") != std::string::npos);
  const auto doc = nlohmann::json::parse(slurp(out / "results.json"));
  CHECK(doc.at("coefficients").size() == 2);
  CHECK(doc.at("coefficients")[1].at("name") == "party[Greens]:looks_at_AfD");
  CHECK(slurp(out / "margins.csv").rfind("cell,predicted,se,ci_low,ci_high\n", 0) == 0);

  const auto out2 = f.root / "reg2";
  r = run_cli({"regress", "--panel", panel.string(), "--regressors", "looks_at_AfD,party[Greens]:looks_at_AfD", "--out",
           out2.string()});
  REQUIRE(r.code == 0);
  const auto doc2 = nlohmann::json::parse(slurp(out2 / "results.json"));
  for (int i = 0; i < 2; ++i) {
    CHECK(doc2["coefficients"][i]["estimate"].get<double>() == doc["coefficients"][i]["estimate"].get<double>());
    CHECK(doc2["coefficients"][i]["se"].get<double>() == doc["coefficients"][i]["se"].get<double>());
  }
  CHECK(slurp(out2 / "results.txt") == slurp(out / "results.txt"));
  CHECK(run_cli({"regress", "--panel", panel.string(), "--out", out2.string()}).code == cli::kExitValidation);
}

TEST_CASE("fw from counts and from the index") {
  auto& f = fixture();
  std::ofstream(f.root / "a.csv") << "word,count\nx,9\ny,1\n";
  std::ofstream(f.root / "b.csv") << "word,count\nx,1\ny,9\n";
  auto r = run_cli({"fw", "--counts-a", (f.root / "a.csv").string(), "--counts-b", (f.root / "b.csv").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("comparison,word,count_a,count_b,delta,variance,z\na_vs_b,x,9,1,", 0) == 0);
  r = run_cli({"fw", "--counts-a", (f.root / "a.csv").string(), "--counts-b", (f.root / "b.csv").string(), "--prior",
           "0"});
  CHECK(r.code == cli::kExitValidation);
  r = run_cli({"fw", "--index", f.index.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("others->AfD_vs_rest,") != std::string::npos);
}

TEST_CASE("align and pitch output shape") {
  auto& f = fixture();
  auto r = run_cli({"align", "--index", f.index.string(), "--source", "text", "--target", "gaze"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find(",many-to-one\n") != std::string::npos);
  r = run_cli({"align", "--index", f.index.string(), "--source", "text", "--target", "audio", "--min-overlap", "0.01"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find(",one-to-many\n") != std::string::npos);
  r = run_cli({"pitch", "--index", f.index.string()});
  REQUIRE(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1 + 4 * 80);
}

TEST_CASE("default synthetic corpus: every interaction CI covers the planted 0.15") {
  auto& f = fixture();
  const auto corpus = f.root / "default_corpus";
  const auto index = f.root / "default_index";
  const auto out = f.root / "default_reg";
  REQUIRE(run_cli({"synth", "--out", corpus.string()}).code == 0);
  REQUIRE(run_cli({"ingest", "--manifest", (corpus / "manifest.json").string(), "--out", index.string()}).code == 0);
  REQUIRE(run_cli({"regress", "--index", index.string(), "--out", out.string()}).code == 0);
  const auto doc = nlohmann::json::parse(slurp(out / "results.json"));
  CHECK(doc.at("n_obs") == 20000);
  int interactions = 0;
  for (const auto& c : doc.at("coefficients")) {
    const auto name = c.at("name").get<std::string>();
    INFO(name);
    if (name.rfind("party[", 0) != 0) continue;
    ++interactions;
    CHECK(c.at("ci_low").get<double>() <= 0.15);
    CHECK(c.at("ci_high").get<double>() >= 0.15);
  }
  CHECK(interactions == 5);
  fs::remove_all(corpus);
  fs::remove_all(index);
}
