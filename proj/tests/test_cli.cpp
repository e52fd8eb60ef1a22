#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "selectkit/cli.hpp"
#include "selectkit/errors.hpp"
#include "selectkit/fixture_backend.hpp"
#include "selectkit/io.hpp"
#include "selectkit/run_record.hpp"
#include "support.hpp"

using namespace selectkit;
using selectkit::testkit::TempDir;
using selectkit::testkit::fixture_path;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args, const CliHooks& hooks = {}) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err, hooks);
  return {code, out.str(), err.str()};
}

MiningResult blood_result() {
  auto b = FixtureBackend::load(fixture_path("blood_fixture.json"));
  return mine_anchor(Concept("blood"), MiningConfig{}, Backends::uniform(b));
}

RunRecord blood_record() {
  return make_run_record({{"target", "blood"}, {"seed", 0}}, "fixture:test", blood_result(),
                         {3, 4});
}

}  // namespace

TEST(RunRecord, RunIdIsStable) {
  nlohmann::json cfg{{"a", 1}, {"b", "x"}};
  const auto a = compute_run_id(cfg, "ngram:1", Concept("cat"));
  EXPECT_EQ(a, compute_run_id(nlohmann::json::parse(R"({"b":"x","a":1})"), "ngram:1",
                              Concept(" Cat")));
  EXPECT_NE(a, compute_run_id(cfg, "ngram:2", Concept("cat")));
  EXPECT_NE(a, compute_run_id(cfg, "ngram:1", Concept("dog")));
  EXPECT_EQ(a.size(), 64u);
}

TEST(RunRecord, SameResultGivesIdenticalFiles) {
  TempDir d1("rec1"), d2("rec2");
  const auto p1 = write_run_record(blood_record(), d1.path());
  const auto p2 = write_run_record(blood_record(), d2.path());
  EXPECT_EQ(p1.filename(), p2.filename());
  EXPECT_EQ(read_file(p1), read_file(p2));
  EXPECT_EQ(p1.filename().string().rfind("run-", 0), 0u);
}

TEST(RunRecord, RoundTrip) {
  const auto rec = blood_record();
  const auto text = serialize_run_record(rec);
  const auto back = parse_run_record(text);
  EXPECT_EQ(back.run_id, rec.run_id);
  EXPECT_EQ(back.config, rec.config);
  EXPECT_EQ(back.result.optimal_anchor.key(), "sap");
  EXPECT_EQ(back.cache.hits, 3u);
  EXPECT_EQ(serialize_run_record(back), text);
}

TEST(RunRecord, TimingStaysOutOfTheRecord) {
  const auto text = serialize_run_record(blood_record());
  EXPECT_EQ(text.find("\"ms\""), std::string::npos);
  EXPECT_EQ(text.back(), '\n');
  TempDir d("meta");
  const auto p = write_run_record(blood_record(), d.path());
  const auto meta = nlohmann::json::parse(read_file(write_run_meta(p, blood_result().timing)));
  EXPECT_TRUE(meta.contains("timing_ms"));
  EXPECT_TRUE(meta.at("timing_ms").contains("stage1"));
}

TEST(RunRecord, UnwritableDirectory) {
  TempDir d("blocked");
  const auto file = d / "plain";
  write_file_atomic(file, "x");
  EXPECT_THROW(write_run_record(blood_record(), file / "sub"), std::exception);
}

TEST(RunRecord, RejectsWrongVersion) {
  auto j = nlohmann::json::parse(serialize_run_record(blood_record()));
  j["format_version"] = 99;
  EXPECT_THROW(parse_run_record(j.dump()), ParseError);
  EXPECT_THROW(parse_run_record("{"), ParseError);
}

TEST(Cli, MineWithoutTargetIsUsageError) {
  auto r = run({"mine"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--target"), std::string::npos);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(Cli, UnknownSubcommandAndHelp) {
  EXPECT_EQ(run({"bogus"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, PipelineFailureIsExitTwo) {
  TempDir d("missing");
  auto r = run({"mine", "--target", "cat", "--corpus", (d / "nope.txt").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
}

TEST(Cli, MineGoldenRecord) {
  TempDir d("golden");
  const auto out = d / "run.json";
  auto r = run({"mine", "--target", "cat", "--category", "general", "--backend", "ngram",
                "--corpus", fixture_path("toy_corpus.txt").string(), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("optimal_anchor: dog"), std::string::npos);
  const auto rec = nlohmann::json::parse(read_file(out));
  const auto golden = nlohmann::json::parse(read_file(fixture_path("golden/mine_cat_result.json")));
  EXPECT_EQ(rec.at("result"), golden);
  EXPECT_TRUE(std::filesystem::exists(out.string() + ".meta.json"));
}

TEST(Cli, MineIsByteIdenticalAcrossRuns) {
  TempDir d("repeat");
  const std::vector<std::string> base{"mine", "--target", "blood", "--backend", "fixture",
                                      "--fixture", fixture_path("blood_fixture.json").string()};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", (d / "a.json").string()});
  b.insert(b.end(), {"--out", (d / "b.json").string(), "--threads", "4"});
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  const auto ja = nlohmann::json::parse(read_file(d / "a.json"));
  EXPECT_EQ(ja.at("result").at("optimal_anchor").at("name"), "sap");
  EXPECT_EQ(ja.at("result"), nlohmann::json::parse(read_file(d / "b.json")).at("result"));
}

TEST(Cli, ConfigFileUnderFlags) {
  TempDir d("config");
  write_file_atomic(d / "cfg.json",
                    R"({"target":"blood","backend":"fixture","uc_threshold":5.0,"fixture":")" +
                        fixture_path("blood_fixture.json").string() + "\"}");
  auto r = run({"mine", "--config", (d / "cfg.json").string(), "--uc-threshold", "1.0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rec = nlohmann::json::parse(r.out);
  EXPECT_EQ(rec.at("config").at("uc_threshold"), 1.0);
  EXPECT_EQ(rec.at("result").at("optimal_anchor").at("name"), "sap");
}

TEST(Cli, HttpBackendRerunUsesCache) {
  TempDir d("http");
  ::setenv("SELECT_BACKEND_URL", "http://scorer.invalid", 1);
  ::setenv("SELECT_API_KEY", "k", 1);
  auto t = std::make_shared<testkit::ScriptedScorer>();
  CliHooks hooks{t};
  const std::vector<std::string> args{"mine", "--target", "cat", "--backend", "http",
                                      "--cache-dir", (d / "cache").string()};
  auto first = run(args, hooks);
  ASSERT_EQ(first.code, 0) << first.err;
  const int calls = t->calls.load();
  EXPECT_GT(calls, 0);
  auto second = run(args, hooks);
  ASSERT_EQ(second.code, 0) << second.err;
  EXPECT_EQ(t->calls.load(), calls);
  const auto r1 = nlohmann::json::parse(first.out), r2 = nlohmann::json::parse(second.out);
  EXPECT_EQ(r1.at("result"), r2.at("result"));
  EXPECT_GT(r2.at("cache").at("hits").get<int>(), 0);
}

TEST(Cli, ReportOnObjectTable) {
  auto r = run({"report", "--in", fixture_path("table_select_rows.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* want : {"cat,0.8300,14.6000,99.6700,99.1600,94.2614",
                           "corgi,0.1000,0.6600,99.5900,77.2800,99.6095",
                           "Eiffel Tower,5.0400,9.3700,97.6000,95.4400,94.3084"}) {
    EXPECT_NE(r.out.find(want), std::string::npos) << want;
  }
  auto j = run({"report", "--in", fixture_path("table_select_rows.csv").string(), "--format",
                "json", "--fraction"});
  ASSERT_EQ(j.code, 0);
  EXPECT_EQ(nlohmann::json::parse(j.out).at("scale"), "fraction");
}

TEST(Cli, ScoreActivationCrr) {
  auto r = run({"score", "activation", "--rc", "53.65", "--nc", "9.85"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(nlohmann::json::parse(r.out).at("crr").get<double>(), 5.4467, 1e-4);
}

TEST(Cli, ScoreCoherence) {
  TempDir d("coh");
  write_file_atomic(d / "p.txt", "the cat barks\n");
  auto r = run({"score", "coherence", "--target", "cat", "--anchor", "dog", "--corpus",
                fixture_path("toy_corpus.txt").string(), "--prompts", (d / "p.txt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GT(nlohmann::json::parse(r.out).at("cos").get<double>(), 0.0);
}

TEST(Cli, EraseWritesDelta) {
  TempDir d("erase");
  auto r = run({"erase", "--target", "cat", "--anchor", "dog", "--retain", "wolf,raccoon",
                "--out", (d / "delta.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto delta = nlohmann::json::parse(read_file(d / "delta.json"));
  EXPECT_EQ(delta.at("rows"), 16);
  EXPECT_EQ(delta.at("cols"), 16);
}

TEST(Cli, EraseFromRunRecord) {
  TempDir d("erase-run");
  ASSERT_EQ(run({"mine", "--target", "blood", "--backend", "fixture", "--fixture",
                 fixture_path("blood_fixture.json").string(), "--out", (d / "r.json").string()})
                .code,
            0);
  auto r = run({"erase", "--from-run", (d / "r.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("sap"), std::string::npos);
}

TEST(Cli, TracePlanted) {
  TempDir d("trace");
  auto r = run({"trace", "--planted", "3", "--layers", "8", "--concept", "cat,dog", "--heatmap",
                (d / "h.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = read_file(d / "h.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}
