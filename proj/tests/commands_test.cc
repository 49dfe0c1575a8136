// Copyright 2026 The CDNMF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cdnmf/commands.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cdnmf/datasets.h"
#include "cdnmf/errors.h"
#include "cdnmf/log.h"
#include "gtest/gtest.h"

namespace cdnmf {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class TempDir {
 public:
  explicit TempDir(const std::string& tag)
      : path_(fs::temp_directory_path() /
              ("cdnmf_commands_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig sbm_config(const fs::path& out, std::vector<std::uint64_t> seeds = {0, 1}) {
  RunConfig c = parse_run_config(json::parse(R"({
    "dataset": {"sbm": {"block_sizes": [20, 20], "p_in": 0.4, "p_out": 0.02, "seed": 5}},
    "hyper": {"widths": [8, 2]},
    "optimizer": {"epochs": 5},
    "pretrain": {"iters": 50}})"));
  c.output_dir = out;
  c.seeds = std::move(seeds);
  return c;
}

TEST(SummarizeTest, MeanAndSampleStd) {
  const Summary one = summarize({0.5});
  EXPECT_EQ(one.mean, 0.5);
  EXPECT_EQ(one.std, 0.0);
  const Summary s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.std, std::sqrt(5.0 / 3.0));
}

TEST(CmdTrainTest, WritesResultAndAssignments) {
  TempDir dir("train");
  const RunConfig c = sbm_config(dir.path() / "out");
  const RunResult r = cmd_train(c, {});
  ASSERT_EQ(r.runs.size(), 2u);
  ASSERT_TRUE(r.acc.has_value());

  const json doc = json::parse(slurp(dir.path() / "out" / "result.json"));
  EXPECT_TRUE(doc.contains("wall_seconds"));
  EXPECT_EQ(doc["runs"].size(), 2u);
  EXPECT_EQ(doc["config"], to_json(c));
  double sum = 0.0;
  for (const json& run : doc["runs"]) sum += run["eval"]["acc"].get<double>();
  EXPECT_DOUBLE_EQ(doc["acc"]["mean"].get<double>(), sum / 2.0);
  EXPECT_EQ(doc["runs"][0]["eval"]["nmi_normalization"], "arithmetic");
  EXPECT_EQ(doc["runs"][0]["trace"].size(), static_cast<std::size_t>(r.runs[0].epochs_run));

  const std::string csv = slurp(dir.path() / "out" / "assignments.csv");
  EXPECT_EQ(csv.rfind("node_id,predicted_community\nn0,", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 41);
  EXPECT_EQ(csv, slurp(dir.path() / "out" / "assignments_seed0.csv"));
  EXPECT_TRUE(fs::exists(dir.path() / "out" / "assignments_seed1.csv"));
  EXPECT_FALSE(fs::exists(dir.path() / "out" / "result.json.tmp"));
}

TEST(CmdTrainTest, ResultIsReproducibleModuloTiming) {
  CommandContext ctx;
  ctx.write_outputs = false;
  const RunConfig c = sbm_config("unused");
  const std::string a = to_json(cmd_train(c, ctx), false).dump(2);
  const std::string b = to_json(cmd_train(c, ctx), false).dump(2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find("wall_seconds"), std::string::npos);
}

TEST(CmdTrainTest, CheckpointCacheGivesSameResult) {
  TempDir dir("ck");
  CommandContext ctx;
  ctx.write_outputs = false;
  const RunConfig c = sbm_config("unused", {3});
  const json plain = to_json(cmd_train(c, ctx), false);
  ctx.checkpoint_dir = dir.path() / "ck";
  const json first = to_json(cmd_train(c, ctx), false);
  ASSERT_EQ(std::distance(fs::directory_iterator(dir.path() / "ck"), fs::directory_iterator()), 1);
  const json cached = to_json(cmd_train(c, ctx), false);
  EXPECT_EQ(plain, first);
  EXPECT_EQ(plain, cached);
}

TEST(CmdTraceTest, OneRowPerEpoch) {
  TempDir dir("trace");
  RunConfig c = sbm_config(dir.path());
  c.optimizer.epochs = 1;
  cmd_trace(c, {});
  const std::string csv = slurp(dir.path() / "trace.csv");
  EXPECT_EQ(csv.rfind("epoch,l_dnmf,l_reg,l_cl,total\n1,", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST(CmdTraceTest, TotalSettlesAfterEpochFive) {
  CommandContext ctx;
  ctx.write_outputs = false;
  RunConfig c = sbm_config("unused", {0});
  c.optimizer.epochs = 30;
  c.optimizer.patience = 0;
  const auto trace = cmd_trace(c, ctx).runs.front().trace;
  ASSERT_EQ(trace.size(), 30u);
  for (std::size_t e = 5; e < trace.size(); ++e) {
    EXPECT_LE(trace[e].loss.total, trace[e - 1].loss.total * 1.01) << "epoch " << e + 1;
  }
}

TEST(TraceCsvTest, Format) {
  EpochRecord e;
  e.epoch = 3;
  e.loss = {1.5, 0.25, 0.125, 2.0};
  EXPECT_EQ(trace_csv({e}), "epoch,l_dnmf,l_reg,l_cl,total\n3,1.5,0.25,0.125,2\n");
}

TEST(CmdAblateTest, IndicatorFeaturesGivePerfectAttributeAblation) {
  TempDir dir("ablate");
  RunConfig c = parse_run_config(json::parse(R"({
    "dataset": {"sbm": {"block_sizes": [15, 15, 15], "p_in": 0.3, "p_out": 0.05,
                        "feature_dim": 1, "feature_noise": 0.0}},
    "hyper": {"widths": [3]}, "optimizer": {"epochs": 3}, "pretrain": {"iters": 60},
    "seeds": [0]})"));
  c.output_dir = dir.path();
  const auto results = cmd_ablate(c, {});
  ASSERT_EQ(results.size(), 3u);
  EXPECT_EQ(results[0].config.ablation, Ablation::kNone);
  EXPECT_EQ(results[1].config.ablation, Ablation::kTopologyOnly);
  EXPECT_EQ(results[2].config.ablation, Ablation::kAttributesOnly);
  EXPECT_EQ(results[2].acc->mean, 1.0);
  for (const char* sub : {"full", "topo-only", "attr-only"}) {
    EXPECT_TRUE(fs::exists(dir.path() / sub / "result.json")) << sub;
  }
  const std::string table = slurp(dir.path() / "ablation.md");
  EXPECT_NE(table.find("| attr-only"), std::string::npos);
}

TEST(CmdBenchmarkTest, RowsAndFailures) {
  TempDir dir("bench");
  set_log_level(LogLevel::kQuiet);
  RunConfig good = sbm_config("unused", {0});
  RunConfig multi = sbm_config("unused", {1, 2, 3, 4, 5});
  RunConfig bad = parse_run_config(json::parse(R"({"dataset": {"name": "nowhere"}})"));
  const auto rows =
      cmd_benchmark({good, bad, multi}, {"single", "missing", "five"}, dir.path(), {});
  set_log_level(LogLevel::kWarning);
  ASSERT_EQ(rows.size(), 3u);
  ASSERT_TRUE(rows[0].result.has_value());
  EXPECT_EQ(rows[0].result->acc->std, 0.0);
  EXPECT_FALSE(rows[1].result.has_value());
  EXPECT_FALSE(rows[1].error.empty());
  ASSERT_TRUE(rows[2].result.has_value());
  EXPECT_EQ(rows[2].result->runs.size(), 5u);

  // Rows agree with a standalone run of the same config.
  CommandContext quiet;
  quiet.write_outputs = false;
  EXPECT_EQ(cmd_train(good, quiet).acc->mean, rows[0].result->acc->mean);

  const std::string md = slurp(dir.path() / "benchmark.md");
  EXPECT_NE(md.find("| single | 1 |"), std::string::npos);
  EXPECT_NE(md.find("failed"), std::string::npos);
  const std::string csv = slurp(dir.path() / "benchmark.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(CmdEvalTest, ScoresAssignmentsAgainstLabels) {
  TempDir dir("eval");
  SbmSpec spec;
  spec.block_sizes = {20, 20};
  spec.p_in = 0.4;
  spec.p_out = 0.02;
  spec.seed = 5;
  save_graph(generate_sbm(spec), dir.path() / "g");
  RunConfig c = sbm_config(dir.path() / "out", {0});
  c.dataset = parse_run_config(json::parse(R"({"dataset": {"edges": "g/edges.tsv",
      "features": "g/features.tsv", "labels": "g/labels.tsv"}})"), dir.path()).dataset;
  const RunResult r = cmd_train(c, {});
  const EvalReport e =
      cmd_eval(dir.path() / "out" / "assignments.csv", dir.path() / "g" / "labels.tsv");
  EXPECT_EQ(e.acc, r.runs[0].eval->acc);
  EXPECT_EQ(e.nmi, r.runs[0].eval->nmi);

  std::ofstream(dir.path() / "short.tsv") << "n0\tblock0\n";
  EXPECT_THROW(cmd_eval(dir.path() / "out" / "assignments.csv", dir.path() / "short.tsv"),
               ReferenceError);
  std::ofstream(dir.path() / "bad.csv") << "node_id,predicted_community\nn0,x\n";
  EXPECT_THROW(cmd_eval(dir.path() / "bad.csv", dir.path() / "g" / "labels.tsv"), ParseError);
  EXPECT_THROW(cmd_eval(dir.path() / "missing.csv", dir.path() / "g" / "labels.tsv"), DataError);
}

TEST(AssignmentsCsvTest, LengthMismatch) {
  EXPECT_THROW(assignments_csv({"a"}, {0, 1}), ShapeError);
  EXPECT_EQ(assignments_csv({"a", "b"}, {1, 0}), "node_id,predicted_community\na,1\nb,0\n");
}

}  // namespace
}  // namespace cdnmf
