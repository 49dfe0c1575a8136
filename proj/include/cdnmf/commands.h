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

#ifndef CDNMF_COMMANDS_H_
#define CDNMF_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cdnmf/config.h"
#include "cdnmf/metrics.h"
#include "cdnmf/trainer.h"
#include "json.hpp"

namespace cdnmf {

struct CommandContext {
  // Where builtin dataset names resolve.
  std::optional<std::filesystem::path> data_root;
  // When set, pretrained factors are cached here per dataset and seed and
  // reused on later runs.
  std::optional<std::filesystem::path> checkpoint_dir;
  // Write result files into config.output_dir.
  bool write_outputs = true;
};

struct SeedRun {
  std::uint64_t seed = 0;
  std::optional<EvalReport> eval;
  std::vector<EpochRecord> trace;
  std::vector<int> predicted;
  int epochs_run = 0;
  double wall_seconds = 0.0;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single seed
};

Summary summarize(const std::vector<double>& values);

struct RunResult {
  RunConfig config;
  std::vector<std::string> node_ids;
  std::vector<SeedRun> runs;
  std::optional<Summary> acc;
  std::optional<Summary> nmi;
  double wall_seconds = 0.0;
};

// Timing fields are omitted when include_timing is false, so two runs of the
// same config serialize identically.
nlohmann::json to_json(const RunResult& result, bool include_timing = true);

// Trains once per configured seed. Writes result.json and assignments.csv
// (first seed) plus assignments_seed<k>.csv for every seed.
RunResult cmd_train(const RunConfig& config, const CommandContext& ctx);

// Full model, topology-only and attribute-only runs of the same config, each
// in its own subdirectory, plus ablation.md comparing them.
std::vector<RunResult> cmd_ablate(const RunConfig& config, const CommandContext& ctx);

struct BenchmarkRow {
  std::string label;
  std::optional<RunResult> result;
  std::string error;  // set when the run failed
};

// Runs every config and writes benchmark.md and benchmark.csv into out_dir.
// A failing config is recorded in its row and the remaining configs still
// run.
std::vector<BenchmarkRow> cmd_benchmark(const std::vector<RunConfig>& configs,
                                        const std::vector<std::string>& labels,
                                        const std::filesystem::path& out_dir,
                                        const CommandContext& ctx);
std::string benchmark_markdown(const std::vector<BenchmarkRow>& rows);
std::string benchmark_csv(const std::vector<BenchmarkRow>& rows);

// Per-epoch loss CSV of the first seed: epoch,l_dnmf,l_reg,l_cl,total.
std::string trace_csv(const std::vector<EpochRecord>& trace);
RunResult cmd_trace(const RunConfig& config, const CommandContext& ctx);

// Scores an assignments CSV (node_id,predicted_community) against a labels
// file (node_id<TAB>label).
EvalReport cmd_eval(const std::filesystem::path& assignments,
                    const std::filesystem::path& labels);

std::string assignments_csv(const std::vector<std::string>& node_ids,
                            const std::vector<int>& predicted);

}  // namespace cdnmf

#endif  // CDNMF_COMMANDS_H_
