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

#ifndef CDNMF_CONFIG_H_
#define CDNMF_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cdnmf/datasets.h"
#include "cdnmf/trainer.h"
#include "json.hpp"

namespace cdnmf {

enum class Ablation { kNone, kTopologyOnly, kAttributesOnly };

std::string to_string(Ablation a);
Ablation parse_ablation(const std::string& s);
ViewMode view_mode(Ablation a);

// Exactly one source is set: a builtin name, explicit files, or a generated
// planted-partition graph.
struct DatasetConfig {
  std::string name;
  std::filesystem::path edges;
  std::filesystem::path features;
  std::optional<std::filesystem::path> labels;
  std::optional<SbmSpec> sbm;
  // Overrides the community count inferred from labels.
  std::optional<int> communities;
  bool normalize = false;
  bool binarize = false;
};

struct RunConfig {
  DatasetConfig dataset;
  HyperParams hyper;
  OptimizerConfig optimizer;
  PretrainConfig pretrain;
  // Explicit "full" in the config: exact objective even on large graphs.
  bool full_negatives = false;
  std::filesystem::path output_dir = "out";
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  Ablation ablation = Ablation::kNone;
  bool clamp_output = false;

  // Throws ConfigError on any out-of-range field.
  void validate() const;
};

// Parses a config document. Unknown keys are errors. Relative dataset paths
// resolve against base_dir.
RunConfig parse_run_config(const nlohmann::json& doc,
                           const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
// Canonical echo of a config; parse_run_config(to_json(c)) == c.
nlohmann::json to_json(const RunConfig& config);

TrainOptions train_options(const RunConfig& config);

// Loads the configured graph. Builtin names resolve under data_root.
AttributedGraph load_dataset(const DatasetConfig& dataset,
                             const std::optional<std::filesystem::path>& data_root);

}  // namespace cdnmf

#endif  // CDNMF_CONFIG_H_
