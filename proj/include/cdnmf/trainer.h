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

#ifndef CDNMF_TRAINER_H_
#define CDNMF_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cdnmf/contrastive.h"
#include "cdnmf/datasets.h"
#include "cdnmf/metrics.h"
#include "cdnmf/model.h"
#include "cdnmf/optim.h"

namespace cdnmf {

struct PretrainConfig {
  int iters = 200;
  double tol = 1e-4;
};

struct TrainOptions {
  HyperParams hyper;
  OptimizerConfig optimizer;
  PretrainConfig pretrain;
  ViewMode views = ViewMode::kBoth;
  // Negative sets are capped at this size on graphs larger than
  // auto_cap_nodes unless hyper.neg_cap is set or full_negatives is true.
  Index auto_neg_cap = 256;
  Index auto_cap_nodes = 5000;
  bool full_negatives = false;
  // Project the final representation onto the nonnegative orthant.
  bool clamp_output = false;
};

// Default chain [256, 64, r] when requested is empty. Every width is clamped
// into [r, min(input_rows, n)] and the chain is made non-increasing. Throws
// ConfigError when an explicit chain does not end at r.
std::vector<Index> resolve_widths(std::span<const Index> requested, Index input_rows, Index n,
                                  Index r);

struct PretrainedFactors {
  FactorStack topo;
  FactorStack attr;
};

// Layerwise NMF of A and X. Views excluded by options.views stay empty.
PretrainedFactors pretrain_views(const AttributedGraph& graph, const TrainOptions& options,
                                 std::uint64_t seed);

struct EpochRecord {
  int epoch = 0;  // 1-based
  LossBreakdown loss;  // at the start of the epoch, before its updates
};

using EpochObserver =
    std::function<void(const EpochRecord&, const PseudoLabels&, const NegativeSets&)>;

struct TrainOutcome {
  std::vector<int> predicted;
  std::vector<EpochRecord> trace;
  ModelState state;
  ProjectionHead head;
  int epochs_run = 0;
  std::optional<EvalReport> eval;  // when the graph has ground truth
};

// Fine-tuning from pretrained factors: each epoch refreshes pseudo labels
// and negative sets, then takes optimizer.steps_per_epoch gradient steps on
// the total objective. The prediction is the column argmax of V_p (H_m for
// the attribute-only ablation). Throws NumericError on a non-finite loss,
// naming the term and epoch.
TrainOutcome fine_tune(const AttributedGraph& graph, PretrainedFactors init,
                       const TrainOptions& options, std::uint64_t seed,
                       const EpochObserver& observer = {});

// pretrain_views followed by fine_tune.
TrainOutcome train(const AttributedGraph& graph, const TrainOptions& options,
                   std::uint64_t seed, const EpochObserver& observer = {});

// Binary checkpoint of pretrained factors ("CDNMFCK1", little endian).
void save_checkpoint(const std::filesystem::path& path, const PretrainedFactors& factors);
PretrainedFactors load_checkpoint(const std::filesystem::path& path);

}  // namespace cdnmf

#endif  // CDNMF_TRAINER_H_
