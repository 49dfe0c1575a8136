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

#ifndef CDNMF_OPTIM_H_
#define CDNMF_OPTIM_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "cdnmf/contrastive.h"
#include "cdnmf/linalg.h"
#include "cdnmf/model.h"

namespace cdnmf {

struct AttributedGraph;

struct LossBreakdown {
  double dnmf = 0.0;
  double reg = 0.0;
  double cl = 0.0;
  double total = 0.0;  // dnmf + beta·reg + gamma·cl
};

// One gradient per trainable matrix, shape-matched to its parameter. Views
// that are inactive carry empty matrices.
struct GradientBundle {
  std::vector<DenseMatrix> topo_factors;
  DenseMatrix topo_rep;
  std::vector<DenseMatrix> attr_factors;
  DenseMatrix attr_rep;
  ProjectionHead head;

  double global_norm() const;
  bool all_finite() const;
};

struct OptimizerConfig {
  double lr = 1e-3;
  int epochs = 50;
  std::optional<double> grad_clip = 5.0;  // global-norm clip
  int steps_per_epoch = 1;
  // Stop when the total loss has not improved for this many epochs; 0 keeps
  // every epoch.
  int patience = 10;

  void validate() const;
};

// L_DNMF + β·L_reg + γ·L_cl. The contrastive term is skipped when γ = 0 or
// only one view is active.
LossBreakdown total_loss(const ModelState& state, const ProjectionHead& head,
                         const NegativeSets& negs, const AttributedGraph& data);

// Analytic gradient of total_loss with pseudo labels and negative sets held
// fixed. Throws NumericError naming the offending term on NaN/Inf.
GradientBundle gradients(const ModelState& state, const ProjectionHead& head,
                         const NegativeSets& negs, const AttributedGraph& data,
                         LossBreakdown* loss = nullptr);

// P ← P − lr·grad(P) for every parameter, after optional global-norm
// clipping of the whole bundle.
void sgd_step(ModelState& state, ProjectionHead& head, const GradientBundle& grads,
              const OptimizerConfig& config);

// Every trainable matrix in a fixed order: topology factors, V_p, attribute
// factors, H_m, then W1, b1, W2, b2. Inactive views are omitted; the head is
// omitted when the contrastive term is off.
std::vector<DenseMatrix*> parameters(ModelState& state, ProjectionHead& head);
// Gradients in the same order as parameters() for the same state.
std::vector<const DenseMatrix*> gradient_list(const ModelState& state,
                                              const GradientBundle& grads);

struct FdCheckOptions {
  double h = 1e-3;
  int samples = 200;
  std::uint64_t seed = 0;
  // Coordinates of penalized matrices closer than this to 0 are skipped.
  // Defaults to 10·h when unset.
  std::optional<double> kink_margin;
};

// Samples random coordinates and returns the worst relative error between
// the analytic partial and a central difference,
// |a − f| / max(|a|, |f|, 1e-6). Probes whose ±h points straddle a kink of
// the projection head's ReLU are redrawn, like coordinates near the
// penalty's kink.
double fd_check(const ModelState& state, const ProjectionHead& head, const NegativeSets& negs,
                const AttributedGraph& data, const FdCheckOptions& options = {});

}  // namespace cdnmf

#endif  // CDNMF_OPTIM_H_
