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

#ifndef CDNMF_CONTRASTIVE_H_
#define CDNMF_CONTRASTIVE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cdnmf/linalg.h"
#include "cdnmf/model.h"

namespace cdnmf {

struct PseudoLabels {
  std::vector<int> labels;  // labels[i] in [0, num_communities)
  int num_communities = 0;
  int epoch_computed = 0;
};

// Column-wise argmax of an r×n representation; ties go to the lowest row.
PseudoLabels pseudo_labels(const DenseMatrix& representation, int epoch = 0);

// Per-node negative sets Ñ_i = {m : label(m) ≠ label(i)}, either complete or
// a seeded uniform subsample of each. Complete sets are kept implicit so
// large graphs never materialize n² indices.
class NegativeSets {
 public:
  NegativeSets() = default;

  static NegativeSets complete(PseudoLabels labels);
  static NegativeSets capped(PseudoLabels labels, Index cap, std::uint64_t seed);

  Index num_nodes() const { return static_cast<Index>(labels_.labels.size()); }
  bool is_complete() const { return complete_; }
  const PseudoLabels& derived_from() const { return labels_; }

  Index size(Index i) const;
  // Sorted member list of Ñ_i.
  std::vector<Index> members(Index i) const;

  template <typename Fn>
  void for_each(Index i, Fn&& fn) const {
    if (!complete_) {
      for (Index m : lists_[static_cast<std::size_t>(i)]) fn(m);
      return;
    }
    const int own = labels_.labels[static_cast<std::size_t>(i)];
    for (std::size_t c = 0; c < by_label_.size(); ++c) {
      if (static_cast<int>(c) == own) continue;
      for (Index m : by_label_[c]) fn(m);
    }
  }

 private:
  PseudoLabels labels_;
  bool complete_ = true;
  std::vector<std::vector<Index>> by_label_;
  std::vector<std::vector<Index>> lists_;
};

// Debiased negatives: nodes whose pseudo label differs from the anchor's.
// An absent cap means the complete set.
NegativeSets debiased_negatives(const PseudoLabels& labels, std::optional<Index> cap,
                                std::uint64_t seed);

// Two-layer MLP g(x) = W2 · relu(W1 x + b1) + b2, shared by both views.
struct ProjectionHead {
  DenseMatrix w1;  // hidden×r
  DenseMatrix b1;  // hidden×1
  DenseMatrix w2;  // out×hidden
  DenseMatrix b2;  // out×1

  Index input_dim() const { return w1.cols(); }
  Index hidden_dim() const { return w1.rows(); }
  Index output_dim() const { return w2.rows(); }

  // Glorot-uniform weights, zero biases.
  static ProjectionHead init(Index input, Index hidden, Index output, std::uint64_t seed);
  // Zero parameters with the same shapes as like.
  static ProjectionHead zeros_like(const ProjectionHead& like);
  // hidden = max(2r, 16), out = r.
  static ProjectionHead for_communities(Index r, std::uint64_t seed);
};

std::vector<double> project(const ProjectionHead& head, std::span<const double> col);
// Applies the head to every column of an r×n matrix.
DenseMatrix project_columns(const ProjectionHead& head, const DenseMatrix& columns);

// Cosine similarity; 0 when either vector has zero norm.
double cosine(std::span<const double> a, std::span<const double> b);

// l(V_p(:,i), H_m(:,i)) = log softmax weight of the positive pair against
// the topology-view negatives in Ñ_i. Always ≤ 0; exactly 0 for empty Ñ_i.
double contrastive_pair_loss(const ModelState& state, const ProjectionHead& head, Index i,
                             const NegativeSets& negs, double tau);

// −(1/n) Σ_i l(V_p(:,i), H_m(:,i)).
double loss_contrastive(const ModelState& state, const ProjectionHead& head,
                        const NegativeSets& negs, double tau);

struct ContrastiveGradient {
  double loss = 0.0;
  DenseMatrix d_topo;  // wrt V_p
  DenseMatrix d_attr;  // wrt H_m
  ProjectionHead d_head;
  Index zero_norm_vectors = 0;
};

// Loss and exact gradient with the negative sets held fixed. Gradients flow
// through both arguments of every similarity.
ContrastiveGradient contrastive_gradient(const ModelState& state, const ProjectionHead& head,
                                         const NegativeSets& negs, double tau);

}  // namespace cdnmf

#endif  // CDNMF_CONTRASTIVE_H_
