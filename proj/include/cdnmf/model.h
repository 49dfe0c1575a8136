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

#ifndef CDNMF_MODEL_H_
#define CDNMF_MODEL_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "cdnmf/linalg.h"

namespace cdnmf {

struct AttributedGraph;

// One view of the deep factorization: target ≈ U_1 U_2 … U_p V_p.
struct FactorStack {
  std::vector<DenseMatrix> factors;  // U_1..U_p, U_i is r_{i-1}×r_i
  DenseMatrix representation;        // V_p, r×n

  Index depth() const { return static_cast<Index>(factors.size()); }
  bool empty() const { return factors.empty(); }
  // U_1 U_2 … U_p, r_0×r. Throws ShapeError if the chain does not conform.
  DenseMatrix mapping() const;
  // Checks the shape chain against a target of input_rows×n.
  void validate(Index input_rows, Index n) const;
};

// Which views take part in the objective. The single-view modes are the
// contrastive-free ablations.
enum class ViewMode { kBoth, kTopologyOnly, kAttributesOnly };

struct HyperParams {
  double alpha = 150.0;  // nonnegativity penalty
  double beta = 2.0;     // graph regularization
  double gamma = 5.0;    // contrastive term; 0 disables it
  double tau = 1.4;      // temperature
  std::vector<Index> widths;  // r_1 ≥ … ≥ r_p = r
  std::optional<Index> neg_cap;
  std::uint64_t seed = 0;

  void validate() const;
};

struct ModelState {
  FactorStack topo;        // factorizes A
  FactorStack attr;        // factorizes X
  SparseMatrix laplacian;  // D − A of the topology
  HyperParams hyper;
  ViewMode views = ViewMode::kBoth;

  bool uses_topology() const { return views != ViewMode::kAttributesOnly; }
  bool uses_attributes() const { return views != ViewMode::kTopologyOnly; }
  // Representation used for pseudo labels and the final prediction.
  const DenseMatrix& primary_representation() const {
    return uses_topology() ? topo.representation : attr.representation;
  }
};

// Entrywise min(b, 0).
DenseMatrix negative_part(const DenseMatrix& b);
// ‖negative_part(b)‖²_F
double penalty(const DenseMatrix& b);

// ‖target − U_1…U_p V_p‖²_F. Dense targets use the explicit residual; sparse
// targets use the Gram expansion so no r_0×n product is formed.
double reconstruction_error(const FactorStack& stack, const DataMatrix& target);

// Reconstruction error plus alpha times the penalties of every factor and the
// representation.
double loss_recon(const FactorStack& stack, const DataMatrix& target, double alpha);

// Sum of loss_recon over the active views.
double loss_dnmf(const ModelState& state, const SparseMatrix& a, const DataMatrix& x);

// tr(V_p L V_pᵀ) + tr(H_m L H_mᵀ) over the active views; both use the
// topology Laplacian.
double loss_reg(const ModelState& state);

// L = D − A. Throws DomainError for asymmetric or negatively weighted input.
SparseMatrix build_laplacian(const SparseMatrix& a);

// Assembles a state around two stacks and validates shapes against graph.
ModelState make_state(const AttributedGraph& graph, FactorStack topo, FactorStack attr,
                      const HyperParams& hyper, ViewMode views = ViewMode::kBoth);

}  // namespace cdnmf

#endif  // CDNMF_MODEL_H_
