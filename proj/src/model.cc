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

#include "cdnmf/model.h"

#include <algorithm>
#include <cmath>

#include "cdnmf/datasets.h"
#include "cdnmf/errors.h"

namespace cdnmf {

DenseMatrix FactorStack::mapping() const {
  if (factors.empty()) throw ShapeError("factor stack has no factors");
  DenseMatrix m = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) m = matmul(m, factors[i]);
  return m;
}

void FactorStack::validate(Index input_rows, Index n) const {
  if (factors.empty()) throw ShapeError("factor stack has no factors");
  if (factors.front().rows() != input_rows) {
    throw ShapeError("first factor has " + std::to_string(factors.front().rows()) +
                     " rows, target has " + std::to_string(input_rows));
  }
  for (std::size_t i = 0; i + 1 < factors.size(); ++i) {
    if (factors[i].cols() != factors[i + 1].rows()) {
      throw ShapeError("factor " + std::to_string(i + 1) + " is " +
                       shape_string(factors[i].rows(), factors[i].cols()) + " but factor " +
                       std::to_string(i + 2) + " is " +
                       shape_string(factors[i + 1].rows(), factors[i + 1].cols()));
    }
  }
  if (representation.rows() != factors.back().cols() || representation.cols() != n) {
    throw ShapeError("representation is " +
                     shape_string(representation.rows(), representation.cols()) +
                     ", expected " + shape_string(factors.back().cols(), n));
  }
}

void HyperParams::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
  if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
  if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (widths[i] < 1) throw ConfigError("layer widths must be >= 1");
    if (i > 0 && widths[i] > widths[i - 1]) {
      throw ConfigError("layer widths must be non-increasing");
    }
  }
  if (neg_cap && *neg_cap < 1) throw ConfigError("neg_cap must be >= 1");
}

DenseMatrix negative_part(const DenseMatrix& b) {
  DenseMatrix::Storage out = b.eigen().cwiseMin(0.0);
  return DenseMatrix(std::move(out));
}

double penalty(const DenseMatrix& b) {
  return b.eigen().cwiseMin(0.0).squaredNorm();
}

double reconstruction_error(const FactorStack& stack, const DataMatrix& target) {
  stack.validate(rows(target), cols(target));
  const DenseMatrix psi = stack.mapping();
  const DenseMatrix& v = stack.representation;
  if (const auto* dense = std::get_if<DenseMatrix>(&target)) {
    return (dense->eigen() - psi.eigen() * v.eigen()).squaredNorm();
  }
  // ‖M‖² − 2⟨ΨᵀM, V⟩ + ⟨ΨᵀΨ, VVᵀ⟩
  const DenseMatrix psi_t_m = transpose(multiply_tn(target, psi));
  const double cross = dot(psi_t_m, v);
  const DenseMatrix gram_psi = matmul_tn(psi, psi);
  const DenseMatrix gram_v = matmul_nt(v, v);
  const double err = frobenius_sq(target) - 2.0 * cross + dot(gram_psi, gram_v);
  return std::max(err, 0.0);
}

double loss_recon(const FactorStack& stack, const DataMatrix& target, double alpha) {
  double pen = penalty(stack.representation);
  for (const DenseMatrix& u : stack.factors) pen += penalty(u);
  return reconstruction_error(stack, target) + alpha * pen;
}

double loss_dnmf(const ModelState& state, const SparseMatrix& a, const DataMatrix& x) {
  double total = 0.0;
  if (state.uses_topology()) total += loss_recon(state.topo, DataMatrix(a), state.hyper.alpha);
  if (state.uses_attributes()) total += loss_recon(state.attr, x, state.hyper.alpha);
  return total;
}

double loss_reg(const ModelState& state) {
  double total = 0.0;
  if (state.uses_topology()) total += trace_quadratic(state.topo.representation, state.laplacian);
  if (state.uses_attributes()) total += trace_quadratic(state.attr.representation, state.laplacian);
  return total;
}

SparseMatrix build_laplacian(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("adjacency must be square");
  if (!a.is_symmetric()) throw DomainError("Laplacian needs a symmetric adjacency");
  std::vector<double> degree(static_cast<std::size_t>(a.rows()), 0.0);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nnz() + a.rows()));
  for (const Triplet& e : a.entries()) {
    if (e.value < 0.0) throw DomainError("Laplacian needs nonnegative edge weights");
    degree[static_cast<std::size_t>(e.row)] += e.value;
    if (e.row != e.col) t.push_back({e.row, e.col, -e.value});
  }
  for (Index i = 0; i < a.rows(); ++i) {
    // A self-loop contributes to the degree and cancels on the diagonal.
    const double diag = degree[static_cast<std::size_t>(i)] - a.coeff(i, i);
    if (diag != 0.0) t.push_back({i, i, diag});
  }
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(t));
}

ModelState make_state(const AttributedGraph& graph, FactorStack topo, FactorStack attr,
                      const HyperParams& hyper, ViewMode views) {
  ModelState s;
  s.topo = std::move(topo);
  s.attr = std::move(attr);
  s.laplacian = build_laplacian(graph.adjacency);
  s.hyper = hyper;
  s.views = views;
  const Index n = graph.num_nodes();
  if (s.uses_topology()) s.topo.validate(n, n);
  if (s.uses_attributes()) s.attr.validate(graph.feature_dim(), n);
  if (s.uses_topology() && s.uses_attributes() &&
      s.topo.representation.rows() != s.attr.representation.rows()) {
    throw ShapeError("topology and attribute stacks end at different widths");
  }
  return s;
}

}  // namespace cdnmf
