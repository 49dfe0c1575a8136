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

#include "cdnmf/contrastive.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "cdnmf/errors.h"
#include "cdnmf/log.h"

namespace cdnmf {
namespace {

using RowMajor = DenseMatrix::Storage;

struct HeadPass {
  RowMajor pre;  // hidden×n
  RowMajor act;  // hidden×n
  RowMajor out;  // out×n
};

HeadPass forward(const ProjectionHead& head, const DenseMatrix& columns) {
  if (columns.rows() != head.input_dim()) {
    throw ShapeError("projection head expects " + std::to_string(head.input_dim()) +
                     "-dimensional columns, got " + std::to_string(columns.rows()));
  }
  HeadPass p;
  p.pre = head.w1.eigen() * columns.eigen();
  p.pre.colwise() += head.b1.eigen().col(0);
  p.act = p.pre.cwiseMax(0.0);
  p.out = head.w2.eigen() * p.act;
  p.out.colwise() += head.b2.eigen().col(0);
  return p;
}

// Projected columns as unit-norm rows (n×out); zero rows stay zero.
struct Unit {
  RowMajor rows;
  std::vector<double> norms;
  Index zero = 0;
};

Unit normalize_columns(const RowMajor& out) {
  Unit u;
  u.rows = out.transpose();
  u.norms.resize(static_cast<std::size_t>(u.rows.rows()));
  for (Index i = 0; i < u.rows.rows(); ++i) {
    const double s = u.rows.row(i).norm();
    u.norms[static_cast<std::size_t>(i)] = s;
    if (s > 0.0) {
      u.rows.row(i) /= s;
    } else {
      ++u.zero;
    }
  }
  return u;
}

// Evaluates l_i. When weights is non-null it receives the softmax weight of
// the positive first, then one weight per negative in for_each order; sims
// receives the matching similarities.
double pair_term(const Unit& z, const Unit& w, Index i, const NegativeSets& negs, double tau,
                 std::vector<double>* sims, std::vector<double>* weights) {
  const auto anchor = z.rows.row(i);
  const double pos = anchor.dot(w.rows.row(i)) / tau;
  std::vector<double> local;
  std::vector<double>& s = sims ? *sims : local;
  s.clear();
  negs.for_each(i, [&](Index m) { s.push_back(anchor.dot(z.rows.row(m)) / tau); });
  double top = pos;
  for (double x : s) top = std::max(top, x);
  double sum = std::exp(pos - top);
  for (double x : s) sum += std::exp(x - top);
  const double lse = top + std::log(sum);
  if (weights) {
    weights->clear();
    weights->push_back(std::exp(pos - lse));
    for (double x : s) weights->push_back(std::exp(x - lse));
  }
  // With no negatives the ratio is exactly 1.
  if (s.empty()) return 0.0;
  return std::min(pos - lse, 0.0);
}

void warn_zero_norm(Index count) {
  if (count > 0) {
    log_warning(std::to_string(count) +
                " projected vectors have zero norm; their cosine similarities are 0");
  }
}

// Backpropagates dL/d(out) through the head; accumulates parameter
// gradients and returns dL/d(columns).
RowMajor backward(const ProjectionHead& head, const DenseMatrix& columns, const HeadPass& pass,
                  const RowMajor& d_out, ProjectionHead& grads) {
  grads.w2.eigen().noalias() += d_out * pass.act.transpose();
  grads.b2.eigen().col(0) += d_out.rowwise().sum();
  RowMajor d_pre = head.w2.eigen().transpose() * d_out;
  d_pre = d_pre.cwiseProduct((pass.pre.array() > 0.0).cast<double>().matrix());
  grads.w1.eigen().noalias() += d_pre * columns.eigen().transpose();
  grads.b1.eigen().col(0) += d_pre.rowwise().sum();
  return head.w1.eigen().transpose() * d_pre;
}

// d(unit)/d(raw) applied to the upstream gradient, back in out×n layout.
RowMajor unnormalize(const Unit& u, const RowMajor& d_unit_rows) {
  RowMajor d(d_unit_rows.cols(), d_unit_rows.rows());
  for (Index i = 0; i < d_unit_rows.rows(); ++i) {
    const double s = u.norms[static_cast<std::size_t>(i)];
    if (s == 0.0) {
      d.col(i).setZero();
      continue;
    }
    const auto unit = u.rows.row(i);
    const auto g = d_unit_rows.row(i);
    d.col(i) = ((g - unit * unit.dot(g)) / s).transpose();
  }
  return d;
}

void require_both_views(const ModelState& state) {
  if (state.views != ViewMode::kBoth) {
    throw ConfigError("the contrastive term needs both views");
  }
  if (state.topo.representation.cols() != state.attr.representation.cols()) {
    throw ShapeError("view representations have different node counts");
  }
}

}  // namespace

PseudoLabels pseudo_labels(const DenseMatrix& representation, int epoch) {
  PseudoLabels p;
  p.num_communities = static_cast<int>(representation.rows());
  p.epoch_computed = epoch;
  if (representation.rows() < 1) throw ShapeError("pseudo labels need r >= 1");
  p.labels.resize(static_cast<std::size_t>(representation.cols()));
  for (Index j = 0; j < representation.cols(); ++j) {
    Index best = 0;
    for (Index r = 1; r < representation.rows(); ++r) {
      if (representation(r, j) > representation(best, j)) best = r;
    }
    p.labels[static_cast<std::size_t>(j)] = static_cast<int>(best);
  }
  return p;
}

NegativeSets NegativeSets::complete(PseudoLabels labels) {
  NegativeSets s;
  s.complete_ = true;
  s.by_label_.resize(static_cast<std::size_t>(std::max(labels.num_communities, 0)));
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    const int c = labels.labels[i];
    if (c < 0 || c >= labels.num_communities) throw DomainError("pseudo label out of range");
    s.by_label_[static_cast<std::size_t>(c)].push_back(static_cast<Index>(i));
  }
  s.labels_ = std::move(labels);
  return s;
}

NegativeSets NegativeSets::capped(PseudoLabels labels, Index cap, std::uint64_t seed) {
  if (cap < 1) throw DomainError("negative cap must be >= 1");
  NegativeSets full = complete(std::move(labels));
  NegativeSets s;
  s.complete_ = false;
  s.labels_ = full.labels_;
  const Index n = full.num_nodes();
  s.lists_.resize(static_cast<std::size_t>(n));
  std::mt19937_64 rng(seed);
  for (Index i = 0; i < n; ++i) {
    const Index total = full.size(i);
    auto& out = s.lists_[static_cast<std::size_t>(i)];
    if (total <= cap) {
      out = full.members(i);
      continue;
    }
    // Floyd's algorithm: cap distinct positions in [0, total).
    std::set<Index> picked;
    for (Index j = total - cap; j < total; ++j) {
      const Index t = std::uniform_int_distribution<Index>(0, j)(rng);
      if (!picked.insert(t).second) picked.insert(j);
    }
    // Map positions onto the concatenation of the other labels' node lists.
    const int own = s.labels_.labels[static_cast<std::size_t>(i)];
    auto pos = picked.begin();
    Index offset = 0;
    for (std::size_t c = 0; c < full.by_label_.size() && pos != picked.end(); ++c) {
      if (static_cast<int>(c) == own) continue;
      const auto& group = full.by_label_[c];
      const Index end = offset + static_cast<Index>(group.size());
      while (pos != picked.end() && *pos < end) {
        out.push_back(group[static_cast<std::size_t>(*pos - offset)]);
        ++pos;
      }
      offset = end;
    }
    std::sort(out.begin(), out.end());
  }
  return s;
}

Index NegativeSets::size(Index i) const {
  if (!complete_) return static_cast<Index>(lists_[static_cast<std::size_t>(i)].size());
  const int own = labels_.labels[static_cast<std::size_t>(i)];
  return num_nodes() - static_cast<Index>(by_label_[static_cast<std::size_t>(own)].size());
}

std::vector<Index> NegativeSets::members(Index i) const {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(size(i)));
  for_each(i, [&](Index m) { out.push_back(m); });
  std::sort(out.begin(), out.end());
  return out;
}

NegativeSets debiased_negatives(const PseudoLabels& labels, std::optional<Index> cap,
                                std::uint64_t seed) {
  if (cap) return NegativeSets::capped(labels, *cap, seed);
  return NegativeSets::complete(labels);
}

ProjectionHead ProjectionHead::init(Index input, Index hidden, Index output,
                                    std::uint64_t seed) {
  if (input < 1 || hidden < 1 || output < 1) throw ShapeError("projection head widths must be >= 1");
  std::mt19937_64 rng(seed);
  auto glorot = [&](Index rows, Index cols) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    DenseMatrix m(rows, cols);
    for (double& x : m.data()) x = dist(rng);
    return m;
  };
  ProjectionHead h;
  h.w1 = glorot(hidden, input);
  h.b1 = DenseMatrix(hidden, 1);
  h.w2 = glorot(output, hidden);
  h.b2 = DenseMatrix(output, 1);
  return h;
}

ProjectionHead ProjectionHead::zeros_like(const ProjectionHead& like) {
  ProjectionHead h;
  h.w1 = DenseMatrix(like.w1.rows(), like.w1.cols());
  h.b1 = DenseMatrix(like.b1.rows(), like.b1.cols());
  h.w2 = DenseMatrix(like.w2.rows(), like.w2.cols());
  h.b2 = DenseMatrix(like.b2.rows(), like.b2.cols());
  return h;
}

ProjectionHead ProjectionHead::for_communities(Index r, std::uint64_t seed) {
  return init(r, std::max<Index>(2 * r, 16), r, seed);
}

std::vector<double> project(const ProjectionHead& head, std::span<const double> col) {
  const HeadPass p = forward(head, DenseMatrix::column(col));
  return std::vector<double>(p.out.data(), p.out.data() + p.out.size());
}

DenseMatrix project_columns(const ProjectionHead& head, const DenseMatrix& columns) {
  return DenseMatrix(forward(head, columns).out);
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("cosine of vectors with different lengths");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

double contrastive_pair_loss(const ModelState& state, const ProjectionHead& head, Index i,
                             const NegativeSets& negs, double tau) {
  require_both_views(state);
  if (!(tau > 0.0)) throw DomainError("temperature must be > 0");
  const Unit z = normalize_columns(forward(head, state.topo.representation).out);
  const Unit w = normalize_columns(forward(head, state.attr.representation).out);
  warn_zero_norm(z.zero + w.zero);
  return pair_term(z, w, i, negs, tau, nullptr, nullptr);
}

double loss_contrastive(const ModelState& state, const ProjectionHead& head,
                        const NegativeSets& negs, double tau) {
  return contrastive_gradient(state, head, negs, tau).loss;
}

ContrastiveGradient contrastive_gradient(const ModelState& state, const ProjectionHead& head,
                                         const NegativeSets& negs, double tau) {
  require_both_views(state);
  if (!(tau > 0.0)) throw DomainError("temperature must be > 0");
  const DenseMatrix& v = state.topo.representation;
  const DenseMatrix& h = state.attr.representation;
  const Index n = v.cols();
  if (negs.num_nodes() != n) throw ShapeError("negative sets cover a different node count");

  const HeadPass pv = forward(head, v);
  const HeadPass ph = forward(head, h);
  const Unit z = normalize_columns(pv.out);
  const Unit w = normalize_columns(ph.out);

  ContrastiveGradient g;
  g.zero_norm_vectors = z.zero + w.zero;
  warn_zero_norm(g.zero_norm_vectors);

  RowMajor dz = RowMajor::Zero(z.rows.rows(), z.rows.cols());
  RowMajor dw = RowMajor::Zero(w.rows.rows(), w.rows.cols());
  const double c = 1.0 / (static_cast<double>(n) * tau);
  std::vector<double> sims, weights;
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    sum += pair_term(z, w, i, negs, tau, &sims, &weights);
    if (sims.empty()) continue;
    const auto anchor = z.rows.row(i);
    const double g_pos = -c * (1.0 - weights[0]);
    dz.row(i) += g_pos * w.rows.row(i);
    dw.row(i) += g_pos * anchor;
    std::size_t k = 1;
    negs.for_each(i, [&](Index m) {
      const double g_neg = c * weights[k++];
      dz.row(i) += g_neg * z.rows.row(m);
      dz.row(m) += g_neg * anchor;
    });
  }
  g.loss = n > 0 ? -sum / static_cast<double>(n) : 0.0;

  g.d_head = ProjectionHead::zeros_like(head);
  g.d_topo = DenseMatrix(backward(head, v, pv, unnormalize(z, dz), g.d_head));
  g.d_attr = DenseMatrix(backward(head, h, ph, unnormalize(w, dw), g.d_head));
  return g;
}

}  // namespace cdnmf
