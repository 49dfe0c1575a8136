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

#include <cmath>
#include <random>
#include <set>

#include "cdnmf/datasets.h"
#include "cdnmf/errors.h"
#include "cdnmf/log.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace cdnmf {
namespace {

using testing::random_dense;
using testing::to_grid;

PseudoLabels labels_of(std::vector<int> l, int r) {
  PseudoLabels p;
  p.labels = std::move(l);
  p.num_communities = r;
  return p;
}

TEST(PseudoLabelsTest, OneHotColumns) {
  const DenseMatrix v{{0, 1, 0, 0}, {0, 0, 0, 1}, {1, 0, 1, 0}};
  EXPECT_EQ(pseudo_labels(v).labels, (std::vector<int>{2, 0, 2, 1}));
}

TEST(PseudoLabelsTest, TiesGoToLowestRow) {
  const DenseMatrix v{{0.2}, {0.2}, {0.1}};
  EXPECT_EQ(pseudo_labels(v).labels, (std::vector<int>{0}));
}

TEST(PseudoLabelsTest, MatchesLinearScan) {
  std::mt19937_64 rng(1);
  const DenseMatrix v = random_dense(5, 40, rng);
  const auto got = pseudo_labels(v, 3);
  EXPECT_EQ(got.epoch_computed, 3);
  EXPECT_EQ(got.num_communities, 5);
  for (Index j = 0; j < v.cols(); ++j) {
    int best = 0;
    double best_value = v(0, j);
    for (Index r = 0; r < v.rows(); ++r) {
      if (v(r, j) > best_value) {
        best_value = v(r, j);
        best = static_cast<int>(r);
      }
    }
    EXPECT_EQ(got.labels[static_cast<std::size_t>(j)], best);
  }
}

TEST(DebiasedNegativesTest, SingleCommunityHasNoNegatives) {
  const NegativeSets negs = debiased_negatives(labels_of({0, 0, 0}, 1), std::nullopt, 0);
  for (Index i = 0; i < 3; ++i) EXPECT_TRUE(negs.members(i).empty());
}

TEST(DebiasedNegativesTest, SmallExample) {
  const NegativeSets negs = debiased_negatives(labels_of({0, 0, 1, 1}, 2), std::nullopt, 0);
  EXPECT_EQ(negs.members(0), (std::vector<Index>{2, 3}));
  EXPECT_EQ(negs.members(3), (std::vector<Index>{0, 1}));
  EXPECT_EQ(negs.size(1), 2);
}

void expect_partition(const NegativeSets& negs, const std::vector<int>& labels, bool complete) {
  const Index n = static_cast<Index>(labels.size());
  for (Index i = 0; i < n; ++i) {
    const auto members = negs.members(i);
    std::set<Index> seen(members.begin(), members.end());
    EXPECT_EQ(seen.size(), members.size());
    EXPECT_FALSE(seen.count(i));
    Index same = 0;
    for (Index m = 0; m < n; ++m) {
      const bool same_label = labels[static_cast<std::size_t>(m)] == labels[static_cast<std::size_t>(i)];
      if (seen.count(m)) EXPECT_FALSE(same_label);
      if (same_label) ++same;
    }
    if (complete) EXPECT_EQ(static_cast<Index>(members.size()) + same, n);
  }
}

TEST(DebiasedNegativesTest, CompleteSetsPartitionNodes) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> lab(0, 3);
  for (int t = 0; t < 10; ++t) {
    std::vector<int> l(30);
    for (int& x : l) x = lab(rng);
    expect_partition(debiased_negatives(labels_of(l, 4), std::nullopt, 0), l, true);
  }
}

TEST(DebiasedNegativesTest, CappedSubsampleIsDebiasedAndSized) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> lab(0, 2);
  std::vector<int> l(60);
  for (int& x : l) x = lab(rng);
  const NegativeSets capped = debiased_negatives(labels_of(l, 3), Index{5}, 17);
  const NegativeSets full = debiased_negatives(labels_of(l, 3), std::nullopt, 17);
  expect_partition(capped, l, false);
  for (Index i = 0; i < 60; ++i) EXPECT_EQ(capped.size(i), std::min<Index>(5, full.size(i)));
  // Same seed, same subsample.
  const NegativeSets again = debiased_negatives(labels_of(l, 3), Index{5}, 17);
  for (Index i = 0; i < 60; ++i) EXPECT_EQ(capped.members(i), again.members(i));
  // A cap above the set size keeps everything.
  const NegativeSets loose = debiased_negatives(labels_of(l, 3), Index{1000}, 1);
  for (Index i = 0; i < 60; ++i) EXPECT_EQ(loose.members(i), full.members(i));
}

TEST(ProjectTest, ZeroHeadGivesZero) {
  ProjectionHead h = ProjectionHead::zeros_like(ProjectionHead::init(3, 5, 2, 0));
  EXPECT_EQ(project(h, std::vector<double>{1, 2, 3}), (std::vector<double>{0, 0}));
}

TEST(ProjectTest, IdentityHeadOnNonnegativeInput) {
  ProjectionHead h;
  h.w1 = DenseMatrix::identity(3);
  h.b1 = DenseMatrix(3, 1);
  h.w2 = DenseMatrix::identity(3);
  h.b2 = DenseMatrix(3, 1);
  const std::vector<double> x = {0.5, 0.0, 2.0};
  EXPECT_EQ(project(h, x), x);
}

TEST(ProjectTest, MatchesExplicitSteps) {
  std::mt19937_64 rng(4);
  ProjectionHead h = ProjectionHead::init(3, 16, 3, 9);
  h.b1 = random_dense(16, 1, rng);
  h.b2 = random_dense(3, 1, rng);
  const DenseMatrix cols = random_dense(3, 6, rng);
  const DenseMatrix batched = project_columns(h, cols);
  for (Index j = 0; j < 6; ++j) {
    const auto col = testing::grid_column(to_grid(cols), static_cast<std::size_t>(j));
    const auto want = testing::naive_project(to_grid(h.w1), to_grid(h.b1), to_grid(h.w2),
                                             to_grid(h.b2), col);
    const auto got = project(h, col);
    for (std::size_t k = 0; k < want.size(); ++k) {
      EXPECT_NEAR(got[k], want[k], 1e-12);
      EXPECT_NEAR(batched(static_cast<Index>(k), j), want[k], 1e-12);
    }
  }
}

TEST(ProjectTest, InitShapesAndRange) {
  const ProjectionHead h = ProjectionHead::for_communities(3, 5);
  EXPECT_EQ(h.hidden_dim(), 16);
  EXPECT_EQ(h.output_dim(), 3);
  const double limit = std::sqrt(6.0 / 19.0);
  for (double x : h.w1.data()) EXPECT_LE(std::abs(x), limit);
  EXPECT_EQ(ProjectionHead::for_communities(10, 5).hidden_dim(), 20);
}

// Identity head so θ is the plain cosine of the representation columns.
ProjectionHead identity_head(Index r) {
  ProjectionHead h;
  h.w1 = DenseMatrix::identity(r);
  h.b1 = DenseMatrix(r, 1);
  h.w2 = DenseMatrix::identity(r);
  h.b2 = DenseMatrix(r, 1);
  return h;
}

ModelState two_view_state(DenseMatrix v, DenseMatrix h) {
  ModelState s;
  s.topo.representation = std::move(v);
  s.attr.representation = std::move(h);
  return s;
}

TEST(ContrastivePairLossTest, EmptyNegativesGiveZero) {
  std::mt19937_64 rng(5);
  const ModelState s = two_view_state(random_dense(2, 3, rng, 0, 1), random_dense(2, 3, rng, 0, 1));
  const NegativeSets negs = debiased_negatives(labels_of({1, 1, 1}, 2), std::nullopt, 0);
  EXPECT_EQ(contrastive_pair_loss(s, identity_head(2), 0, negs, 1.4), 0.0);
  EXPECT_EQ(loss_contrastive(s, identity_head(2), negs, 1.4), 0.0);
}

TEST(ContrastivePairLossTest, ClosedFormScalar) {
  // Biases keep the hidden layer in its linear range, so the head is the
  // identity on inputs ≥ −2. Node 0: θ(anchor, positive) = 1 and its single
  // negative (node 1) has θ = −1.
  ProjectionHead h = identity_head(2);
  h.b1 = DenseMatrix{{2.0}, {2.0}};
  h.b2 = DenseMatrix{{-2.0}, {-2.0}};
  const ModelState s = two_view_state(DenseMatrix{{1, -1}, {0, 0}}, DenseMatrix{{1, -1}, {0, 0}});
  const NegativeSets negs = debiased_negatives(labels_of({0, 1}, 2), std::nullopt, 0);
  EXPECT_NEAR(contrastive_pair_loss(s, h, 0, negs, 1.0), -0.12692801104297252, 1e-14);
  // Orthogonal negative: θ = 0.
  const ModelState o = two_view_state(DenseMatrix{{1, 0}, {0, 1}}, DenseMatrix{{1, 0}, {0, 1}});
  EXPECT_NEAR(contrastive_pair_loss(o, identity_head(2), 0, negs, 1.0), -0.31326168751822286, 1e-14);
}

TEST(ContrastivePairLossTest, AllSimilaritiesEqualCancelTemperature) {
  // Every column equal: all θ = 1, so l = −log(1 + m) for m negatives.
  const DenseMatrix v{{0.3, 0.3, 0.3, 0.3}, {0.4, 0.4, 0.4, 0.4}};
  const ModelState s = two_view_state(v, v);
  const NegativeSets negs = debiased_negatives(labels_of({0, 1, 1, 1}, 2), std::nullopt, 0);
  for (double tau : {0.05, 0.5, 1.4, 10.0}) {
    EXPECT_NEAR(contrastive_pair_loss(s, identity_head(2), 0, negs, tau), -std::log(4.0), 1e-12);
  }
}

double naive_pair_loss(const ModelState& s, const ProjectionHead& h, Index i,
                       const std::vector<Index>& negs, double tau) {
  auto g = [&](const DenseMatrix& m, Index j) {
    return testing::naive_project(to_grid(h.w1), to_grid(h.b1), to_grid(h.w2), to_grid(h.b2),
                                  testing::grid_column(to_grid(m), static_cast<std::size_t>(j)));
  };
  const auto anchor = g(s.topo.representation, i);
  const double pos = std::exp(testing::vec_cosine(anchor, g(s.attr.representation, i)) / tau);
  double denom = pos;
  for (Index k : negs) denom += std::exp(testing::vec_cosine(anchor, g(s.topo.representation, k)) / tau);
  return std::log(pos / denom);
}

TEST(LossContrastiveTest, MatchesPerNodeSummation) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> lab(0, 2);
  for (int t = 0; t < 5; ++t) {
    const ModelState s = two_view_state(random_dense(3, 9, rng), random_dense(3, 9, rng));
    const ProjectionHead h = ProjectionHead::for_communities(3, static_cast<std::uint64_t>(t));
    std::vector<int> l(9);
    for (int& x : l) x = lab(rng);
    const NegativeSets negs = debiased_negatives(labels_of(l, 3), std::nullopt, 0);
    double sum = 0.0;
    for (Index i = 0; i < 9; ++i) {
      const double want = naive_pair_loss(s, h, i, negs.members(i), 0.7);
      EXPECT_NEAR(contrastive_pair_loss(s, h, i, negs, 0.7), want, 1e-12);
      EXPECT_LE(contrastive_pair_loss(s, h, i, negs, 0.7), 0.0);
      sum += want;
    }
    const double loss = loss_contrastive(s, h, negs, 0.7);
    EXPECT_NEAR(loss, -sum / 9.0, 1e-10);
    EXPECT_GE(loss, 0.0);
  }
}

TEST(LossContrastiveTest, SingleNode) {
  const ModelState s = two_view_state(DenseMatrix{{1.0}, {2.0}}, DenseMatrix{{2.0}, {1.0}});
  const NegativeSets negs = debiased_negatives(labels_of({0}, 2), std::nullopt, 0);
  EXPECT_EQ(loss_contrastive(s, identity_head(2), negs, 1.0),
            -contrastive_pair_loss(s, identity_head(2), 0, negs, 1.0));
}

TEST(LossContrastiveTest, StableAtLowTemperature) {
  std::mt19937_64 rng(7);
  const ModelState s = two_view_state(random_dense(3, 50, rng), random_dense(3, 50, rng));
  std::vector<int> l(50);
  for (int i = 0; i < 50; ++i) l[static_cast<std::size_t>(i)] = i % 3;
  const NegativeSets negs = debiased_negatives(labels_of(l, 3), std::nullopt, 0);
  const ContrastiveGradient g = contrastive_gradient(s, identity_head(3), negs, 0.05);
  EXPECT_TRUE(std::isfinite(g.loss));
  EXPECT_TRUE(g.d_topo.all_finite());
  EXPECT_TRUE(g.d_attr.all_finite());
}

TEST(LossContrastiveTest, ZeroNormProjectionIsNeutral) {
  set_log_level(LogLevel::kQuiet);
  const ModelState s = two_view_state(DenseMatrix{{0.0, 1.0}, {0.0, 0.0}}, DenseMatrix{{1.0, 1.0}, {0.0, 0.0}});
  const NegativeSets negs = debiased_negatives(labels_of({0, 1}, 2), std::nullopt, 0);
  // Node 0 projects to zero: every θ involving it is 0, so l = log(1/2).
  EXPECT_NEAR(contrastive_pair_loss(s, identity_head(2), 0, negs, 1.0), std::log(0.5), 1e-15);
  const ContrastiveGradient g = contrastive_gradient(s, identity_head(2), negs, 1.0);
  EXPECT_EQ(g.zero_norm_vectors, 1);
  EXPECT_TRUE(g.d_topo.all_finite());
  set_log_level(LogLevel::kWarning);
}

TEST(CosineTest, InvariantToPositiveRescaling) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int t = 0; t < 50; ++t) {
    const DenseMatrix a = random_dense(1, 5, rng);
    const DenseMatrix b = random_dense(1, 5, rng);
    DenseMatrix sa = a, sb = b;
    sa.eigen() *= scale(rng);
    sb.eigen() *= scale(rng);
    EXPECT_NEAR(cosine(a.data(), b.data()), cosine(sa.data(), sb.data()), 1e-12);
  }
  const std::vector<double> zero = {0, 0};
  const std::vector<double> one = {1, 0};
  EXPECT_EQ(cosine(zero, one), 0.0);
}

}  // namespace
}  // namespace cdnmf
