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

#include "cdnmf/pretrain.h"

#include <random>

#include "cdnmf/contrastive.h"
#include "cdnmf/datasets.h"
#include "cdnmf/errors.h"
#include "cdnmf/metrics.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace cdnmf {
namespace {

using testing::to_grid;

double direct_error(const DataMatrix& m, const DenseMatrix& u, const DenseMatrix& v) {
  const auto target = to_grid(densify(m));
  return testing::grid_frobenius_sq(
      testing::grid_sub(target, testing::naive_matmul(to_grid(u), to_grid(v))));
}

TEST(NmfTest, RecoversRankOneOuterProduct) {
  DenseMatrix m(6, 5);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 5; ++j) m(i, j) = (1.0 + i) * (0.5 + 0.3 * j);
  NmfOptions opt;
  opt.max_iters = 500;
  opt.tol = 0.0;
  const NmfResult r = nmf(m, 1, opt);
  EXPECT_LT(r.final_error, 1e-6);
  EXPECT_NEAR(r.final_error, direct_error(m, r.u, r.v), 1e-9);
}

TEST(NmfTest, ZeroTargetDrivesVToZero) {
  const NmfResult r = nmf(DenseMatrix(4, 4), 2, {});
  EXPECT_GT(r.error_trace.front(), 0.0);
  EXPECT_EQ(r.final_error, 0.0);
  EXPECT_EQ(frobenius_sq(r.v), 0.0);
}

TEST(NmfTest, ErrorMonotoneAgainstRecomputation) {
  std::mt19937_64 rng(3);
  const DenseMatrix m = testing::random_dense(10, 10, rng, 0.0, 1.0);
  NmfOptions opt;
  opt.max_iters = 100;
  opt.tol = 0.0;
  std::vector<double> recomputed;
  opt.on_iteration = [&](int, const DenseMatrix& u, const DenseMatrix& v, double err) {
    const double direct = direct_error(m, u, v);
    EXPECT_NEAR(err, direct, 1e-10 * std::max(1.0, direct));
    EXPECT_TRUE((u.eigen().array() >= 0.0).all());
    EXPECT_TRUE((v.eigen().array() >= 0.0).all());
    recomputed.push_back(direct);
  };
  const NmfResult r = nmf(m, 3, opt);
  ASSERT_EQ(recomputed.size(), 100u);
  for (std::size_t t = 1; t < recomputed.size(); ++t) {
    EXPECT_LE(recomputed[t], recomputed[t - 1] + 1e-10) << "iteration " << t;
  }
  EXPECT_EQ(r.iterations_run, 100);
}

TEST(NmfTest, SparseAndDenseTargetsAgree) {
  std::mt19937_64 rng(4);
  const SparseMatrix s = testing::random_sparse(12, 9, 0.3, rng);
  NmfOptions opt;
  opt.max_iters = 30;
  const NmfResult a = nmf(DataMatrix(s), 3, opt);
  const NmfResult b = nmf(DataMatrix(densify(s)), 3, opt);
  EXPECT_LT((a.u.eigen() - b.u.eigen()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(a.final_error, b.final_error, 1e-9);
}

TEST(NmfTest, StopsOnTolerance) {
  std::mt19937_64 rng(5);
  const DenseMatrix m = testing::random_dense(8, 8, rng, 0.0, 1.0);
  NmfOptions opt;
  opt.max_iters = 10000;
  opt.tol = 1e-3;
  const NmfResult r = nmf(m, 2, opt);
  EXPECT_LT(r.iterations_run, 10000);
  const auto& e = r.error_trace;
  EXPECT_LT(std::abs(e[e.size() - 2] - e.back()) / e[e.size() - 2], 1e-3);
}

TEST(NmfTest, Errors) {
  EXPECT_THROW(nmf(DenseMatrix{{1, -1}, {0, 1}}, 1, {}), DomainError);
  EXPECT_THROW(nmf(DenseMatrix(3, 2, 1.0), 3, {}), ShapeError);
  EXPECT_THROW(nmf(DenseMatrix(3, 2, 1.0), 0, {}), ShapeError);
}

TEST(PretrainStackTest, DepthOneEqualsSingleNmf) {
  std::mt19937_64 rng(6);
  const DenseMatrix m = testing::random_dense(9, 7, rng, 0.0, 1.0);
  NmfOptions opt;
  opt.seed = 99;
  const std::vector<Index> widths = {3};
  const FactorStack s = pretrain_stack(m, widths, opt);
  const NmfResult r = nmf(m, 3, opt);
  ASSERT_EQ(s.depth(), 1);
  EXPECT_EQ(s.factors[0], r.u);
  EXPECT_EQ(s.representation, r.v);
}

TEST(PretrainStackTest, ShapeContract) {
  std::mt19937_64 rng(7);
  const DenseMatrix m = testing::random_dense(8, 8, rng, 0.0, 1.0);
  const std::vector<Index> widths = {4, 2};
  const FactorStack s = pretrain_stack(m, widths, {});
  ASSERT_EQ(s.depth(), 2);
  EXPECT_EQ(s.factors[0].rows(), 8);
  EXPECT_EQ(s.factors[0].cols(), 4);
  EXPECT_EQ(s.factors[1].rows(), 4);
  EXPECT_EQ(s.factors[1].cols(), 2);
  EXPECT_EQ(s.representation.rows(), 2);
  EXPECT_EQ(s.representation.cols(), 8);
  const std::vector<Index> increasing = {2, 4};
  EXPECT_THROW(pretrain_stack(m, increasing, {}), ShapeError);
}

TEST(PretrainStackTest, RecoversPlantedBlocks) {
  SbmSpec spec;
  spec.block_sizes = {40, 40};
  spec.p_in = 0.3;
  spec.p_out = 0.02;
  spec.seed = 1;
  const AttributedGraph g = generate_sbm(spec);
  const std::vector<Index> widths = {8, 2};
  NmfOptions opt;
  opt.seed = 3;
  const FactorStack s = pretrain_stack(DataMatrix(g.adjacency), widths, opt);
  const auto pred = pseudo_labels(s.representation).labels;
  EXPECT_GT(accuracy(pred, *g.labels).acc, 0.9);
}

}  // namespace
}  // namespace cdnmf
