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

// Reference computations for tests. Everything here is written with plain
// loops over std::vector and deliberately avoids the library kernels it is
// used to check.

#ifndef CDNMF_TESTS_ORACLES_H_
#define CDNMF_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cdnmf/linalg.h"

namespace cdnmf::testing {

using Grid = std::vector<std::vector<double>>;

inline Grid to_grid(const DenseMatrix& m) {
  Grid g(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  }
  return g;
}

inline Grid to_grid(const SparseMatrix& s) {
  Grid g(static_cast<std::size_t>(s.rows()), std::vector<double>(static_cast<std::size_t>(s.cols()), 0.0));
  for (const Triplet& t : s.entries()) g[static_cast<std::size_t>(t.row)][static_cast<std::size_t>(t.col)] = t.value;
  return g;
}

inline Grid naive_matmul(const Grid& a, const Grid& b) {
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  Grid c(n, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t l = 0; l < k; ++l) c[i][j] += a[i][l] * b[l][j];
  return c;
}

inline double max_abs_diff(const DenseMatrix& m, const Grid& g) {
  double worst = 0.0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      worst = std::max(worst, std::abs(m(i, j) - g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
  return worst;
}

inline double grid_frobenius_sq(const Grid& g) {
  double s = 0.0;
  for (const auto& row : g)
    for (double x : row) s += x * x;
  return s;
}

inline Grid grid_sub(const Grid& a, const Grid& b) {
  Grid c = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) c[i][j] -= b[i][j];
  return c;
}

// ½ Σ_i Σ_j A(i,j) ‖V(:,i) − V(:,j)‖².
inline double pairwise_laplacian_sum(const Grid& a, const Grid& v) {
  double s = 0.0;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (a[i][j] == 0.0) continue;
      double d = 0.0;
      for (const auto& row : v) d += (row[i] - row[j]) * (row[i] - row[j]);
      s += a[i][j] * d;
    }
  }
  return 0.5 * s;
}

inline DenseMatrix random_dense(Index rows, Index cols, std::mt19937_64& rng, double lo = -1.0,
                                double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  DenseMatrix m(rows, cols);
  for (double& x : m.data()) x = d(rng);
  return m;
}

// Symmetric, zero diagonal, optional random positive weights.
inline SparseMatrix random_graph(Index n, double p, std::mt19937_64& rng, bool weighted = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (u(rng) < p) {
        const double w = weighted ? 0.5 + u(rng) : 1.0;
        t.push_back({i, j, w});
        t.push_back({j, i, w});
      }
    }
  }
  return SparseMatrix::from_triplets(n, n, std::move(t));
}

inline SparseMatrix random_sparse(Index rows, Index cols, double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Triplet> t;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (u(rng) < p) t.push_back({i, j, u(rng) + 0.1});
  return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

inline double vec_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  if (aa == 0 || bb == 0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

inline std::vector<double> grid_column(const Grid& g, std::size_t j) {
  std::vector<double> c;
  for (const auto& row : g) c.push_back(row[j]);
  return c;
}

// g(x) = W2 relu(W1 x + b1) + b2 with explicit loops.
inline std::vector<double> naive_project(const Grid& w1, const Grid& b1, const Grid& w2,
                                         const Grid& b2, const std::vector<double>& x) {
  std::vector<double> hidden(w1.size());
  for (std::size_t h = 0; h < w1.size(); ++h) {
    double s = b1[h][0];
    for (std::size_t k = 0; k < x.size(); ++k) s += w1[h][k] * x[k];
    hidden[h] = std::max(s, 0.0);
  }
  std::vector<double> out(w2.size());
  for (std::size_t o = 0; o < w2.size(); ++o) {
    double s = b2[o][0];
    for (std::size_t h = 0; h < hidden.size(); ++h) s += w2[o][h] * hidden[h];
    out[o] = s;
  }
  return out;
}

}  // namespace cdnmf::testing

#endif  // CDNMF_TESTS_ORACLES_H_
