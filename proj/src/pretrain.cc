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

#include <algorithm>
#include <cmath>
#include <random>

#include "cdnmf/errors.h"

namespace cdnmf {
namespace {

std::uint64_t layer_seed(std::uint64_t seed, std::size_t layer) {
  if (layer == 0) return seed;
  // splitmix64 step keeps neighbouring layers decorrelated.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(layer);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

DenseMatrix random_factor(Index rows, Index cols, double scale, std::mt19937_64& rng) {
  // Open interval (0, 1): a factor entry that starts at 0 stays at 0 forever.
  std::uniform_real_distribution<double> unit(std::nextafter(0.0, 1.0), 1.0);
  DenseMatrix m(rows, cols);
  for (double& x : m.data()) x = scale * unit(rng);
  return m;
}

// x·xᵀ through a symmetric rank update, half the work of a general product.
template <typename Expr>
DenseMatrix::Storage gram(const Expr& x) {
  DenseMatrix::Storage g = DenseMatrix::Storage::Zero(x.rows(), x.rows());
  g.template selfadjointView<Eigen::Lower>().rankUpdate(x);
  g.template triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

}  // namespace

NmfResult nmf(const DataMatrix& m, Index k, const NmfOptions& options) {
  const Index a = rows(m);
  const Index b = cols(m);
  if (k < 1 || k > std::min(a, b)) {
    throw ShapeError("NMF rank " + std::to_string(k) + " outside [1, " +
                     std::to_string(std::min(a, b)) + "] for a " + shape_string(a, b) +
                     " matrix");
  }
  if (!is_nonnegative(m)) throw DomainError("NMF target has a negative entry");

  std::mt19937_64 rng(options.seed);
  const double mu = mean(m);
  const double scale = mu > 0.0 ? std::sqrt(mu / static_cast<double>(k)) : 1.0;
  NmfResult r;
  r.u = random_factor(a, k, scale, rng);
  r.v = random_factor(k, b, scale, rng);

  const double norm_m = frobenius_sq(m);
  auto& u = r.u.eigen();
  auto& v = r.v.eigen();

  // Error from Gram terms: ‖M‖² − 2⟨UᵀM, V⟩ + ⟨UᵀU, VVᵀ⟩.
  auto error_of = [&](const DenseMatrix::Storage& ut_m, const DenseMatrix::Storage& ut_u,
                      const DenseMatrix::Storage& v_vt) {
    const double e = norm_m - 2.0 * ut_m.cwiseProduct(v).sum() + ut_u.cwiseProduct(v_vt).sum();
    return std::max(e, 0.0);
  };

  DenseMatrix::Storage v_vt = gram(v);
  {
    DenseMatrix::Storage ut_m = multiply_tn(m, r.u).eigen().transpose();
    DenseMatrix::Storage ut_u = gram(u.transpose());
    r.error_trace.push_back(error_of(ut_m, ut_u, v_vt));
  }

  double prev = r.error_trace.back();
  for (int it = 0; it < options.max_iters; ++it) {
    // U update.
    const DenseMatrix m_vt = multiply(m, transpose(r.v));
    DenseMatrix::Storage denom_u = u * v_vt;
    u = u.cwiseProduct(m_vt.eigen()).cwiseQuotient((denom_u.array() + kMuEpsilon).matrix());

    // V update.
    const DenseMatrix::Storage ut_m = multiply_tn(m, r.u).eigen().transpose();
    const DenseMatrix::Storage ut_u = gram(u.transpose());
    DenseMatrix::Storage denom_v = ut_u * v;
    v = v.cwiseProduct(ut_m).cwiseQuotient((denom_v.array() + kMuEpsilon).matrix());

    v_vt = gram(v);
    const double err = error_of(ut_m, ut_u, v_vt);
    r.error_trace.push_back(err);
    r.iterations_run = it + 1;
    if (options.on_iteration) options.on_iteration(it + 1, r.u, r.v, err);

    const double rel = prev > 0.0 ? std::abs(prev - err) / prev : 0.0;
    prev = err;
    if (rel < options.tol) break;
  }
  r.final_error = r.error_trace.back();
  return r;
}

FactorStack pretrain_stack(const DataMatrix& m, std::span<const Index> widths,
                           const NmfOptions& options) {
  if (widths.empty()) throw ShapeError("pretraining needs at least one layer width");
  for (std::size_t i = 1; i < widths.size(); ++i) {
    if (widths[i] > widths[i - 1]) throw ShapeError("layer widths must be non-increasing");
  }
  FactorStack stack;
  DataMatrix input = m;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    NmfOptions layer = options;
    layer.seed = layer_seed(options.seed, i);
    NmfResult r = nmf(input, widths[i], layer);
    stack.factors.push_back(std::move(r.u));
    input = r.v;
    if (i + 1 == widths.size()) stack.representation = std::move(r.v);
  }
  return stack;
}

}  // namespace cdnmf
