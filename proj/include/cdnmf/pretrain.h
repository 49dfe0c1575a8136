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

#ifndef CDNMF_PRETRAIN_H_
#define CDNMF_PRETRAIN_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cdnmf/linalg.h"
#include "cdnmf/model.h"

namespace cdnmf {

struct NmfOptions {
  int max_iters = 200;
  // Stop once |e_{t-1} − e_t| / e_{t-1} < tol.
  double tol = 1e-4;
  std::uint64_t seed = 0;
  // Called after every iteration with the current factors and error.
  std::function<void(int iter, const DenseMatrix& u, const DenseMatrix& v, double error)>
      on_iteration;
};

struct NmfResult {
  DenseMatrix u;  // a×k
  DenseMatrix v;  // k×b
  double final_error = 0.0;
  int iterations_run = 0;
  std::vector<double> error_trace;  // error_trace[0] is the initial error
};

// Frobenius NMF by Lee-Seung multiplicative updates:
//   U ← U ⊙ (M Vᵀ) ⊘ (U V Vᵀ + ε),  V ← V ⊙ (Uᵀ M) ⊘ (Uᵀ U V + ε).
// Throws DomainError if m has a negative entry, ShapeError unless
// 1 ≤ k ≤ min(a, b).
NmfResult nmf(const DataMatrix& m, Index k, const NmfOptions& options = {});

// Layerwise pretraining of a deep stack: (U_1, V_1) = NMF(m, r_1), then
// (U_i, V_i) = NMF(V_{i−1}, r_i). Layer i is seeded from options.seed and i;
// layer 0 uses options.seed unchanged.
FactorStack pretrain_stack(const DataMatrix& m, std::span<const Index> widths,
                           const NmfOptions& options = {});

inline constexpr double kMuEpsilon = 1e-10;

}  // namespace cdnmf

#endif  // CDNMF_PRETRAIN_H_
