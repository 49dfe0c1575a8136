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

#include "cdnmf/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cdnmf/errors.h"

namespace cdnmf {
namespace {

void check_inputs(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) {
    throw ShapeError("label vectors differ in length: " + std::to_string(pred.size()) +
                     " vs " + std::to_string(truth.size()));
  }
  for (int x : pred) {
    if (x < 0) throw DomainError("negative predicted label");
  }
  for (int x : truth) {
    if (x < 0) throw DomainError("negative true label");
  }
}

int label_count(std::span<const int> labels) {
  int m = -1;
  for (int x : labels) m = std::max(m, x);
  return m + 1;
}

double entropy(const std::vector<double>& counts, double n) {
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) h -= (c / n) * std::log(c / n);
  }
  return h;
}

}  // namespace

std::vector<std::vector<long>> confusion_matrix(std::span<const int> pred,
                                                std::span<const int> truth) {
  check_inputs(pred, truth);
  const int kp = label_count(pred);
  const int kt = label_count(truth);
  std::vector<std::vector<long>> c(static_cast<std::size_t>(kp),
                                   std::vector<long>(static_cast<std::size_t>(kt), 0));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++c[static_cast<std::size_t>(pred[i])][static_cast<std::size_t>(truth[i])];
  }
  return c;
}

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights) {
  // Kuhn-Munkres with potentials (O(n³)), minimizing the negated weights.
  const std::size_t n = weights.size();
  for (const auto& row : weights) {
    if (row.size() != n) throw ShapeError("assignment matrix must be square");
  }
  if (n == 0) return {};
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; p[j] = row assigned to column j.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -weights[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> col(n, -1);
  for (std::size_t j = 1; j <= n; ++j) col[p[j] - 1] = static_cast<int>(j - 1);
  return col;
}

AccuracyResult accuracy(std::span<const int> pred, std::span<const int> truth) {
  check_inputs(pred, truth);
  AccuracyResult r;
  if (pred.empty()) return r;
  const auto c = confusion_matrix(pred, truth);
  const std::size_t kp = c.size();
  const std::size_t kt = c.empty() ? 0 : c[0].size();
  const std::size_t k = std::max(kp, kt);
  std::vector<std::vector<double>> w(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < kp; ++i) {
    for (std::size_t j = 0; j < kt; ++j) w[i][j] = static_cast<double>(c[i][j]);
  }
  const std::vector<int> col = max_weight_assignment(w);
  long matched = 0;
  r.permutation.assign(kp, -1);
  for (std::size_t i = 0; i < kp; ++i) {
    const auto j = static_cast<std::size_t>(col[i]);
    if (j < kt) {
      r.permutation[i] = col[i];
      matched += c[i][j];
    }
  }
  r.acc = static_cast<double>(matched) / static_cast<double>(pred.size());
  return r;
}

double nmi(std::span<const int> pred, std::span<const int> truth) {
  const auto c = confusion_matrix(pred, truth);
  if (pred.empty()) return 0.0;
  const double n = static_cast<double>(pred.size());
  const std::size_t kp = c.size();
  const std::size_t kt = kp ? c[0].size() : 0;
  std::vector<double> rp(kp, 0.0), ct(kt, 0.0);
  for (std::size_t i = 0; i < kp; ++i) {
    for (std::size_t j = 0; j < kt; ++j) {
      rp[i] += static_cast<double>(c[i][j]);
      ct[j] += static_cast<double>(c[i][j]);
    }
  }
  double mi = 0.0;
  for (std::size_t i = 0; i < kp; ++i) {
    for (std::size_t j = 0; j < kt; ++j) {
      if (c[i][j] == 0) continue;
      const double pij = static_cast<double>(c[i][j]) / n;
      mi += pij * std::log(pij * n * n / (rp[i] * ct[j]));
    }
  }
  const double denom = 0.5 * (entropy(rp, n) + entropy(ct, n));
  if (denom <= 0.0) return 0.0;
  return std::clamp(mi / denom, 0.0, 1.0);
}

EvalReport evaluate(std::span<const int> pred, std::span<const int> truth) {
  EvalReport e;
  AccuracyResult a = accuracy(pred, truth);
  e.acc = a.acc;
  e.matched_permutation = std::move(a.permutation);
  e.nmi = nmi(pred, truth);
  e.confusion = confusion_matrix(pred, truth);
  return e;
}

}  // namespace cdnmf
