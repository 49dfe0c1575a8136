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

#ifndef CDNMF_METRICS_H_
#define CDNMF_METRICS_H_

#include <span>
#include <string>
#include <vector>

namespace cdnmf {

struct AccuracyResult {
  double acc = 0.0;
  // permutation[p] = true label matched to predicted label p, or -1 when p
  // is left unmatched (more predicted than true labels).
  std::vector<int> permutation;
};

// Clustering accuracy under the best one-to-one matching of predicted to
// true labels (Hungarian algorithm on the contingency table). Labels must be
// nonnegative. Throws ShapeError on length mismatch.
AccuracyResult accuracy(std::span<const int> pred, std::span<const int> truth);

// Normalized mutual information, I(p; t) / ((H(p) + H(t)) / 2), natural log.
// Returns 0 when both entropies vanish.
double nmi(std::span<const int> pred, std::span<const int> truth);

// Contingency counts: confusion[p][t] = #{i : pred_i = p, truth_i = t}.
std::vector<std::vector<long>> confusion_matrix(std::span<const int> pred,
                                                std::span<const int> truth);

// Maximum-weight perfect assignment on a square matrix; returns col[row].
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weights);

struct EvalReport {
  double acc = 0.0;
  double nmi = 0.0;
  std::vector<int> matched_permutation;
  std::vector<std::vector<long>> confusion;
  std::string nmi_normalization = "arithmetic";
};

EvalReport evaluate(std::span<const int> pred, std::span<const int> truth);

}  // namespace cdnmf

#endif  // CDNMF_METRICS_H_
