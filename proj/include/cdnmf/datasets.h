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

#ifndef CDNMF_DATASETS_H_
#define CDNMF_DATASETS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cdnmf/linalg.h"

namespace cdnmf {

// An undirected graph with node attributes. Features are stored d×n, one
// column per node, so the attribute-view representation lines up column for
// column with the topology-view representation.
struct AttributedGraph {
  SparseMatrix adjacency;                 // n×n, symmetric, zero diagonal
  DataMatrix features;                    // d×n
  std::optional<std::vector<int>> labels; // ground truth in [0, num_communities)
  int num_communities = 0;
  std::vector<std::string> node_ids;
  std::vector<std::string> label_names;   // label_names[c] is the on-disk name of c

  Index num_nodes() const { return adjacency.rows(); }
  Index feature_dim() const { return rows(features); }

  // Throws DomainError/ShapeError when an invariant is broken.
  void validate() const;
};

struct LoadOptions {
  // Scale every node's feature column to unit L2 norm.
  bool normalize_features = false;
  // Replace every nonzero feature by 1.
  bool binarize_features = false;
  // Features at or below this density are kept sparse internally.
  double sparse_density_threshold = 0.25;
};

// Loads the three-file TSV layout:
//   edges:    src<TAB>dst[<TAB>weight]
//   features: node_id<TAB>v1<TAB>v2...   or   node_id<TAB>idx:val...
//   labels:   node_id<TAB>label
// Node indices follow first appearance in the features file. Lines starting
// with '#' and blank lines are ignored.
AttributedGraph load_graph(const std::filesystem::path& edges_path,
                           const std::filesystem::path& features_path,
                           const std::optional<std::filesystem::path>& labels_path,
                           const LoadOptions& options = {});

// Loads the LINQS citation layout (<name>.content with id, binary features
// and label per line; <name>.cites with "cited citing" pairs). Citations
// touching ids missing from the content file are dropped, as is customary for
// Citeseer.
AttributedGraph load_linqs(const std::filesystem::path& content_path,
                           const std::filesystem::path& cites_path,
                           const LoadOptions& options = {});

// Resolves a builtin dataset name (cora, citeseer, pubmed) under data_root.
// Looks for edges.tsv/features.tsv/labels.tsv in <data_root>/<name>/, then
// for the LINQS files <name>.content/<name>.cites in <data_root>/<name>/ and
// finally directly in <data_root>.
AttributedGraph load_builtin(const std::string& name,
                             const std::filesystem::path& data_root,
                             const LoadOptions& options = {});

// Inverse of load_graph: writes edges.tsv, features.tsv and (when labels are
// present) labels.tsv into dir.
void save_graph(const AttributedGraph& graph, const std::filesystem::path& dir);

struct SbmSpec {
  std::vector<Index> block_sizes;
  double p_in = 0.3;
  double p_out = 0.01;
  Index feature_dim = 8;  // indicator width per block
  double feature_noise = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

// Planted-partition graph. Features are (feature_dim · blocks)×n: a one-hot
// block indicator of width feature_dim plus uniform noise in
// [0, feature_noise).
AttributedGraph generate_sbm(const SbmSpec& spec);

}  // namespace cdnmf

#endif  // CDNMF_DATASETS_H_
