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

#include "cdnmf/datasets.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "cdnmf/errors.h"

namespace cdnmf {
namespace {

namespace fs = std::filesystem;

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == '\t' || line[i] == ' ')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != '\t' && line[j] != ' ') ++j;
    out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Calls fn(line_number, content) for every non-comment, non-blank line.
template <typename Fn>
void for_each_line(const fs::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    fn(number, view);
  }
}

double parse_double(std::string_view token, const fs::path& path, int line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
    throw ParseError(path.string(), line, "expected a number, got '" + std::string(token) + "'");
  }
  return value;
}

Index parse_index(std::string_view token, const fs::path& path, int line) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || value < 0) {
    throw ParseError(path.string(), line,
                     "expected a feature index, got '" + std::string(token) + "'");
  }
  return static_cast<Index>(value);
}

using NodeIndex = std::unordered_map<std::string, Index>;

struct FeatureColumns {
  std::vector<Triplet> triplets;  // (feature, node, value)
  Index dim = 0;
};

DataMatrix assemble_features(FeatureColumns cols, Index n, const LoadOptions& options) {
  if (options.binarize_features) {
    for (Triplet& t : cols.triplets) t.value = t.value != 0.0 ? 1.0 : 0.0;
  }
  if (options.normalize_features) {
    std::vector<double> norm(static_cast<std::size_t>(n), 0.0);
    for (const Triplet& t : cols.triplets) norm[static_cast<std::size_t>(t.col)] += t.value * t.value;
    for (Triplet& t : cols.triplets) {
      const double s = norm[static_cast<std::size_t>(t.col)];
      if (s > 0.0) t.value /= std::sqrt(s);
    }
  }
  SparseMatrix sparse = SparseMatrix::from_triplets(cols.dim, n, std::move(cols.triplets));
  DataMatrix m = sparse;
  if (density(m) > options.sparse_density_threshold) return densify(sparse);
  return m;
}

SparseMatrix symmetric_adjacency(Index n, const std::vector<Triplet>& directed) {
  std::map<std::pair<Index, Index>, double> edges;
  for (const Triplet& t : directed) {
    if (t.row == t.col) continue;
    const auto key = std::minmax(t.row, t.col);
    auto [it, inserted] = edges.emplace(key, t.value);
    if (!inserted) it->second = std::max(it->second, t.value);
  }
  std::vector<Triplet> sym;
  sym.reserve(edges.size() * 2);
  for (const auto& [key, w] : edges) {
    sym.push_back({key.first, key.second, w});
    sym.push_back({key.second, key.first, w});
  }
  return SparseMatrix::from_triplets(n, n, std::move(sym));
}

void assign_labels(AttributedGraph& g, const std::vector<std::optional<std::string>>& raw) {
  std::set<std::string> distinct;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!raw[i]) throw ReferenceError("no label for node '" + g.node_ids[i] + "'");
    distinct.insert(*raw[i]);
  }
  g.label_names.assign(distinct.begin(), distinct.end());
  std::map<std::string, int> code;
  for (std::size_t c = 0; c < g.label_names.size(); ++c) code[g.label_names[c]] = static_cast<int>(c);
  std::vector<int> labels(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) labels[i] = code[*raw[i]];
  g.labels = std::move(labels);
  g.num_communities = static_cast<int>(g.label_names.size());
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace

void AttributedGraph::validate() const {
  const Index n = num_nodes();
  if (adjacency.cols() != n) throw ShapeError("adjacency is not square");
  if (!adjacency.is_symmetric()) throw DomainError("adjacency is not symmetric");
  for (const Triplet& t : adjacency.entries()) {
    if (t.row == t.col) throw DomainError("adjacency has a self-loop");
    if (t.value < 0.0) throw DomainError("adjacency has a negative weight");
  }
  if (cols(features) != n) {
    throw ShapeError("features have " + std::to_string(cols(features)) +
                     " columns for " + std::to_string(n) + " nodes");
  }
  if (static_cast<Index>(node_ids.size()) != n) throw ShapeError("node id count mismatch");
  if (labels) {
    if (static_cast<Index>(labels->size()) != n) throw ShapeError("label count mismatch");
    for (int c : *labels) {
      if (c < 0 || c >= num_communities) throw DomainError("label out of range");
    }
  }
}

AttributedGraph load_graph(const fs::path& edges_path, const fs::path& features_path,
                           const std::optional<fs::path>& labels_path,
                           const LoadOptions& options) {
  AttributedGraph g;
  NodeIndex index;
  FeatureColumns feats;
  enum class Layout { kUnknown, kDense, kSparse } layout = Layout::kUnknown;
  Index dense_width = -1;

  for_each_line(features_path, [&](int line, std::string_view text) {
    auto fields = split_fields(text);
    const std::string id(fields[0]);
    const Index node = static_cast<Index>(g.node_ids.size());
    if (!index.emplace(id, node).second) {
      throw DuplicateError(features_path.string() + ":" + std::to_string(line) +
                           ": duplicate node id '" + id + "'");
    }
    g.node_ids.push_back(id);
    if (fields.size() == 1) {
      if (layout == Layout::kDense && dense_width != 0) {
        throw ParseError(features_path.string(), line, "missing feature values");
      }
      return;
    }
    const bool sparse_line = fields[1].find(':') != std::string_view::npos;
    const Layout this_layout = sparse_line ? Layout::kSparse : Layout::kDense;
    if (layout == Layout::kUnknown) layout = this_layout;
    if (layout != this_layout) {
      throw ParseError(features_path.string(), line, "mixes dense and sparse feature rows");
    }
    if (layout == Layout::kDense) {
      const Index width = static_cast<Index>(fields.size()) - 1;
      if (dense_width < 0) dense_width = width;
      if (width != dense_width) {
        throw ParseError(features_path.string(), line,
                         "expected " + std::to_string(dense_width) + " features, got " +
                             std::to_string(width));
      }
      for (Index f = 0; f < width; ++f) {
        const double v = parse_double(fields[static_cast<std::size_t>(f) + 1], features_path, line);
        if (v != 0.0) feats.triplets.push_back({f, node, v});
      }
      feats.dim = width;
    } else {
      for (std::size_t k = 1; k < fields.size(); ++k) {
        const auto colon = fields[k].find(':');
        if (colon == std::string_view::npos) {
          throw ParseError(features_path.string(), line, "expected idx:val, got '" +
                                                             std::string(fields[k]) + "'");
        }
        const Index f = parse_index(fields[k].substr(0, colon), features_path, line);
        const double v = parse_double(fields[k].substr(colon + 1), features_path, line);
        if (v != 0.0) feats.triplets.push_back({f, node, v});
        feats.dim = std::max(feats.dim, f + 1);
      }
    }
  });
  const Index n = static_cast<Index>(g.node_ids.size());

  std::vector<Triplet> directed;
  for_each_line(edges_path, [&](int line, std::string_view text) {
    auto fields = split_fields(text);
    if (fields.size() != 2 && fields.size() != 3) {
      throw ParseError(edges_path.string(), line, "expected src<TAB>dst[<TAB>weight]");
    }
    double w = 1.0;
    if (fields.size() == 3) {
      w = parse_double(fields[2], edges_path, line);
      if (w <= 0.0) throw ParseError(edges_path.string(), line, "edge weight must be positive");
    }
    Index ends[2];
    for (int e = 0; e < 2; ++e) {
      auto it = index.find(std::string(fields[static_cast<std::size_t>(e)]));
      if (it == index.end()) {
        throw ReferenceError(edges_path.string() + ":" + std::to_string(line) +
                             ": unknown node id '" + std::string(fields[static_cast<std::size_t>(e)]) + "'");
      }
      ends[e] = it->second;
    }
    directed.push_back({ends[0], ends[1], w});
  });
  g.adjacency = symmetric_adjacency(n, directed);
  g.features = assemble_features(std::move(feats), n, options);

  if (labels_path) {
    std::vector<std::optional<std::string>> raw(static_cast<std::size_t>(n));
    for_each_line(*labels_path, [&](int line, std::string_view text) {
      const auto sep = text.find_first_of("\t ");
      if (sep == std::string_view::npos) {
        throw ParseError(labels_path->string(), line, "expected node_id<TAB>label");
      }
      const std::string id(text.substr(0, sep));
      const std::string label(trim(text.substr(sep + 1)));
      auto it = index.find(id);
      if (it == index.end()) {
        throw ReferenceError(labels_path->string() + ":" + std::to_string(line) +
                             ": unknown node id '" + id + "'");
      }
      auto& slot = raw[static_cast<std::size_t>(it->second)];
      if (slot) {
        throw DuplicateError(labels_path->string() + ":" + std::to_string(line) +
                             ": second label for node '" + id + "'");
      }
      slot = label;
    });
    assign_labels(g, raw);
  }
  g.validate();
  return g;
}

AttributedGraph load_linqs(const fs::path& content_path, const fs::path& cites_path,
                           const LoadOptions& options) {
  AttributedGraph g;
  NodeIndex index;
  FeatureColumns feats;
  std::vector<std::optional<std::string>> raw;
  Index width = -1;
  for_each_line(content_path, [&](int line, std::string_view text) {
    auto fields = split_fields(text);
    if (fields.size() < 2) throw ParseError(content_path.string(), line, "too few fields");
    const Index w = static_cast<Index>(fields.size()) - 2;
    if (width < 0) width = w;
    if (w != width) throw ParseError(content_path.string(), line, "inconsistent feature count");
    const std::string id(fields[0]);
    const Index node = static_cast<Index>(g.node_ids.size());
    if (!index.emplace(id, node).second) {
      throw DuplicateError(content_path.string() + ":" + std::to_string(line) +
                           ": duplicate node id '" + id + "'");
    }
    g.node_ids.push_back(id);
    for (Index f = 0; f < w; ++f) {
      const double v = parse_double(fields[static_cast<std::size_t>(f) + 1], content_path, line);
      if (v != 0.0) feats.triplets.push_back({f, node, v});
    }
    raw.emplace_back(std::string(fields.back()));
  });
  feats.dim = std::max<Index>(width, 0);
  const Index n = static_cast<Index>(g.node_ids.size());

  std::vector<Triplet> directed;
  for_each_line(cites_path, [&](int line, std::string_view text) {
    auto fields = split_fields(text);
    if (fields.size() != 2) throw ParseError(cites_path.string(), line, "expected two ids");
    auto a = index.find(std::string(fields[0]));
    auto b = index.find(std::string(fields[1]));
    if (a == index.end() || b == index.end()) return;
    directed.push_back({a->second, b->second, 1.0});
  });
  g.adjacency = symmetric_adjacency(n, directed);
  g.features = assemble_features(std::move(feats), n, options);
  assign_labels(g, raw);
  g.validate();
  return g;
}

AttributedGraph load_builtin(const std::string& name, const fs::path& data_root,
                             const LoadOptions& options) {
  const fs::path dir = data_root / name;
  if (fs::exists(dir / "edges.tsv") && fs::exists(dir / "features.tsv")) {
    std::optional<fs::path> labels;
    if (fs::exists(dir / "labels.tsv")) labels = dir / "labels.tsv";
    return load_graph(dir / "edges.tsv", dir / "features.tsv", labels, options);
  }
  for (const fs::path& base : {dir, data_root}) {
    const fs::path content = base / (name + ".content");
    const fs::path cites = base / (name + ".cites");
    if (fs::exists(content) && fs::exists(cites)) return load_linqs(content, cites, options);
  }
  throw DataError("dataset '" + name + "' not found under " + data_root.string() +
                  " (expected " + name + "/edges.tsv + " + name + "/features.tsv, or " +
                  name + ".content + " + name + ".cites in " + name + "/ or the root)");
}

void save_graph(const AttributedGraph& graph, const fs::path& dir) {
  fs::create_directories(dir);
  const auto& ids = graph.node_ids;
  std::ostringstream edges;
  for (const Triplet& t : graph.adjacency.entries()) {
    if (t.row >= t.col) continue;
    edges << ids[static_cast<std::size_t>(t.row)] << '\t' << ids[static_cast<std::size_t>(t.col)];
    if (t.value != 1.0) edges << '\t' << format_double(t.value);
    edges << '\n';
  }
  write_file(dir / "edges.tsv", edges.str());

  std::ostringstream feats;
  const Index n = graph.num_nodes();
  if (const auto* s = std::get_if<SparseMatrix>(&graph.features)) {
    // Entries are row(feature)-major; regroup by node.
    std::vector<std::vector<std::pair<Index, double>>> per_node(static_cast<std::size_t>(n));
    for (const Triplet& t : s->entries()) per_node[static_cast<std::size_t>(t.col)].push_back({t.row, t.value});
    for (Index i = 0; i < n; ++i) {
      feats << ids[static_cast<std::size_t>(i)];
      for (const auto& [f, v] : per_node[static_cast<std::size_t>(i)]) feats << '\t' << f << ':' << format_double(v);
      // Keep the highest index so the feature dimension survives a reload.
      if (i == 0 && s->rows() > 0 &&
          (per_node[0].empty() || per_node[0].back().first != s->rows() - 1)) {
        feats << '\t' << (s->rows() - 1) << ":0";
      }
      feats << '\n';
    }
  } else {
    const auto& d = std::get<DenseMatrix>(graph.features);
    for (Index i = 0; i < n; ++i) {
      feats << ids[static_cast<std::size_t>(i)];
      for (Index f = 0; f < d.rows(); ++f) feats << '\t' << format_double(d(f, i));
      feats << '\n';
    }
  }
  write_file(dir / "features.tsv", feats.str());

  if (graph.labels) {
    std::ostringstream labels;
    for (Index i = 0; i < n; ++i) {
      const int c = (*graph.labels)[static_cast<std::size_t>(i)];
      labels << ids[static_cast<std::size_t>(i)] << '\t'
             << graph.label_names[static_cast<std::size_t>(c)] << '\n';
    }
    write_file(dir / "labels.tsv", labels.str());
  }
}

void SbmSpec::validate() const {
  if (block_sizes.empty()) throw DomainError("SBM needs at least one block");
  for (Index b : block_sizes) {
    if (b <= 0) throw DomainError("SBM block sizes must be positive");
  }
  if (!(0.0 <= p_out && p_out < p_in && p_in <= 1.0)) {
    throw DomainError("SBM probabilities must satisfy 0 <= p_out < p_in <= 1");
  }
  if (feature_dim < 0) throw DomainError("feature_dim must be nonnegative");
  if (feature_noise < 0.0) throw DomainError("feature_noise must be nonnegative");
}

AttributedGraph generate_sbm(const SbmSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  AttributedGraph g;
  std::vector<int> block;
  const int num_blocks = static_cast<int>(spec.block_sizes.size());
  for (int b = 0; b < num_blocks; ++b) {
    for (Index k = 0; k < spec.block_sizes[static_cast<std::size_t>(b)]; ++k) block.push_back(b);
  }
  const Index n = static_cast<Index>(block.size());
  const int digits = static_cast<int>(std::to_string(std::max(num_blocks - 1, 0)).size());
  for (Index i = 0; i < n; ++i) g.node_ids.push_back("n" + std::to_string(i));
  for (int b = 0; b < num_blocks; ++b) {
    std::string s = std::to_string(b);
    g.label_names.push_back("block" + std::string(static_cast<std::size_t>(digits) - s.size(), '0') + s);
  }

  std::vector<Triplet> edges;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double p = block[static_cast<std::size_t>(i)] == block[static_cast<std::size_t>(j)]
                           ? spec.p_in : spec.p_out;
      if (unit(rng) < p) {
        edges.push_back({i, j, 1.0});
        edges.push_back({j, i, 1.0});
      }
    }
  }
  g.adjacency = SparseMatrix::from_triplets(n, n, std::move(edges));

  const Index d = spec.feature_dim * num_blocks;
  DenseMatrix x(d, n);
  for (Index i = 0; i < n; ++i) {
    const Index b = block[static_cast<std::size_t>(i)];
    for (Index f = 0; f < d; ++f) {
      double v = spec.feature_noise > 0.0 ? spec.feature_noise * unit(rng) : 0.0;
      if (f / std::max<Index>(spec.feature_dim, 1) == b && spec.feature_dim > 0) v += 1.0;
      x(f, i) = v;
    }
  }
  g.features = std::move(x);
  g.labels = std::move(block);
  g.num_communities = num_blocks;
  g.validate();
  return g;
}

}  // namespace cdnmf
