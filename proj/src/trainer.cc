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

#include "cdnmf/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cdnmf/errors.h"
#include "cdnmf/io.h"
#include "cdnmf/log.h"
#include "cdnmf/pretrain.h"

namespace cdnmf {
namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed * 0x9e3779b97f4a7c15ULL + stream + 0x632be59bd9b4e019ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kTopoStream = 1;
constexpr std::uint64_t kAttrStream = 2;
constexpr std::uint64_t kHeadStream = 3;
constexpr std::uint64_t kNegativeStream = 1000;

void check_loss(const LossBreakdown& l, int epoch) {
  const char* term = nullptr;
  if (!std::isfinite(l.dnmf)) term = "L_DNMF";
  else if (!std::isfinite(l.reg)) term = "L_reg";
  else if (!std::isfinite(l.cl)) term = "L_cl";
  else if (!std::isfinite(l.total)) term = "total";
  if (term) {
    throw NumericError(std::string("non-finite ") + term + " loss at epoch " +
                       std::to_string(epoch));
  }
}

constexpr char kMagic[8] = {'C', 'D', 'N', 'M', 'F', 'C', 'K', '1'};

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(std::istream& in, const std::filesystem::path& path) {
  T value;
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw DataError("truncated checkpoint " + path.string());
  }
  return value;
}

void put_matrix(std::string& out, const DenseMatrix& m) {
  put<std::int64_t>(out, m.rows());
  put<std::int64_t>(out, m.cols());
  for (double x : m.data()) put<double>(out, x);
}

DenseMatrix take_matrix(std::istream& in, const std::filesystem::path& path) {
  const auto r = take<std::int64_t>(in, path);
  const auto c = take<std::int64_t>(in, path);
  if (r < 0 || c < 0 || (r > 0 && c > (std::int64_t{1} << 40) / r)) {
    throw DataError("corrupt matrix header in checkpoint " + path.string());
  }
  DenseMatrix m(r, c);
  for (double& x : m.data()) x = take<double>(in, path);
  return m;
}

void put_stack(std::string& out, const FactorStack& s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.factors.size()));
  for (const auto& u : s.factors) put_matrix(out, u);
  if (!s.factors.empty()) put_matrix(out, s.representation);
}

FactorStack take_stack(std::istream& in, const std::filesystem::path& path) {
  FactorStack s;
  const auto depth = take<std::uint32_t>(in, path);
  if (depth > 1024) throw DataError("corrupt stack depth in checkpoint " + path.string());
  for (std::uint32_t i = 0; i < depth; ++i) s.factors.push_back(take_matrix(in, path));
  if (depth > 0) s.representation = take_matrix(in, path);
  return s;
}

}  // namespace

std::vector<Index> resolve_widths(std::span<const Index> requested, Index input_rows, Index n,
                                  Index r) {
  if (r < 1) throw ConfigError("number of communities must be >= 1");
  std::vector<Index> w(requested.begin(), requested.end());
  if (w.empty()) {
    w = {256, 64, r};
  } else if (w.back() != r) {
    throw ConfigError("layer widths must end at the number of communities (" +
                      std::to_string(r) + "), got " + std::to_string(w.back()));
  }
  const Index top = std::min(input_rows, n);
  if (r > top) {
    throw ConfigError("cannot factorize a " + shape_string(input_rows, n) + " matrix into " +
                      std::to_string(r) + " communities");
  }
  Index prev = top;
  for (Index& x : w) {
    x = std::clamp(x, r, prev);
    prev = x;
  }
  return w;
}

PretrainedFactors pretrain_views(const AttributedGraph& graph, const TrainOptions& options,
                                 std::uint64_t seed) {
  const Index n = graph.num_nodes();
  const Index r = graph.num_communities;
  NmfOptions nmf_options;
  nmf_options.max_iters = options.pretrain.iters;
  nmf_options.tol = options.pretrain.tol;

  PretrainedFactors out;
  const bool topo = options.views != ViewMode::kAttributesOnly;
  const bool attr = options.views != ViewMode::kTopologyOnly;
  if (topo) {
    const auto widths = resolve_widths(options.hyper.widths, n, n, r);
    nmf_options.seed = mix(seed, kTopoStream);
    out.topo = pretrain_stack(DataMatrix(graph.adjacency), widths, nmf_options);
  }
  if (attr) {
    const auto widths = resolve_widths(options.hyper.widths, graph.feature_dim(), n, r);
    nmf_options.seed = mix(seed, kAttrStream);
    out.attr = pretrain_stack(graph.features, widths, nmf_options);
  }
  return out;
}

TrainOutcome fine_tune(const AttributedGraph& graph, PretrainedFactors init,
                       const TrainOptions& options, std::uint64_t seed,
                       const EpochObserver& observer) {
  options.hyper.validate();
  options.optimizer.validate();
  if (graph.num_communities < 1) throw ConfigError("number of communities is unknown");

  TrainOutcome out;
  out.state = make_state(graph, std::move(init.topo), std::move(init.attr), options.hyper,
                         options.views);
  if (options.views != ViewMode::kBoth) out.state.hyper.gamma = 0.0;
  ModelState& state = out.state;
  out.head = ProjectionHead::for_communities(graph.num_communities, mix(seed, kHeadStream));

  std::optional<Index> cap = options.hyper.neg_cap;
  if (!cap && !options.full_negatives && graph.num_nodes() > options.auto_cap_nodes) {
    cap = options.auto_neg_cap;
  }

  const OptimizerConfig& opt = options.optimizer;
  double best = std::numeric_limits<double>::infinity();
  int stale = 0;
  for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
    const PseudoLabels labels = pseudo_labels(state.primary_representation(), epoch);
    const NegativeSets negs =
        debiased_negatives(labels, cap, mix(seed, kNegativeStream + static_cast<std::uint64_t>(epoch)));

    EpochRecord record;
    record.epoch = epoch;
    for (int step = 0; step < opt.steps_per_epoch; ++step) {
      LossBreakdown loss;
      GradientBundle grads;
      try {
        grads = gradients(state, out.head, negs, graph, &loss);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " at epoch " + std::to_string(epoch));
      }
      check_loss(loss, epoch);
      if (step == 0) record.loss = loss;
      sgd_step(state, out.head, grads, opt);
    }
    out.trace.push_back(record);
    out.epochs_run = epoch;
    if (observer) observer(record, labels, negs);

    if (record.loss.total < best * (1.0 - 1e-9)) {
      best = record.loss.total;
      stale = 0;
    } else if (opt.patience > 0 && ++stale >= opt.patience) {
      log_info("early stop at epoch " + std::to_string(epoch));
      break;
    }
  }

  if (options.clamp_output) {
    for (FactorStack* s : {&state.topo, &state.attr}) {
      if (s->empty()) continue;
      for (auto& u : s->factors) u.eigen() = u.eigen().cwiseMax(0.0);
      s->representation.eigen() = s->representation.eigen().cwiseMax(0.0);
    }
  }
  out.predicted = pseudo_labels(state.primary_representation(), out.epochs_run).labels;
  if (graph.labels) out.eval = evaluate(out.predicted, *graph.labels);
  return out;
}

TrainOutcome train(const AttributedGraph& graph, const TrainOptions& options,
                   std::uint64_t seed, const EpochObserver& observer) {
  return fine_tune(graph, pretrain_views(graph, options, seed), options, seed, observer);
}

void save_checkpoint(const std::filesystem::path& path, const PretrainedFactors& factors) {
  std::string bytes(kMagic, sizeof(kMagic));
  put<std::uint32_t>(bytes, 1);
  put_stack(bytes, factors.topo);
  put_stack(bytes, factors.attr);
  write_file_atomic(path, bytes);
}

PretrainedFactors load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError(path.string() + " is not a checkpoint");
  }
  if (take<std::uint32_t>(in, path) != 1) throw DataError("unsupported checkpoint version");
  PretrainedFactors f;
  f.topo = take_stack(in, path);
  f.attr = take_stack(in, path);
  return f;
}

}  // namespace cdnmf
