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

#include "cdnmf/config.h"

#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include "cdnmf/errors.h"

namespace cdnmf {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  require_object(j, where);
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double get_real(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  return v.get<double>();
}

std::int64_t get_int(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
  return v.get<std::int64_t>();
}

int get_small_int(const json& j, const std::string& key, const std::string& where) {
  const std::int64_t v = get_int(j, key, where);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(where + "." + key + " is out of range");
  }
  return static_cast<int>(v);
}

bool get_bool(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError(where + "." + key + " must be true or false");
  return v.get<bool>();
}

std::string get_string(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
  return v.get<std::string>();
}

fs::path resolve(const fs::path& p, const fs::path& base) {
  return p.is_relative() && !base.empty() ? base / p : p;
}

SbmSpec parse_sbm(const json& j) {
  const std::string where = "dataset.sbm";
  check_keys(j, {"block_sizes", "p_in", "p_out", "feature_dim", "feature_noise", "seed"}, where);
  SbmSpec s;
  if (!j.contains("block_sizes") || !j["block_sizes"].is_array()) {
    throw ConfigError(where + ".block_sizes must be a list of sizes");
  }
  for (const json& b : j["block_sizes"]) {
    if (!b.is_number_integer()) throw ConfigError(where + ".block_sizes must hold integers");
    s.block_sizes.push_back(b.get<Index>());
  }
  if (j.contains("p_in")) s.p_in = get_real(j, "p_in", where);
  if (j.contains("p_out")) s.p_out = get_real(j, "p_out", where);
  if (j.contains("feature_dim")) s.feature_dim = get_int(j, "feature_dim", where);
  if (j.contains("feature_noise")) s.feature_noise = get_real(j, "feature_noise", where);
  if (j.contains("seed")) {
    const std::int64_t seed = get_int(j, "seed", where);
    if (seed < 0) throw ConfigError(where + ".seed must be nonnegative");
    s.seed = static_cast<std::uint64_t>(seed);
  }
  try {
    s.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return s;
}

DatasetConfig parse_dataset(const json& j, const fs::path& base) {
  const std::string where = "dataset";
  check_keys(j, {"name", "edges", "features", "labels", "sbm", "communities", "normalize",
                 "binarize"},
             where);
  DatasetConfig d;
  if (j.contains("name")) d.name = get_string(j, "name", where);
  if (j.contains("edges")) d.edges = resolve(get_string(j, "edges", where), base);
  if (j.contains("features")) d.features = resolve(get_string(j, "features", where), base);
  if (j.contains("labels")) d.labels = resolve(get_string(j, "labels", where), base);
  if (j.contains("sbm")) d.sbm = parse_sbm(j["sbm"]);
  if (j.contains("communities")) d.communities = get_small_int(j, "communities", where);
  if (j.contains("normalize")) d.normalize = get_bool(j, "normalize", where);
  if (j.contains("binarize")) d.binarize = get_bool(j, "binarize", where);
  return d;
}

void parse_hyper(const json& j, RunConfig& c) {
  const std::string where = "hyper";
  check_keys(j, {"alpha", "beta", "gamma", "tau", "widths", "neg_cap"}, where);
  HyperParams& h = c.hyper;
  if (j.contains("alpha")) h.alpha = get_real(j, "alpha", where);
  if (j.contains("beta")) h.beta = get_real(j, "beta", where);
  if (j.contains("gamma")) h.gamma = get_real(j, "gamma", where);
  if (j.contains("tau")) h.tau = get_real(j, "tau", where);
  if (j.contains("widths")) {
    if (!j["widths"].is_array()) throw ConfigError("hyper.widths must be a list");
    for (const json& w : j["widths"]) {
      if (!w.is_number_integer()) throw ConfigError("hyper.widths must hold integers");
      h.widths.push_back(w.get<Index>());
    }
  }
  if (j.contains("neg_cap")) {
    const json& v = j["neg_cap"];
    if (v.is_string() && v.get<std::string>() == "full") {
      c.full_negatives = true;
    } else if (v.is_number_integer()) {
      h.neg_cap = v.get<Index>();
    } else if (!v.is_null()) {
      throw ConfigError("hyper.neg_cap must be a positive integer, \"full\" or null");
    }
  }
}

void parse_optimizer(const json& j, OptimizerConfig& o) {
  const std::string where = "optimizer";
  check_keys(j, {"lr", "epochs", "grad_clip", "mode", "patience", "steps_per_epoch"}, where);
  if (j.contains("lr")) o.lr = get_real(j, "lr", where);
  if (j.contains("epochs")) o.epochs = get_small_int(j, "epochs", where);
  if (j.contains("grad_clip")) {
    if (j["grad_clip"].is_null()) {
      o.grad_clip.reset();
    } else {
      o.grad_clip = get_real(j, "grad_clip", where);
    }
  }
  if (j.contains("mode") && get_string(j, "mode", where) != "full-batch") {
    throw ConfigError("optimizer.mode must be \"full-batch\"");
  }
  if (j.contains("patience")) o.patience = get_small_int(j, "patience", where);
  if (j.contains("steps_per_epoch")) {
    o.steps_per_epoch = get_small_int(j, "steps_per_epoch", where);
  }
}

void parse_pretrain(const json& j, PretrainConfig& p) {
  const std::string where = "pretrain";
  check_keys(j, {"iters", "tol"}, where);
  if (j.contains("iters")) p.iters = get_small_int(j, "iters", where);
  if (j.contains("tol")) p.tol = get_real(j, "tol", where);
}

json sbm_json(const SbmSpec& s) {
  return json{{"block_sizes", s.block_sizes}, {"p_in", s.p_in},
              {"p_out", s.p_out},             {"feature_dim", s.feature_dim},
              {"feature_noise", s.feature_noise}, {"seed", s.seed}};
}

}  // namespace

std::string to_string(Ablation a) {
  switch (a) {
    case Ablation::kNone:
      return "none";
    case Ablation::kTopologyOnly:
      return "topo-only";
    case Ablation::kAttributesOnly:
      return "attr-only";
  }
  return "none";
}

Ablation parse_ablation(const std::string& s) {
  if (s == "none") return Ablation::kNone;
  if (s == "topo-only") return Ablation::kTopologyOnly;
  if (s == "attr-only") return Ablation::kAttributesOnly;
  throw ConfigError("ablation must be one of none, topo-only, attr-only; got '" + s + "'");
}

ViewMode view_mode(Ablation a) {
  switch (a) {
    case Ablation::kTopologyOnly:
      return ViewMode::kTopologyOnly;
    case Ablation::kAttributesOnly:
      return ViewMode::kAttributesOnly;
    case Ablation::kNone:
      break;
  }
  return ViewMode::kBoth;
}

void RunConfig::validate() const {
  const DatasetConfig& d = dataset;
  const int sources = static_cast<int>(!d.name.empty()) +
                      static_cast<int>(!d.edges.empty() || !d.features.empty()) +
                      static_cast<int>(d.sbm.has_value());
  if (sources != 1) {
    throw ConfigError("dataset needs exactly one of: name, edges+features, sbm");
  }
  if (!d.edges.empty() && d.features.empty()) throw ConfigError("dataset.features is missing");
  if (d.edges.empty() && !d.features.empty()) throw ConfigError("dataset.edges is missing");
  if (d.labels && d.edges.empty()) {
    throw ConfigError("dataset.labels only applies to edges+features datasets");
  }
  if (d.communities && *d.communities < 1) throw ConfigError("dataset.communities must be >= 1");
  hyper.validate();
  if (hyper.neg_cap && *hyper.neg_cap < 1) throw ConfigError("hyper.neg_cap must be >= 1");
  optimizer.validate();
  if (pretrain.iters < 0) throw ConfigError("pretrain.iters must be >= 0");
  if (!(pretrain.tol >= 0.0)) throw ConfigError("pretrain.tol must be >= 0");
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

RunConfig parse_run_config(const json& doc, const fs::path& base_dir) {
  check_keys(doc, {"dataset", "hyper", "optimizer", "pretrain", "output_dir", "seeds",
                   "ablation", "clamp_output"},
             "config");
  RunConfig c;
  if (!doc.contains("dataset")) throw ConfigError("config.dataset is missing");
  c.dataset = parse_dataset(doc["dataset"], base_dir);
  if (doc.contains("hyper")) parse_hyper(doc["hyper"], c);
  if (doc.contains("optimizer")) parse_optimizer(doc["optimizer"], c.optimizer);
  if (doc.contains("pretrain")) parse_pretrain(doc["pretrain"], c.pretrain);
  if (doc.contains("output_dir")) {
    c.output_dir = resolve(get_string(doc, "output_dir", "config"), base_dir);
  }
  if (doc.contains("seeds")) {
    if (!doc["seeds"].is_array()) throw ConfigError("config.seeds must be a list");
    c.seeds.clear();
    for (const json& s : doc["seeds"]) {
      if (!s.is_number_integer() || s.get<std::int64_t>() < 0) {
        throw ConfigError("config.seeds must hold nonnegative integers");
      }
      c.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  if (doc.contains("ablation")) c.ablation = parse_ablation(get_string(doc, "ablation", "config"));
  if (doc.contains("clamp_output")) c.clamp_output = get_bool(doc, "clamp_output", "config");
  c.validate();
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return parse_run_config(doc, path.parent_path());
}

json to_json(const RunConfig& c) {
  json dataset = json::object();
  const DatasetConfig& d = c.dataset;
  if (!d.name.empty()) dataset["name"] = d.name;
  if (!d.edges.empty()) dataset["edges"] = d.edges.string();
  if (!d.features.empty()) dataset["features"] = d.features.string();
  if (d.labels) dataset["labels"] = d.labels->string();
  if (d.sbm) dataset["sbm"] = sbm_json(*d.sbm);
  if (d.communities) dataset["communities"] = *d.communities;
  dataset["normalize"] = d.normalize;
  dataset["binarize"] = d.binarize;

  json hyper{{"alpha", c.hyper.alpha}, {"beta", c.hyper.beta}, {"gamma", c.hyper.gamma},
             {"tau", c.hyper.tau},     {"widths", c.hyper.widths}};
  if (c.full_negatives) {
    hyper["neg_cap"] = "full";
  } else if (c.hyper.neg_cap) {
    hyper["neg_cap"] = *c.hyper.neg_cap;
  } else {
    hyper["neg_cap"] = nullptr;
  }

  json optimizer{{"lr", c.optimizer.lr},
                 {"epochs", c.optimizer.epochs},
                 {"mode", "full-batch"},
                 {"patience", c.optimizer.patience},
                 {"steps_per_epoch", c.optimizer.steps_per_epoch}};
  optimizer["grad_clip"] = c.optimizer.grad_clip ? json(*c.optimizer.grad_clip) : json(nullptr);

  return json{{"dataset", dataset},
              {"hyper", hyper},
              {"optimizer", optimizer},
              {"pretrain", {{"iters", c.pretrain.iters}, {"tol", c.pretrain.tol}}},
              {"output_dir", c.output_dir.string()},
              {"seeds", c.seeds},
              {"ablation", to_string(c.ablation)},
              {"clamp_output", c.clamp_output}};
}

TrainOptions train_options(const RunConfig& c) {
  TrainOptions o;
  o.hyper = c.hyper;
  o.optimizer = c.optimizer;
  o.pretrain = c.pretrain;
  o.views = view_mode(c.ablation);
  if (o.views != ViewMode::kBoth) o.hyper.gamma = 0.0;
  o.full_negatives = c.full_negatives;
  o.clamp_output = c.clamp_output;
  return o;
}

AttributedGraph load_dataset(const DatasetConfig& d, const std::optional<fs::path>& data_root) {
  LoadOptions lo;
  lo.normalize_features = d.normalize;
  lo.binarize_features = d.binarize;
  AttributedGraph g;
  if (d.sbm) {
    g = generate_sbm(*d.sbm);
  } else if (!d.name.empty()) {
    if (!data_root) {
      throw DataError("builtin dataset '" + d.name +
                      "' needs a data root (--data-root or CDNMF_DATA_ROOT)");
    }
    g = load_builtin(d.name, *data_root, lo);
  } else {
    g = load_graph(d.edges, d.features, d.labels, lo);
  }
  if (d.communities) g.num_communities = *d.communities;
  if (g.num_communities < 1) {
    throw ConfigError("dataset has no labels; set dataset.communities");
  }
  return g;
}

}  // namespace cdnmf
