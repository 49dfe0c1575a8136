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

#include "cdnmf/commands.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cdnmf/errors.h"
#include "cdnmf/io.h"
#include "cdnmf/log.h"

namespace cdnmf {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// FNV-1a, stable across platforms, for checkpoint file names.
std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Everything pretraining depends on, so a cached checkpoint is only reused
// for an identical pretraining setup.
std::string checkpoint_name(const RunConfig& config, std::uint64_t seed) {
  const json doc = to_json(config);
  json key{{"dataset", doc["dataset"]},
           {"widths", doc["hyper"]["widths"]},
           {"pretrain", doc["pretrain"]},
           {"ablation", doc["ablation"]},
           {"seed", seed}};
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(key.dump())));
  return std::string("pretrain_") + buf + ".ck";
}

PretrainedFactors pretrained(const AttributedGraph& graph, const RunConfig& config,
                             const TrainOptions& options, std::uint64_t seed,
                             const CommandContext& ctx) {
  if (!ctx.checkpoint_dir) return pretrain_views(graph, options, seed);
  const fs::path path = *ctx.checkpoint_dir / checkpoint_name(config, seed);
  if (fs::exists(path)) {
    log_info("reusing checkpoint " + path.string());
    return load_checkpoint(path);
  }
  PretrainedFactors f = pretrain_views(graph, options, seed);
  fs::create_directories(*ctx.checkpoint_dir);
  save_checkpoint(path, f);
  return f;
}

json loss_json(const LossBreakdown& l) {
  return json{{"l_dnmf", l.dnmf}, {"l_reg", l.reg}, {"l_cl", l.cl}, {"total", l.total}};
}

json eval_json(const EvalReport& e) {
  return json{{"acc", e.acc},
              {"nmi", e.nmi},
              {"matched_permutation", e.matched_permutation},
              {"confusion", e.confusion},
              {"nmi_normalization", e.nmi_normalization}};
}

std::string format_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string mean_std(const std::optional<Summary>& s) {
  if (!s) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f ± %.4f", s->mean, s->std);
  return buf;
}

void write_json(const fs::path& path, const json& doc) {
  write_file_atomic(path, doc.dump(2) + "\n");
}

}  // namespace

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

json to_json(const RunResult& result, bool include_timing) {
  json runs = json::array();
  for (const SeedRun& r : result.runs) {
    json trace = json::array();
    for (const EpochRecord& e : r.trace) {
      json row = loss_json(e.loss);
      row["epoch"] = e.epoch;
      trace.push_back(row);
    }
    json run{{"seed", r.seed}, {"epochs_run", r.epochs_run}, {"trace", trace}};
    run["eval"] = r.eval ? eval_json(*r.eval) : json(nullptr);
    if (include_timing) run["wall_seconds"] = r.wall_seconds;
    runs.push_back(run);
  }
  json doc{{"config", to_json(result.config)}, {"runs", runs}};
  auto summary = [](const std::optional<Summary>& s) {
    return s ? json{{"mean", s->mean}, {"std", s->std}} : json(nullptr);
  };
  doc["acc"] = summary(result.acc);
  doc["nmi"] = summary(result.nmi);
  if (include_timing) doc["wall_seconds"] = result.wall_seconds;
  return doc;
}

std::string assignments_csv(const std::vector<std::string>& node_ids,
                            const std::vector<int>& predicted) {
  if (node_ids.size() != predicted.size()) {
    throw ShapeError("have " + std::to_string(node_ids.size()) + " node ids but " +
                     std::to_string(predicted.size()) + " predictions");
  }
  std::string out = "node_id,predicted_community\n";
  for (std::size_t i = 0; i < node_ids.size(); ++i) {
    out += node_ids[i] + "," + std::to_string(predicted[i]) + "\n";
  }
  return out;
}

RunResult cmd_train(const RunConfig& config, const CommandContext& ctx) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const AttributedGraph graph = load_dataset(config.dataset, ctx.data_root);
  const TrainOptions options = train_options(config);

  RunResult result;
  result.config = config;
  result.node_ids = graph.node_ids;
  std::vector<double> accs, nmis;
  for (std::uint64_t seed : config.seeds) {
    const auto seed_start = std::chrono::steady_clock::now();
    PretrainedFactors init = pretrained(graph, config, options, seed, ctx);
    TrainOutcome out = fine_tune(graph, std::move(init), options, seed);
    SeedRun run;
    run.seed = seed;
    run.eval = out.eval;
    run.trace = std::move(out.trace);
    run.predicted = std::move(out.predicted);
    run.epochs_run = out.epochs_run;
    run.wall_seconds = seconds_since(seed_start);
    if (run.eval) {
      accs.push_back(run.eval->acc);
      nmis.push_back(run.eval->nmi);
      log_info("seed " + std::to_string(seed) + ": acc " + format_double(run.eval->acc) +
               " nmi " + format_double(run.eval->nmi));
    }
    result.runs.push_back(std::move(run));
  }
  if (!accs.empty()) {
    result.acc = summarize(accs);
    result.nmi = summarize(nmis);
  }
  result.wall_seconds = seconds_since(start);

  if (ctx.write_outputs) {
    fs::create_directories(config.output_dir);
    write_json(config.output_dir / "result.json", to_json(result));
    for (const SeedRun& r : result.runs) {
      write_file_atomic(config.output_dir / ("assignments_seed" + std::to_string(r.seed) + ".csv"),
                        assignments_csv(result.node_ids, r.predicted));
    }
    write_file_atomic(config.output_dir / "assignments.csv",
                      assignments_csv(result.node_ids, result.runs.front().predicted));
  }
  return result;
}

std::vector<RunResult> cmd_ablate(const RunConfig& config, const CommandContext& ctx) {
  std::vector<RunResult> results;
  for (Ablation a : {Ablation::kNone, Ablation::kTopologyOnly, Ablation::kAttributesOnly}) {
    RunConfig c = config;
    c.ablation = a;
    c.output_dir = config.output_dir / (a == Ablation::kNone ? std::string("full") : to_string(a));
    results.push_back(cmd_train(c, ctx));
  }
  if (ctx.write_outputs) {
    std::string table = "| variant | ACC | NMI |\n|---|---|---|\n";
    const char* names[] = {"full", "topo-only (no contrastive, A)",
                           "attr-only (no contrastive, X)"};
    for (std::size_t k = 0; k < results.size(); ++k) {
      table += std::string("| ") + names[k] + " | " + mean_std(results[k].acc) + " | " +
               mean_std(results[k].nmi) + " |\n";
    }
    fs::create_directories(config.output_dir);
    write_file_atomic(config.output_dir / "ablation.md", table);
  }
  return results;
}

std::string benchmark_markdown(const std::vector<BenchmarkRow>& rows) {
  std::string out = "| config | seeds | ACC | NMI | status |\n|---|---|---|---|---|\n";
  for (const BenchmarkRow& r : rows) {
    if (r.result) {
      out += "| " + r.label + " | " + std::to_string(r.result->runs.size()) + " | " +
             mean_std(r.result->acc) + " | " + mean_std(r.result->nmi) + " | ok |\n";
    } else {
      out += "| " + r.label + " | 0 | n/a | n/a | failed: " + r.error + " |\n";
    }
  }
  return out;
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
  std::string out = "config,seeds,acc_mean,acc_std,nmi_mean,nmi_std,error\n";
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  for (const BenchmarkRow& r : rows) {
    out += field(r.label) + ",";
    if (r.result && r.result->acc) {
      out += std::to_string(r.result->runs.size()) + "," + format_double(r.result->acc->mean) +
             "," + format_double(r.result->acc->std) + "," + format_double(r.result->nmi->mean) +
             "," + format_double(r.result->nmi->std) + ",\n";
    } else if (r.result) {
      out += std::to_string(r.result->runs.size()) + ",,,,,\n";
    } else {
      out += "0,,,,," + field(r.error) + "\n";
    }
  }
  return out;
}

std::vector<BenchmarkRow> cmd_benchmark(const std::vector<RunConfig>& configs,
                                        const std::vector<std::string>& labels,
                                        const fs::path& out_dir, const CommandContext& ctx) {
  if (labels.size() != configs.size()) {
    throw ConfigError("benchmark needs one label per config");
  }
  std::vector<BenchmarkRow> rows;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    BenchmarkRow row;
    row.label = labels[k];
    try {
      RunConfig c = configs[k];
      c.output_dir = out_dir / ("run" + std::to_string(k));
      row.result = cmd_train(c, ctx);
    } catch (const Error& e) {
      log_warning("benchmark config '" + labels[k] + "' failed: " + e.what());
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  if (ctx.write_outputs) {
    fs::create_directories(out_dir);
    write_file_atomic(out_dir / "benchmark.md", benchmark_markdown(rows));
    write_file_atomic(out_dir / "benchmark.csv", benchmark_csv(rows));
  }
  return rows;
}

std::string trace_csv(const std::vector<EpochRecord>& trace) {
  std::string out = "epoch,l_dnmf,l_reg,l_cl,total\n";
  for (const EpochRecord& e : trace) {
    out += std::to_string(e.epoch) + "," + format_double(e.loss.dnmf) + "," +
           format_double(e.loss.reg) + "," + format_double(e.loss.cl) + "," +
           format_double(e.loss.total) + "\n";
  }
  return out;
}

RunResult cmd_trace(const RunConfig& config, const CommandContext& ctx) {
  RunConfig c = config;
  c.seeds = {config.seeds.front()};
  RunResult result = cmd_train(c, ctx);
  if (ctx.write_outputs) {
    write_file_atomic(c.output_dir / "trace.csv", trace_csv(result.runs.front().trace));
  }
  return result;
}

EvalReport cmd_eval(const fs::path& assignments, const fs::path& labels) {
  std::ifstream pred_in(assignments);
  if (!pred_in) throw DataError("cannot open " + assignments.string());
  std::ifstream truth_in(labels);
  if (!truth_in) throw DataError("cannot open " + labels.string());

  std::vector<std::string> order;
  std::map<std::string, int> predicted;
  std::string line;
  int line_no = 0;
  while (std::getline(pred_in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (line_no == 1 && line == "node_id,predicted_community")) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) {
      throw ParseError(assignments.string(), line_no, "expected node_id,predicted_community");
    }
    const std::string id = line.substr(0, comma);
    int c = 0;
    const char* first = line.data() + comma + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, c);
    if (ec != std::errc() || ptr != last || c < 0) {
      throw ParseError(assignments.string(), line_no, "bad community '" + line.substr(comma + 1) + "'");
    }
    if (!predicted.emplace(id, c).second) {
      throw DuplicateError(assignments.string() + ": node '" + id + "' listed twice");
    }
    order.push_back(id);
  }

  std::map<std::string, std::string> truth_names;
  std::set<std::string> names;
  line_no = 0;
  while (std::getline(truth_in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string id, name, extra;
    if (!(fields >> id >> name) || (fields >> extra)) {
      throw ParseError(labels.string(), line_no, "expected node_id<TAB>label");
    }
    truth_names[id] = name;
    names.insert(name);
  }
  std::map<std::string, int> name_index;
  for (const std::string& n : names) name_index.emplace(n, static_cast<int>(name_index.size()));

  std::vector<int> pred, truth;
  for (const std::string& id : order) {
    auto it = truth_names.find(id);
    if (it == truth_names.end()) {
      throw ReferenceError("node '" + id + "' has no label in " + labels.string());
    }
    pred.push_back(predicted[id]);
    truth.push_back(name_index[it->second]);
  }
  if (pred.empty()) throw DataError(assignments.string() + " has no assignments");
  return evaluate(pred, truth);
}

}  // namespace cdnmf
