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

// Command-line front end: train, ablate, benchmark, trace, gen-sbm, eval.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cdnmf/commands.h"
#include "cdnmf/config.h"
#include "cdnmf/datasets.h"
#include "cdnmf/errors.h"
#include "cdnmf/log.h"

namespace {

namespace fs = std::filesystem;
using namespace cdnmf;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

// Flags shared by the commands that train.
struct RunFlags {
  std::vector<std::string> configs;
  std::optional<std::uint64_t> seed;
  std::optional<int> seeds;
  std::optional<std::string> out;
  bool clamp_output = false;
  std::optional<std::string> neg_cap;
  std::optional<std::string> data_root;
  std::optional<std::string> checkpoint_dir;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool many_configs) {
  if (many_configs) {
    cmd->add_option("--config", f.configs, "JSON run config (repeatable)")->required();
  } else {
    cmd->add_option("--config", f.configs, "JSON run config")->required()->expected(1);
  }
  cmd->add_option("--seed", f.seed, "Run a single seed instead of the configured list");
  cmd->add_option("--seeds", f.seeds, "Run seeds 0..N-1")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output directory (overrides output_dir)");
  cmd->add_flag("--clamp-output", f.clamp_output,
                "Project the final factors onto the nonnegative orthant");
  cmd->add_option("--neg-cap", f.neg_cap, "Cap on negatives per node, or 'full'");
  cmd->add_option("--data-root", f.data_root,
                  "Directory holding builtin datasets (default: $CDNMF_DATA_ROOT)");
  cmd->add_option("--checkpoint-dir", f.checkpoint_dir,
                  "Cache pretrained factors here and reuse them");
}

RunConfig apply_flags(RunConfig c, const RunFlags& f) {
  if (f.seed && f.seeds) throw ConfigError("--seed and --seeds are mutually exclusive");
  if (f.seed) c.seeds = {*f.seed};
  if (f.seeds) {
    c.seeds.clear();
    for (int s = 0; s < *f.seeds; ++s) c.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (f.out) c.output_dir = *f.out;
  if (f.clamp_output) c.clamp_output = true;
  if (f.neg_cap) {
    if (*f.neg_cap == "full") {
      c.full_negatives = true;
      c.hyper.neg_cap.reset();
    } else {
      try {
        std::size_t used = 0;
        const long long v = std::stoll(*f.neg_cap, &used);
        if (used != f.neg_cap->size() || v < 1) throw std::invalid_argument("");
        c.hyper.neg_cap = static_cast<Index>(v);
        c.full_negatives = false;
      } catch (const std::logic_error&) {
        throw ConfigError("--neg-cap must be a positive integer or 'full'");
      }
    }
  }
  c.validate();
  return c;
}

CommandContext context(const RunFlags& f) {
  CommandContext ctx;
  if (f.data_root) {
    ctx.data_root = *f.data_root;
  } else if (const char* env = std::getenv("CDNMF_DATA_ROOT"); env && *env) {
    ctx.data_root = fs::path(env);
  }
  if (f.checkpoint_dir) ctx.checkpoint_dir = *f.checkpoint_dir;
  return ctx;
}

void print_summary(const std::string& label, const RunResult& r) {
  std::printf("%s: %zu seed(s)", label.c_str(), r.runs.size());
  if (r.acc) {
    std::printf(", ACC %.4f ± %.4f, NMI %.4f ± %.4f", r.acc->mean, r.acc->std, r.nmi->mean,
                r.nmi->std);
  }
  std::printf(" -> %s\n", r.config.output_dir.string().c_str());
}

std::vector<Index> parse_blocks(const std::string& s) {
  std::vector<Index> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = std::min(s.find(',', start), s.size());
    const std::string part = s.substr(start, comma - start);
    try {
      std::size_t used = 0;
      const long long v = std::stoll(part, &used);
      if (used != part.size()) throw std::invalid_argument("");
      out.push_back(static_cast<Index>(v));
    } catch (const std::logic_error&) {
      throw ConfigError("--blocks must be a comma-separated list of sizes, got '" + s + "'");
    }
    start = comma + 1;
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Contrastive deep NMF community detection"};
  app.require_subcommand(1);
  std::string log_level = "warning";
  app.add_option("--log-level", log_level, "quiet, warning or info")
      ->check(CLI::IsMember({"quiet", "warning", "info"}));

  RunFlags train_flags, ablate_flags, trace_flags, bench_flags;
  CLI::App* train = app.add_subcommand("train", "Pretrain, fine-tune and evaluate");
  add_run_flags(train, train_flags, false);
  CLI::App* ablate = app.add_subcommand("ablate", "Full model vs. single-view ablations");
  add_run_flags(ablate, ablate_flags, false);
  CLI::App* trace = app.add_subcommand("trace", "Write the per-epoch loss trace as CSV");
  add_run_flags(trace, trace_flags, false);
  CLI::App* bench = app.add_subcommand("benchmark", "Run several configs into one table");
  add_run_flags(bench, bench_flags, true);

  CLI::App* gen = app.add_subcommand("gen-sbm", "Write a planted-partition dataset");
  std::string blocks = "50,50";
  SbmSpec spec;
  std::string gen_out;
  gen->add_option("--blocks", blocks, "Comma-separated block sizes")->capture_default_str();
  gen->add_option("--p-in", spec.p_in, "Edge probability within a block")->capture_default_str();
  gen->add_option("--p-out", spec.p_out, "Edge probability across blocks")->capture_default_str();
  gen->add_option("--feature-dim", spec.feature_dim, "Indicator width per block")
      ->capture_default_str();
  gen->add_option("--noise", spec.feature_noise, "Uniform feature noise amplitude")
      ->capture_default_str();
  gen->add_option("--seed", spec.seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->required();

  CLI::App* eval = app.add_subcommand("eval", "Score an assignments file against labels");
  std::string assignments, labels;
  eval->add_option("--assignments", assignments, "CSV node_id,predicted_community")->required();
  eval->add_option("--labels", labels, "node_id<TAB>label file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  set_log_level(log_level == "quiet" ? LogLevel::kQuiet
                : log_level == "info" ? LogLevel::kInfo
                                      : LogLevel::kWarning);

  if (*train) {
    const RunConfig c = apply_flags(load_run_config(train_flags.configs.front()), train_flags);
    print_summary("train", cmd_train(c, context(train_flags)));
  } else if (*ablate) {
    const RunConfig c = apply_flags(load_run_config(ablate_flags.configs.front()), ablate_flags);
    const auto results = cmd_ablate(c, context(ablate_flags));
    const char* names[] = {"full", "topo-only", "attr-only"};
    for (std::size_t k = 0; k < results.size(); ++k) print_summary(names[k], results[k]);
  } else if (*trace) {
    const RunConfig c = apply_flags(load_run_config(trace_flags.configs.front()), trace_flags);
    const RunResult r = cmd_trace(c, context(trace_flags));
    std::fputs(trace_csv(r.runs.front().trace).c_str(), stdout);
  } else if (*bench) {
    std::vector<RunConfig> configs;
    std::vector<std::string> names;
    for (const std::string& path : bench_flags.configs) {
      RunFlags per_config = bench_flags;
      per_config.out.reset();
      configs.push_back(apply_flags(load_run_config(path), per_config));
      names.push_back(fs::path(path).stem().string());
    }
    const fs::path out = bench_flags.out ? fs::path(*bench_flags.out) : fs::path("benchmark");
    const auto rows = cmd_benchmark(configs, names, out, context(bench_flags));
    std::fputs(benchmark_markdown(rows).c_str(), stdout);
    for (const BenchmarkRow& r : rows) {
      if (!r.result) return kExitData;
    }
  } else if (*gen) {
    spec.block_sizes = parse_blocks(blocks);
    try {
      spec.validate();
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    save_graph(generate_sbm(spec), gen_out);
    std::printf("wrote %s\n", gen_out.c_str());
  } else if (*eval) {
    const EvalReport r = cmd_eval(assignments, labels);
    std::printf("{\"acc\": %.17g, \"nmi\": %.17g, \"nmi_normalization\": \"%s\"}\n", r.acc,
                r.nmi, r.nmi_normalization.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const cdnmf::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kExitNumeric;
  } catch (const cdnmf::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const cdnmf::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const cdnmf::Error& e) {
    // Shape and domain errors at this level come from malformed inputs.
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
}
