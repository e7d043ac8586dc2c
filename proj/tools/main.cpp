// protctx: build evidence contexts, run the LLM benchmark and score
// EC / clustering outputs.

#include "protctx/config.hpp"
#include "protctx/pipeline.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <optional>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out_dir;
  std::optional<std::string> cache_dir;
  std::optional<std::string> mode;
  std::optional<std::string> protrek_mode;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
};

void add_config_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "JSON run configuration")->required()->check(
      CLI::ExistingFile);
  cmd->add_option("--out-dir", o.out_dir, "output directory");
  cmd->add_option("--cache-dir", o.cache_dir, "cache directory");
  cmd->add_option("--mode", o.mode, "context_only | sequence_only | sequence_and_context");
  cmd->add_option("--protrek", o.protrek_mode, "conditional | always | never");
  cmd->add_option("--workers", o.workers, "worker threads");
  cmd->add_option("--seed", o.seed, "random seed");
}

protctx::RunConfig load_config(const Overrides& o) {
  auto cfg = protctx::RunConfig::load(o.config);
  try {
    if (o.out_dir) cfg.paths.out_dir = *o.out_dir;
    if (o.cache_dir) cfg.paths.cache_dir = fs::path(*o.cache_dir);
    if (o.mode) cfg.mode = protctx::parse_prompt_mode(*o.mode);
    if (o.protrek_mode) cfg.policy.protrek_mode = protctx::parse_protrek_mode(*o.protrek_mode);
  } catch (const std::invalid_argument& e) {
    throw protctx::ConfigError(e.what());
  }
  if (o.workers) cfg.workers = *o.workers;
  if (o.seed) cfg.seed = *o.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("protctx"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Protein context construction and evaluation"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");

  Overrides ctx_opts, bench_opts, ds_opts;
  auto* context = app.add_subcommand("context", "build a context file per FASTA record");
  add_config_flags(context, ctx_opts);
  auto* bench = app.add_subcommand("bench", "answer and judge every dataset item");
  add_config_flags(bench, bench_opts);
  auto* dataset = app.add_subcommand("dataset", "derive benchmark items from annotations");
  add_config_flags(dataset, ds_opts);

  std::string pred, gold, ec_out = "out";
  auto* ec = app.add_subcommand("ec-eval", "hierarchical EC precision/recall/F1");
  ec->add_option("--pred", pred, "predicted EC table")->required()->check(CLI::ExistingFile);
  ec->add_option("--gold", gold, "reference EC table")->required()->check(CLI::ExistingFile);
  ec->add_option("--out-dir", ec_out, "output directory");

  std::string emb, truth, metric = "cosine", cl_out = "out";
  auto* cl = app.add_subcommand("cluster-eval", "agglomerative clustering ARI");
  cl->add_option("--embeddings", emb, "embedding table")->required()->check(CLI::ExistingFile);
  cl->add_option("--truth", truth, "reference labels")->required()->check(CLI::ExistingFile);
  cl->add_option("--metric", metric, "cosine | euclidean");
  cl->add_option("--out-dir", cl_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : protctx::kExitAbort;
  }
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    if (*context) return protctx::cmd_context(load_config(ctx_opts));
    if (*bench) return protctx::cmd_bench(load_config(bench_opts));
    if (*dataset) return protctx::cmd_dataset(load_config(ds_opts));
    if (*ec) return protctx::cmd_ec_eval(pred, gold, ec_out);
    if (*cl) {
      return protctx::cmd_cluster_eval(emb, truth, protctx::parse_metric(metric), cl_out);
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return protctx::kExitAbort;
  }
  return protctx::kExitAbort;
}
