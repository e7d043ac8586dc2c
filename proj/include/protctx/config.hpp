#pragma once

#include "protctx/align.hpp"
#include "protctx/backend.hpp"
#include "protctx/contextbuild.hpp"
#include "protctx/dataset.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace protctx {

struct RunPaths {
  std::optional<std::filesystem::path> fasta;
  std::optional<std::filesystem::path> annotation_db;
  std::optional<std::filesystem::path> go_tsv;
  std::optional<std::filesystem::path> blast_dir;
  std::optional<std::filesystem::path> interproscan_dir;
  std::optional<std::filesystem::path> protrek_dir;
  std::optional<std::filesystem::path> dataset;
  std::optional<std::filesystem::path> train_fasta;
  std::optional<std::filesystem::path> train_clusters;
  std::optional<std::filesystem::path> cache_dir;
  std::filesystem::path out_dir = "out";
};

struct DatasetOptions {
  bool hardness = false;
  double cluster_threshold = 0.5;
  double theta = 0.30;
  HardnessTarget target = HardnessTarget::Representatives;
  std::optional<TimeSplitOptions> time_split;
};

/// Everything a subcommand needs. Loaded from a JSON document; relative
/// paths resolve against the config file's directory.
struct RunConfig {
  RunPaths paths;
  PromptMode mode = PromptMode::ContextOnly;
  ContextPolicy policy;
  BackendConfig answer_backend;
  BackendConfig judge_backend;
  AlignmentParams alignment;
  DatasetOptions dataset;
  std::optional<double> max_identity_cap;
  int workers = 1;
  std::uint64_t seed = 0;

  static RunConfig from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
  static RunConfig load(const std::filesystem::path& file);

  /// Checks value ranges and that every configured input path exists.
  /// Throws ConfigError.
  void validate() const;
};

}  // namespace protctx
