#pragma once

#include "protctx/backend.hpp"
#include "protctx/cache.hpp"
#include "protctx/config.hpp"
#include "protctx/contextbuild.hpp"
#include "protctx/evidence.hpp"
#include "protctx/llmjudge.hpp"
#include "protctx/metrics.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace protctx {

/// Exit codes shared by every subcommand.
inline constexpr int kExitClean = 0;
inline constexpr int kExitAbort = 1;
inline constexpr int kExitItemFailures = 2;

struct BuiltContext {
  Context context;
  std::vector<std::string> provenance;
  bool cache_hit = false;
};

/// Builds contexts from per-accession evidence files:
///   blast_dir/<accession>.tsv, interproscan_dir/<accession>.tsv,
///   protrek_dir/<accession>.jsonl.
/// A missing file (or an unset directory) is empty evidence.
class ContextBuilder {
 public:
  /// Loads the FASTA, annotation database and GO table named in `config`.
  /// The FASTA is required.
  explicit ContextBuilder(const RunConfig& config);

  /// nullopt when the accession has no sequence record. Throws ParseError
  /// on a malformed evidence file. Safe to call from several threads.
  std::optional<BuiltContext> build(const std::string& accession,
                                    const ContextPolicy& policy) const;

  const ProteinRecord* record(std::string_view accession) const;
  const std::vector<ProteinRecord>& records() const noexcept { return records_; }
  AnnotationDB& annotations() noexcept { return db_; }

  /// Cache input bytes for one accession; exposed for tests.
  std::string cache_input(const std::string& accession, const ContextPolicy& policy) const;

 private:
  struct EvidenceText {
    std::string blast;
    std::string interproscan;
    std::string protrek;
  };
  EvidenceText read_evidence(const std::string& accession) const;

  RunPaths paths_;
  std::optional<double> cap_;
  std::vector<ProteinRecord> records_;
  std::unordered_map<std::string, std::size_t> by_accession_;
  AnnotationDB db_;
  GoStore go_;
  std::string inputs_digest_;
  mutable std::optional<ContentCache> cache_;
};

std::string context_to_json(const BuiltContext& built);
BuiltContext context_from_json(std::string_view text);

/// Benchmark evidence backed by a ContextBuilder.
class FileEvidenceSource final : public EvidenceSource {
 public:
  explicit FileEvidenceSource(const ContextBuilder& builder) : builder_(builder) {}

  std::optional<Context> context_for(const std::string& accession,
                                     const ContextPolicy& policy) override;
  std::optional<ProteinRecord> sequence_for(const std::string& accession) override;

 private:
  const ContextBuilder& builder_;
};

/// Memoizes completions in a ContentCache keyed by backend id and prompt.
class CachedBackend final : public Backend {
 public:
  CachedBackend(std::unique_ptr<Backend> inner, ContentCache cache);

  Exchange complete(const PromptText& prompt) override;
  std::string id() const override { return inner_->id(); }

 private:
  std::unique_ptr<Backend> inner_;
  ContentCache cache_;
};

/// Writes out_dir/contexts/<accession>.txt for every FASTA record plus
/// out_dir/context_manifest.jsonl. Returns kExitItemFailures if any record
/// had unparseable evidence.
int cmd_context(const RunConfig& config);

/// Writes out_dir/bench_results.jsonl, score_report.json and
/// score_report.txt. Returns kExitItemFailures if any item failed.
int cmd_bench(const RunConfig& config);

/// Writes out_dir/ec_report.txt and ec_report.jsonl. Throws Error when the
/// two files cover different item ids.
int cmd_ec_eval(const std::filesystem::path& predictions, const std::filesystem::path& gold,
                const std::filesystem::path& out_dir);

/// Writes out_dir/ari_report.json and ari_report.txt. Throws Error when the
/// embedding ids and truth ids differ.
int cmd_cluster_eval(const std::filesystem::path& embeddings,
                     const std::filesystem::path& truth, DistanceMetric metric,
                     const std::filesystem::path& out_dir);

/// Writes out_dir/dataset.jsonl.
int cmd_dataset(const RunConfig& config);

/// Whole-file read; throws Error on failure.
std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace protctx
