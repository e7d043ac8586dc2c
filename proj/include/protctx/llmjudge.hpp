#pragma once

#include "protctx/backend.hpp"
#include "protctx/contextbuild.hpp"
#include "protctx/dataset.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace protctx {

/// The adjudicator prompt with `ground_truth` in the facts slot and
/// `generated` in the paragraph slot.
std::string build_judge_prompt(std::string_view ground_truth, std::string_view generated);

/// First "score": N style value in `text` (quotes, prose, code fences and
/// real numbers tolerated). Reals round half-up; the result is clamped to
/// [0, 100]. nullopt when nothing matches.
std::optional<int> extract_score(std::string_view text);

struct JudgeResult {
  std::string item_id;
  std::optional<int> score;  // absent on failure
  std::string raw_judge_text;
  std::string failure;       // empty on success

  bool ok() const noexcept { return score.has_value(); }
  bool operator==(const JudgeResult&) const = default;
};

JudgeResult judge(std::string item_id, std::string_view generated, std::string_view ground_truth,
                  Backend& backend);

struct ScoreReport {
  std::map<Category, std::optional<double>> per_category_mean;
  std::map<Category, std::size_t> per_category_count;  // parsed scores only
  std::optional<double> overall_mean;
  std::size_t n_items = 0;
  std::size_t n_failures = 0;

  bool operator==(const ScoreReport&) const = default;
};

/// Per-category and unweighted overall means over parsed scores. Failed
/// results count toward n_failures and are excluded from the means.
ScoreReport aggregate(std::span<const JudgeResult> results, std::span<const BenchmarkItem> items);

/// Supplies per-item inputs to the benchmark. Implementations must be safe to
/// call from several threads.
class EvidenceSource {
 public:
  virtual ~EvidenceSource() = default;
  virtual std::optional<Context> context_for(const std::string& accession,
                                             const ContextPolicy& policy) = 0;
  virtual std::optional<ProteinRecord> sequence_for(const std::string& accession) = 0;
};

/// Per-item outcome as written to the results file.
struct BenchRecord {
  std::string item_id;
  Category category = Category::Function;
  PromptMode mode = PromptMode::ContextOnly;
  std::optional<int> score;
  std::string failure;
  std::string prompt_fingerprint;
  std::string answer_digest;

  bool operator==(const BenchRecord&) const = default;
};

struct BenchOutcome {
  std::vector<JudgeResult> results;  // sorted by item_id
  std::vector<BenchRecord> records;  // sorted by item_id
  ScoreReport report;
};

struct BenchSettings {
  PromptMode mode = PromptMode::ContextOnly;
  ContextPolicy policy;
  int workers = 1;
};

/// Answers and judges every item on a bounded worker pool. Per-item failures
/// are recorded and never abort the run.
BenchOutcome run_benchmark(std::span<const BenchmarkItem> items, const BenchSettings& settings,
                           Backend& answer_backend, Backend& judge_backend,
                           EvidenceSource& evidence);

/// Machine-readable report (one JSON object, LF-terminated).
std::string score_report_json(const ScoreReport& report, const BenchSettings& settings,
                              std::string_view answer_backend_id,
                              std::string_view judge_backend_id, double judge_temperature);
/// Human-readable table.
std::string score_report_table(const ScoreReport& report);
std::string bench_records_jsonl(std::span<const BenchRecord> records);

}  // namespace protctx
