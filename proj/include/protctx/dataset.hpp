#pragma once

#include "protctx/align.hpp"
#include "protctx/evidence.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace protctx {

enum class Category { Function, Pathway, SubcellularLocation };

std::string_view to_string(Category c) noexcept;
Category parse_category(std::string_view s);

/// The fixed question text asked for each category.
std::string_view question_for(Category c) noexcept;

struct BenchmarkItem {
  std::string item_id;  // accession + ":" + category
  std::string accession;
  Category category = Category::Function;
  std::string question;
  std::string ground_truth;
  std::optional<Hardness> hardness;
  std::optional<int> year;

  bool operator==(const BenchmarkItem&) const = default;
};

/// Throws std::invalid_argument if the question does not match the category
/// template or the ground truth is empty.
void validate_item(const BenchmarkItem& item);

/// One item per annotation field present, copied verbatim. Ordered by
/// accession, then category.
std::vector<BenchmarkItem> build_items(const AnnotationDB& db);

struct TimeSplitOptions {
  int per_year = 100;
  int first_year = 1995;
  int last_year = 2024;
  std::uint64_t seed = 0;
};

/// Uniform sample of min(per_year, available) accessions for every year in
/// range, sorted by (year, accession). Reproducible for a fixed seed.
std::vector<std::string> time_split_sample(const AnnotationDB& db, const TimeSplitOptions& options);

/// Sets `hardness` on every item from its accession's test record.
void attach_hardness(std::vector<BenchmarkItem>& items, std::span<const ProteinRecord> tests,
                     const TrainingReference& reference, double theta = 0.30,
                     const AlignmentParams& params = {});

std::string to_jsonl(std::span<const BenchmarkItem> items);
std::vector<BenchmarkItem> from_jsonl(std::string_view text, const std::string& source = "<dataset>");

}  // namespace protctx
