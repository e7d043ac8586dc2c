#pragma once

#include "protctx/error.hpp"
#include "protctx/kernels.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace protctx {

// ---- EC numbers ------------------------------------------------------------

/// An EC number such as 4.1.1.23 or the partial form 1.2.-.-. Components past
/// `depth` are wildcards and stored as 0.
struct ECNumber {
  std::array<int, 4> levels{};
  int depth = 4;

  /// Throws std::invalid_argument unless 1 <= depth <= 4, specified
  /// components are positive and the rest are zero.
  static ECNumber make(std::array<int, 4> levels, int depth);
  /// Parses the canonical four-field form ("1.2.3.4", "1.2.-.-").
  static ECNumber parse(std::string_view text);

  std::string to_string() const;

  auto operator<=>(const ECNumber&) const = default;
};

using ECSet = std::set<ECNumber>;

/// Every EC-shaped token in free text (four dot-separated fields, trailing
/// fields may be '-'). Tokens embedded in longer dotted numbers are ignored.
ECSet parse_ec_set(std::string_view text);

/// Dot-joined first `level` components, or nullopt when the number is not
/// specified that deep.
std::optional<std::string> truncate_ec(const ECNumber& ec, int level);

struct LevelMetrics {
  int level = 1;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const LevelMetrics&) const = default;
};

/// Micro-averaged precision/recall/F1 at one hierarchy level. Sets are
/// truncated and deduplicated per item; wildcards shallower than `level`
/// are left out of both sides. Zero denominators give 0.
LevelMetrics micro_prf(std::span<const ECSet> preds, std::span<const ECSet> golds, int level);

/// item_id<TAB>semicolon-separated EC list per line.
std::map<std::string, ECSet> parse_ec_table(std::string_view text,
                                            const std::string& source = "<ec>");

// ---- partitions ------------------------------------------------------------

/// accession -> opaque cluster label.
using Labeling = std::map<std::string, std::string>;

/// accession<TAB>label per line.
Labeling parse_labeling(std::string_view text, const std::string& source = "<labels>");

/// Hubert-Arabie adjusted Rand index. When the adjustment denominator is 0
/// the result is 1.0 for identical partitions and 0.0 otherwise.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);
/// Throws std::invalid_argument if the id sets differ.
double adjusted_rand_index(const Labeling& a, const Labeling& b);

// ---- embeddings ------------------------------------------------------------

struct EmbeddingSet {
  std::vector<std::string> ids;
  std::vector<double> values;  // row-major, ids.size() x dim
  std::size_t dim = 0;

  std::size_t size() const noexcept { return ids.size(); }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
};

/// accession followed by D reals per line, tab- or comma-separated.
EmbeddingSet load_embeddings(std::string_view text, const std::string& source = "<embeddings>");

enum class Linkage { Average };

std::string_view to_string(Linkage l) noexcept;
std::string_view to_string(DistanceMetric m) noexcept;
DistanceMetric parse_metric(std::string_view s);

/// Bottom-up clustering until k clusters remain. Ties merge the smallest
/// (i, j) pair; labels 0..k-1 follow first appearance in `emb.ids`.
Labeling agglomerative_cluster(const EmbeddingSet& emb, std::size_t k,
                               Linkage linkage = Linkage::Average,
                               DistanceMetric metric = DistanceMetric::Cosine);

struct ARIReport {
  std::size_t k = 0;
  double ari = 0.0;
  Linkage linkage = Linkage::Average;
  DistanceMetric metric = DistanceMetric::Cosine;
  std::size_t n = 0;
};

/// Clusters `emb` into as many groups as `truth` has labels and scores the
/// result against `truth`.
ARIReport ari_report(const EmbeddingSet& emb, const Labeling& truth,
                     DistanceMetric metric = DistanceMetric::Cosine);

}  // namespace protctx
