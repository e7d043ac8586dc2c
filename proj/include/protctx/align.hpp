#pragma once

#include "protctx/seqio.hpp"

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace protctx {

/// Linear-gap scoring for global alignment. Defaults: +2 / -1 / -2.
struct AlignmentParams {
  int match = 2;
  int mismatch = -1;
  int gap = -2;

  /// Throws std::invalid_argument unless match > mismatch and gap < 0.
  void validate() const;
};

/// Outcome of a global alignment. Among all score-optimal alignments the one
/// with the most identical columns is chosen, then the fewest columns. This
/// selection is independent of argument order.
struct AlignmentSummary {
  std::int64_t score = 0;
  std::size_t identical = 0;
  std::size_t columns = 0;  // gap columns included

  double identity() const noexcept {
    return columns == 0 ? 0.0 : static_cast<double>(identical) / static_cast<double>(columns);
  }
  bool operator==(const AlignmentSummary&) const = default;
};

AlignmentSummary global_align(std::string_view a, std::string_view b,
                              const AlignmentParams& params = {});

/// Identical aligned columns over total alignment columns, in [0, 1].
/// Throws std::invalid_argument on an empty sequence.
double pairwise_identity(std::string_view a, std::string_view b,
                         const AlignmentParams& params = {});
double pairwise_identity(const ProteinRecord& a, const ProteinRecord& b,
                         const AlignmentParams& params = {});

struct Cluster {
  std::string representative;
  std::vector<std::string> members;  // representative first

  bool operator==(const Cluster&) const = default;
};

struct ClusterSet {
  std::vector<Cluster> clusters;
  double threshold = 0.5;

  std::size_t member_count() const noexcept;
  bool operator==(const ClusterSet&) const = default;
};

/// CD-HIT style greedy clustering. Records are visited longest first (ties by
/// accession); each joins the earliest-founded cluster whose representative
/// reaches `threshold` identity, or founds a new cluster.
ClusterSet greedy_cluster(std::span<const ProteinRecord> records, double threshold,
                          const AlignmentParams& params = {});

/// Reads representative<TAB>member rows (MMseqs2 createtsv layout). Clusters
/// keep first-appearance order. A member listed under two representatives is
/// an error.
ClusterSet load_cluster_tsv(std::string_view text, double threshold,
                            const std::string& source = "<clusters>");
std::string write_cluster_tsv(const ClusterSet& clusters);

/// Indices of the largest clusters (by size, ties by representative
/// accession) whose cumulative membership first reaches half of all members.
std::set<std::size_t> major_clusters(const ClusterSet& clusters);

enum class Hardness { Easy, Medium, Hard };

std::string_view to_string(Hardness h) noexcept;
Hardness parse_hardness(std::string_view s);

enum class HardnessTarget {
  Representatives,  // compare against cluster representatives only
  AllMembers,       // compare against every member (slower)
};

/// Training-side sequences split into the major and remaining groups.
class TrainingReference {
 public:
  TrainingReference(std::span<const ProteinRecord> training, const ClusterSet& clusters,
                    HardnessTarget target = HardnessTarget::Representatives);

  const std::vector<std::string>& major_sequences() const noexcept { return major_; }
  const std::vector<std::string>& other_sequences() const noexcept { return other_; }
  const std::set<std::size_t>& majors() const noexcept { return majors_; }

 private:
  std::set<std::size_t> majors_;
  std::vector<std::string> major_;
  std::vector<std::string> other_;
};

/// Easy: identity > theta to a major sequence. Medium: otherwise > theta to a
/// remaining sequence. Hard: identity <= theta to everything.
Hardness assign_hardness(const ProteinRecord& test, const TrainingReference& reference,
                         double theta = 0.30, const AlignmentParams& params = {});

/// Same as assign_hardness for every test record; runs tests in parallel.
std::vector<Hardness> assign_hardness_batch(std::span<const ProteinRecord> tests,
                                            const TrainingReference& reference,
                                            double theta = 0.30,
                                            const AlignmentParams& params = {});

}  // namespace protctx
