#pragma once

// Data-parallel inner loops. Every OpenMP kernel has a `_serial` twin with the
// same contract; the tests hold the two to identical results.

#include "protctx/align.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace protctx {

enum class DistanceMetric { Cosine, Euclidean };

namespace kernels {

// ---- alignment -------------------------------------------------------------

std::vector<double> identities_to(std::string_view query, std::span<const std::string> refs,
                                  const AlignmentParams& params);
std::vector<double> identities_to_serial(std::string_view query,
                                         std::span<const std::string> refs,
                                         const AlignmentParams& params);

/// Index of the first ref with identity >= threshold.
std::optional<std::size_t> first_at_or_above(std::string_view query,
                                             std::span<const std::string> refs,
                                             double threshold, const AlignmentParams& params);
std::optional<std::size_t> first_at_or_above_serial(std::string_view query,
                                                    std::span<const std::string> refs,
                                                    double threshold,
                                                    const AlignmentParams& params);

/// Per query, the maximum identity over refs (0 when refs is empty).
std::vector<double> max_identities(std::span<const std::string> queries,
                                   std::span<const std::string> refs,
                                   const AlignmentParams& params);
std::vector<double> max_identities_serial(std::span<const std::string> queries,
                                          std::span<const std::string> refs,
                                          const AlignmentParams& params);

// ---- embeddings ------------------------------------------------------------

/// Full n*n row-major distance matrix over row-major `points` (n x dim).
/// Cosine distance is 1 - cos; rows must have non-zero norm.
std::vector<double> distance_matrix(std::span<const double> points, std::size_t n,
                                    std::size_t dim, DistanceMetric metric);
std::vector<double> distance_matrix_serial(std::span<const double> points, std::size_t n,
                                           std::size_t dim, DistanceMetric metric);

struct ClosestPair {
  std::size_t i = 0;
  std::size_t j = 0;
  double distance = 0.0;
};

/// Minimum-distance pair (i < j) among `active` indices (ascending) of an
/// n*n matrix; ties go to the smallest (i, j). Requires >= 2 active.
ClosestPair closest_pair(std::span<const double> dist, std::size_t n,
                         std::span<const std::size_t> active);
ClosestPair closest_pair_serial(std::span<const double> dist, std::size_t n,
                                std::span<const std::size_t> active);

// ---- set counting ----------------------------------------------------------

struct SetCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  bool operator==(const SetCounts&) const = default;
};

/// Sums |p & g|, |p - g|, |g - p| over items. Each inner vector must be
/// sorted and duplicate-free.
SetCounts set_counts(std::span<const std::vector<std::string>> preds,
                     std::span<const std::vector<std::string>> golds);
SetCounts set_counts_serial(std::span<const std::vector<std::string>> preds,
                            std::span<const std::vector<std::string>> golds);

}  // namespace kernels
}  // namespace protctx
