#include "protctx/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace protctx::kernels {

namespace {

using ssize = std::ptrdiff_t;

void check_square(std::span<const double> dist, std::size_t n) {
  if (dist.size() != n * n) throw std::invalid_argument("distance matrix has wrong size");
}

bool pair_less(const ClosestPair& a, const ClosestPair& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

double point_distance(const double* x, const double* y, std::size_t dim, DistanceMetric metric,
                      double norm_x, double norm_y) {
  if (metric == DistanceMetric::Euclidean) {
    double s = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = x[k] - y[k];
      s += d * d;
    }
    return std::sqrt(s);
  }
  double dot = 0.0;
  for (std::size_t k = 0; k < dim; ++k) dot += x[k] * y[k];
  return 1.0 - dot / (norm_x * norm_y);
}

std::vector<double> row_norms(std::span<const double> points, std::size_t n, std::size_t dim) {
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < dim; ++k) s += points[i * dim + k] * points[i * dim + k];
    norms[i] = std::sqrt(s);
    if (norms[i] == 0.0) throw std::invalid_argument("zero-norm vector under cosine metric");
  }
  return norms;
}

void count_item(const std::vector<std::string>& p, const std::vector<std::string>& g,
                SetCounts& c) {
  std::size_t i = 0, j = 0;
  while (i < p.size() && j < g.size()) {
    if (p[i] == g[j]) {
      ++c.tp;
      ++i;
      ++j;
    } else if (p[i] < g[j]) {
      ++c.fp;
      ++i;
    } else {
      ++c.fn;
      ++j;
    }
  }
  c.fp += p.size() - i;
  c.fn += g.size() - j;
}

}  // namespace

std::vector<double> identities_to(std::string_view query, std::span<const std::string> refs,
                                  const AlignmentParams& params) {
  std::vector<double> out(refs.size());
  const auto n = static_cast<ssize>(refs.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (ssize r = 0; r < n; ++r) {
    out[static_cast<std::size_t>(r)] =
        pairwise_identity(query, refs[static_cast<std::size_t>(r)], params);
  }
  return out;
}

std::vector<double> identities_to_serial(std::string_view query,
                                         std::span<const std::string> refs,
                                         const AlignmentParams& params) {
  std::vector<double> out;
  out.reserve(refs.size());
  for (const auto& ref : refs) out.push_back(pairwise_identity(query, ref, params));
  return out;
}

std::optional<std::size_t> first_at_or_above(std::string_view query,
                                             std::span<const std::string> refs,
                                             double threshold, const AlignmentParams& params) {
  // Scan in blocks so that an early hit skips the tail.
  const std::size_t block = std::max<std::size_t>(
      16, static_cast<std::size_t>(omp_get_max_threads()) * 4);
  for (std::size_t start = 0; start < refs.size(); start += block) {
    const std::size_t end = std::min(refs.size(), start + block);
    auto ids = identities_to(query, refs.subspan(start, end - start), params);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (ids[k] >= threshold) return start + k;
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> first_at_or_above_serial(std::string_view query,
                                                    std::span<const std::string> refs,
                                                    double threshold,
                                                    const AlignmentParams& params) {
  for (std::size_t r = 0; r < refs.size(); ++r) {
    if (pairwise_identity(query, refs[r], params) >= threshold) return r;
  }
  return std::nullopt;
}

std::vector<double> max_identities(std::span<const std::string> queries,
                                   std::span<const std::string> refs,
                                   const AlignmentParams& params) {
  std::vector<double> out(queries.size(), 0.0);
  const auto nq = static_cast<ssize>(queries.size());
  const auto nr = static_cast<ssize>(refs.size());
  // Flatten (query, ref) so that a few long queries still spread across threads.
  std::vector<double> cell(static_cast<std::size_t>(nq * nr));
#pragma omp parallel for schedule(dynamic, 8)
  for (ssize idx = 0; idx < nq * nr; ++idx) {
    const auto q = static_cast<std::size_t>(idx / nr);
    const auto r = static_cast<std::size_t>(idx % nr);
    cell[static_cast<std::size_t>(idx)] = pairwise_identity(queries[q], refs[r], params);
  }
  for (ssize q = 0; q < nq; ++q) {
    for (ssize r = 0; r < nr; ++r) {
      out[static_cast<std::size_t>(q)] =
          std::max(out[static_cast<std::size_t>(q)], cell[static_cast<std::size_t>(q * nr + r)]);
    }
  }
  return out;
}

std::vector<double> max_identities_serial(std::span<const std::string> queries,
                                          std::span<const std::string> refs,
                                          const AlignmentParams& params) {
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    double best = 0.0;
    for (const auto& r : refs) best = std::max(best, pairwise_identity(q, r, params));
    out.push_back(best);
  }
  return out;
}

std::vector<double> distance_matrix(std::span<const double> points, std::size_t n,
                                    std::size_t dim, DistanceMetric metric) {
  if (points.size() != n * dim) throw std::invalid_argument("points has wrong size");
  std::vector<double> norms;
  if (metric == DistanceMetric::Cosine) norms = row_norms(points, n, dim);
  std::vector<double> dist(n * n, 0.0);
  const auto sn = static_cast<ssize>(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (ssize si = 0; si < sn; ++si) {
    const auto i = static_cast<std::size_t>(si);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = point_distance(&points[i * dim], &points[j * dim], dim, metric,
                                      norms.empty() ? 0.0 : norms[i],
                                      norms.empty() ? 0.0 : norms[j]);
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  }
  return dist;
}

std::vector<double> distance_matrix_serial(std::span<const double> points, std::size_t n,
                                           std::size_t dim, DistanceMetric metric) {
  if (points.size() != n * dim) throw std::invalid_argument("points has wrong size");
  std::vector<double> norms;
  if (metric == DistanceMetric::Cosine) norms = row_norms(points, n, dim);
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = point_distance(&points[i * dim], &points[j * dim], dim, metric,
                                      norms.empty() ? 0.0 : norms[i],
                                      norms.empty() ? 0.0 : norms[j]);
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  }
  return dist;
}

ClosestPair closest_pair(std::span<const double> dist, std::size_t n,
                         std::span<const std::size_t> active) {
  check_square(dist, n);
  if (active.size() < 2) throw std::invalid_argument("closest_pair needs two active rows");
  ClosestPair best{0, 0, std::numeric_limits<double>::infinity()};
  bool have = false;
  const auto m = static_cast<ssize>(active.size());
#pragma omp parallel
  {
    ClosestPair local{0, 0, std::numeric_limits<double>::infinity()};
    bool local_have = false;
#pragma omp for schedule(dynamic, 8) nowait
    for (ssize a = 0; a < m - 1; ++a) {
      const std::size_t i = active[static_cast<std::size_t>(a)];
      for (std::size_t b = static_cast<std::size_t>(a) + 1; b < active.size(); ++b) {
        const std::size_t j = active[b];
        ClosestPair cand{std::min(i, j), std::max(i, j), dist[i * n + j]};
        if (!local_have || pair_less(cand, local)) {
          local = cand;
          local_have = true;
        }
      }
    }
#pragma omp critical(protctx_closest_pair)
    {
      if (local_have && (!have || pair_less(local, best))) {
        best = local;
        have = true;
      }
    }
  }
  return best;
}

ClosestPair closest_pair_serial(std::span<const double> dist, std::size_t n,
                                std::span<const std::size_t> active) {
  check_square(dist, n);
  if (active.size() < 2) throw std::invalid_argument("closest_pair needs two active rows");
  ClosestPair best{std::min(active[0], active[1]), std::max(active[0], active[1]),
                   dist[active[0] * n + active[1]]};
  for (std::size_t a = 0; a < active.size(); ++a) {
    for (std::size_t b = a + 1; b < active.size(); ++b) {
      ClosestPair cand{std::min(active[a], active[b]), std::max(active[a], active[b]),
                       dist[active[a] * n + active[b]]};
      if (pair_less(cand, best)) best = cand;
    }
  }
  return best;
}

SetCounts set_counts(std::span<const std::vector<std::string>> preds,
                     std::span<const std::vector<std::string>> golds) {
  if (preds.size() != golds.size()) throw std::invalid_argument("item count mismatch");
  std::uint64_t tp = 0, fp = 0, fn = 0;
  const auto n = static_cast<ssize>(preds.size());
#pragma omp parallel for reduction(+ : tp, fp, fn) schedule(static)
  for (ssize k = 0; k < n; ++k) {
    SetCounts c;
    count_item(preds[static_cast<std::size_t>(k)], golds[static_cast<std::size_t>(k)], c);
    tp += c.tp;
    fp += c.fp;
    fn += c.fn;
  }
  return {tp, fp, fn};
}

SetCounts set_counts_serial(std::span<const std::vector<std::string>> preds,
                            std::span<const std::vector<std::string>> golds) {
  if (preds.size() != golds.size()) throw std::invalid_argument("item count mismatch");
  SetCounts c;
  for (std::size_t k = 0; k < preds.size(); ++k) count_item(preds[k], golds[k], c);
  return c;
}

}  // namespace protctx::kernels
