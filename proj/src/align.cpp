#include "protctx/align.hpp"

#include "protctx/kernels.hpp"
#include "text_util.hpp"


#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace protctx {

void AlignmentParams::validate() const {
  if (!(match > mismatch)) throw std::invalid_argument("alignment: match must exceed mismatch");
  if (!(gap < 0)) throw std::invalid_argument("alignment: gap score must be negative");
}

namespace {

// Lexicographic objective: score up, identical columns up, columns down.
struct Cell {
  std::int64_t score;
  std::int64_t identical;
  std::int64_t columns;
};

inline bool better(const Cell& x, const Cell& y) {
  if (x.score != y.score) return x.score > y.score;
  if (x.identical != y.identical) return x.identical > y.identical;
  return x.columns < y.columns;
}

}  // namespace

AlignmentSummary global_align(std::string_view a, std::string_view b,
                              const AlignmentParams& params) {
  const std::size_t m = b.size();
  std::vector<Cell> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    const auto jj = static_cast<std::int64_t>(j);
    prev[j] = {jj * params.gap, 0, jj};
  }
  for (std::size_t i = 1; i <= a.size(); ++i) {
    const auto ii = static_cast<std::int64_t>(i);
    cur[0] = {ii * params.gap, 0, ii};
    const char ca = a[i - 1];
    for (std::size_t j = 1; j <= m; ++j) {
      const bool same = ca == b[j - 1];
      Cell diag{prev[j - 1].score + (same ? params.match : params.mismatch),
                prev[j - 1].identical + (same ? 1 : 0), prev[j - 1].columns + 1};
      Cell up{prev[j].score + params.gap, prev[j].identical, prev[j].columns + 1};
      Cell left{cur[j - 1].score + params.gap, cur[j - 1].identical, cur[j - 1].columns + 1};
      Cell best = diag;
      if (better(up, best)) best = up;
      if (better(left, best)) best = left;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  const Cell& end = prev[m];
  return {end.score, static_cast<std::size_t>(end.identical),
          static_cast<std::size_t>(end.columns)};
}

double pairwise_identity(std::string_view a, std::string_view b, const AlignmentParams& params) {
  if (a.empty() || b.empty()) throw std::invalid_argument("pairwise_identity: empty sequence");
  return global_align(a, b, params).identity();
}

double pairwise_identity(const ProteinRecord& a, const ProteinRecord& b,
                         const AlignmentParams& params) {
  return pairwise_identity(a.sequence, b.sequence, params);
}

std::size_t ClusterSet::member_count() const noexcept {
  std::size_t n = 0;
  for (const auto& c : clusters) n += c.members.size();
  return n;
}

ClusterSet greedy_cluster(std::span<const ProteinRecord> records, double threshold,
                          const AlignmentParams& params) {
  params.validate();
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("greedy_cluster: threshold must lie in (0, 1]");
  }
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto& rx = records[x];
    const auto& ry = records[y];
    if (rx.sequence.size() != ry.sequence.size()) return rx.sequence.size() > ry.sequence.size();
    return rx.accession < ry.accession;
  });

  ClusterSet out;
  out.threshold = threshold;
  std::vector<std::string> rep_sequences;
  for (std::size_t idx : order) {
    const auto& rec = records[idx];
    auto hit = kernels::first_at_or_above(rec.sequence, rep_sequences, threshold, params);
    if (hit) {
      out.clusters[*hit].members.push_back(rec.accession);
    } else {
      out.clusters.push_back({rec.accession, {rec.accession}});
      rep_sequences.push_back(rec.sequence);
    }
  }
  return out;
}

ClusterSet load_cluster_tsv(std::string_view text, double threshold, const std::string& source) {
  ClusterSet out;
  out.threshold = threshold;
  std::unordered_map<std::string, std::size_t> cluster_of_rep;
  std::unordered_map<std::string, std::string> owner;
  auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (detail::is_blank(lines[i]) || lines[i].front() == '#') continue;
    auto fields = detail::split(lines[i], '\t');
    if (fields.size() != 2) {
      throw ParseError(source, i + 1, "expected representative<TAB>member");
    }
    std::string rep(detail::trim(fields[0]));
    std::string member(detail::trim(fields[1]));
    if (rep.empty() || member.empty()) throw ParseError(source, i + 1, "empty accession");
    auto [prev_owner, fresh] = owner.try_emplace(member, rep);
    if (!fresh) {
      if (prev_owner->second == rep) continue;
      throw ParseError(source, i + 1, "member " + member + " assigned to two clusters");
    }
    auto it = cluster_of_rep.find(rep);
    if (it == cluster_of_rep.end()) {
      it = cluster_of_rep.emplace(rep, out.clusters.size()).first;
      out.clusters.push_back({rep, {}});
    }
    auto& members = out.clusters[it->second].members;
    if (member == rep) {
      members.insert(members.begin(), member);
    } else {
      members.push_back(member);
    }
  }
  for (const auto& c : out.clusters) {
    if (c.members.empty() || c.members.front() != c.representative) {
      throw ParseError(source, 0, "representative " + c.representative +
                                      " is not listed as a member of its own cluster");
    }
  }
  return out;
}

std::string write_cluster_tsv(const ClusterSet& clusters) {
  std::string out;
  for (const auto& c : clusters.clusters) {
    for (const auto& m : c.members) {
      out += c.representative;
      out += '\t';
      out += m;
      out += '\n';
    }
  }
  return out;
}

std::set<std::size_t> major_clusters(const ClusterSet& clusters) {
  if (clusters.clusters.empty()) throw std::invalid_argument("major_clusters: empty cluster set");
  std::vector<std::size_t> order(clusters.clusters.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto& cx = clusters.clusters[x];
    const auto& cy = clusters.clusters[y];
    if (cx.members.size() != cy.members.size()) return cx.members.size() > cy.members.size();
    return cx.representative < cy.representative;
  });
  const std::size_t total = clusters.member_count();
  std::set<std::size_t> out;
  std::size_t covered = 0;
  for (std::size_t idx : order) {
    out.insert(idx);
    covered += clusters.clusters[idx].members.size();
    if (2 * covered >= total) break;
  }
  return out;
}

std::string_view to_string(Hardness h) noexcept {
  switch (h) {
    case Hardness::Easy: return "Easy";
    case Hardness::Medium: return "Medium";
    case Hardness::Hard: return "Hard";
  }
  return "Hard";
}

Hardness parse_hardness(std::string_view s) {
  if (s == "Easy") return Hardness::Easy;
  if (s == "Medium") return Hardness::Medium;
  if (s == "Hard") return Hardness::Hard;
  throw std::invalid_argument("unknown hardness label: " + std::string(s));
}

TrainingReference::TrainingReference(std::span<const ProteinRecord> training,
                                     const ClusterSet& clusters, HardnessTarget target)
    : majors_(major_clusters(clusters)) {
  std::unordered_map<std::string_view, const std::string*> seq_of;
  for (const auto& r : training) seq_of.emplace(r.accession, &r.sequence);
  auto lookup = [&](const std::string& acc) -> const std::string& {
    auto it = seq_of.find(acc);
    if (it == seq_of.end()) {
      throw std::invalid_argument("cluster accession " + acc + " missing from training records");
    }
    return *it->second;
  };
  for (std::size_t c = 0; c < clusters.clusters.size(); ++c) {
    auto& dest = majors_.contains(c) ? major_ : other_;
    const auto& cluster = clusters.clusters[c];
    if (target == HardnessTarget::Representatives) {
      dest.push_back(lookup(cluster.representative));
    } else {
      for (const auto& m : cluster.members) dest.push_back(lookup(m));
    }
  }
}

namespace {

Hardness classify(double max_major, double max_other, double theta) {
  if (max_major > theta) return Hardness::Easy;
  if (max_other > theta) return Hardness::Medium;
  return Hardness::Hard;
}

}  // namespace

Hardness assign_hardness(const ProteinRecord& test, const TrainingReference& reference,
                         double theta, const AlignmentParams& params) {
  std::span<const std::string> query(&test.sequence, 1);
  const double major = kernels::max_identities(query, reference.major_sequences(), params)[0];
  if (major > theta) return Hardness::Easy;
  const double other = kernels::max_identities(query, reference.other_sequences(), params)[0];
  return classify(major, other, theta);
}

std::vector<Hardness> assign_hardness_batch(std::span<const ProteinRecord> tests,
                                            const TrainingReference& reference, double theta,
                                            const AlignmentParams& params) {
  std::vector<std::string> seqs;
  seqs.reserve(tests.size());
  for (const auto& t : tests) seqs.push_back(t.sequence);
  auto major = kernels::max_identities(seqs, reference.major_sequences(), params);
  auto other = kernels::max_identities(seqs, reference.other_sequences(), params);
  std::vector<Hardness> out;
  out.reserve(tests.size());
  for (std::size_t i = 0; i < tests.size(); ++i) out.push_back(classify(major[i], other[i], theta));
  return out;
}

}  // namespace protctx
