#include "protctx/metrics.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace protctx {

// ---- EC numbers ------------------------------------------------------------

ECNumber ECNumber::make(std::array<int, 4> levels, int depth) {
  if (depth < 1 || depth > 4) throw std::invalid_argument("EC depth must be in 1..4");
  for (int k = 0; k < 4; ++k) {
    if (k < depth && levels[static_cast<std::size_t>(k)] <= 0) {
      throw std::invalid_argument("EC components must be positive");
    }
    if (k >= depth && levels[static_cast<std::size_t>(k)] != 0) {
      throw std::invalid_argument("EC wildcard components must be zero");
    }
  }
  ECNumber ec;
  ec.levels = levels;
  ec.depth = depth;
  return ec;
}

std::string ECNumber::to_string() const {
  std::string out;
  for (int k = 0; k < 4; ++k) {
    if (k) out += '.';
    out += k < depth ? std::to_string(levels[static_cast<std::size_t>(k)]) : "-";
  }
  return out;
}

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Tries to read one EC token starting at `pos`. Sets `end` to the end of the
// dotted run either way so the caller can skip it.
std::optional<ECNumber> scan_ec(std::string_view s, std::size_t pos, std::size_t& end) {
  std::array<int, 4> levels{};
  int depth = 0;
  bool wildcard = false;
  std::size_t i = pos;
  bool ok = true;
  for (int field = 0; field < 4; ++field) {
    if (field > 0) {
      if (i >= s.size() || s[i] != '.') {
        ok = false;
        break;
      }
      ++i;
    }
    if (i < s.size() && s[i] == '-' && field > 0) {
      wildcard = true;
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < s.size() && is_digit(s[i])) ++i;
    const std::size_t len = i - start;
    if (len == 0 || len > 5 || wildcard) {
      ok = false;
      break;
    }
    const int v = std::stoi(std::string(s.substr(start, len)));
    if (v <= 0) {
      ok = false;
      break;
    }
    levels[static_cast<std::size_t>(field)] = v;
    depth = field + 1;
  }
  // A following ".<digit>" or ".-" means this is part of a longer dotted number.
  if (ok && i < s.size()) {
    if (s[i] == '.' && i + 1 < s.size() && (is_digit(s[i + 1]) || s[i + 1] == '-')) ok = false;
    if (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '-') ok = false;
  }
  end = i;
  while (end < s.size() && (is_digit(s[end]) || s[end] == '-' ||
                            (s[end] == '.' && end + 1 < s.size() &&
                             (is_digit(s[end + 1]) || s[end + 1] == '-')))) {
    ++end;
  }
  if (end == pos) end = pos + 1;
  if (!ok) return std::nullopt;
  return ECNumber::make(levels, depth);
}

}  // namespace

ECNumber ECNumber::parse(std::string_view text) {
  text = detail::trim(text);
  std::size_t end = 0;
  auto ec = text.empty() || !is_digit(text[0]) ? std::nullopt : scan_ec(text, 0, end);
  if (!ec || end != text.size()) {
    throw std::invalid_argument("malformed EC number: " + std::string(text));
  }
  return *ec;
}

ECSet parse_ec_set(std::string_view text) {
  ECSet out;
  std::size_t i = 0;
  while (i < text.size()) {
    const bool boundary = i == 0 || !(is_digit(text[i - 1]) || text[i - 1] == '.');
    if (is_digit(text[i]) && boundary) {
      std::size_t end = i;
      if (auto ec = scan_ec(text, i, end)) out.insert(*ec);
      i = end;
    } else {
      ++i;
    }
  }
  return out;
}

std::optional<std::string> truncate_ec(const ECNumber& ec, int level) {
  if (level < 1 || level > 4) throw std::invalid_argument("EC level must be in 1..4");
  if (ec.depth < level) return std::nullopt;
  std::string out;
  for (int k = 0; k < level; ++k) {
    if (k) out += '.';
    out += std::to_string(ec.levels[static_cast<std::size_t>(k)]);
  }
  return out;
}

namespace {

std::vector<std::string> truncated_set(const ECSet& set, int level) {
  std::vector<std::string> out;
  for (const auto& ec : set) {
    if (auto t = truncate_ec(ec, level)) out.push_back(std::move(*t));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

LevelMetrics micro_prf(std::span<const ECSet> preds, std::span<const ECSet> golds, int level) {
  if (preds.size() != golds.size()) {
    throw std::invalid_argument("micro_prf: prediction and gold item counts differ");
  }
  if (level < 1 || level > 4) throw std::invalid_argument("EC level must be in 1..4");
  std::vector<std::vector<std::string>> p, g;
  p.reserve(preds.size());
  g.reserve(golds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    p.push_back(truncated_set(preds[i], level));
    g.push_back(truncated_set(golds[i], level));
  }
  const auto c = kernels::set_counts(p, g);
  LevelMetrics m;
  m.level = level;
  m.tp = c.tp;
  m.fp = c.fp;
  m.fn = c.fn;
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.f1 = (m.precision + m.recall) == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

std::map<std::string, ECSet> parse_ec_table(std::string_view text, const std::string& source) {
  std::map<std::string, ECSet> out;
  auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t ln = i + 1;
    if (detail::is_blank(lines[i]) || lines[i].front() == '#') continue;
    auto tab = lines[i].find('\t');
    std::string id(detail::trim(lines[i].substr(0, tab)));
    if (id.empty()) throw ParseError(source, ln, "empty item id");
    ECSet set;
    if (tab != std::string_view::npos) {
      for (auto token : detail::split(lines[i].substr(tab + 1), ';')) {
        token = detail::trim(token);
        if (token.empty()) continue;
        try {
          set.insert(ECNumber::parse(token));
        } catch (const std::invalid_argument& e) {
          throw ParseError(source, ln, e.what());
        }
      }
    }
    if (!out.emplace(std::move(id), std::move(set)).second) {
      throw ParseError(source, ln, "duplicate item id");
    }
  }
  return out;
}

// ---- partitions ------------------------------------------------------------

Labeling parse_labeling(std::string_view text, const std::string& source) {
  Labeling out;
  auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t ln = i + 1;
    if (detail::is_blank(lines[i]) || lines[i].front() == '#') continue;
    auto f = detail::split(lines[i], '\t');
    if (f.size() != 2) throw ParseError(source, ln, "expected accession<TAB>label");
    std::string id(detail::trim(f[0]));
    std::string label(detail::trim(f[1]));
    if (id.empty() || label.empty()) throw ParseError(source, ln, "empty accession or label");
    if (!out.emplace(std::move(id), std::move(label)).second) {
      throw ParseError(source, ln, "duplicate accession");
    }
  }
  return out;
}

namespace {

__extension__ typedef __int128 i128;

i128 pairs(std::uint64_t n) { return static_cast<i128>(n) * (static_cast<i128>(n) - 1) / 2; }

}  // namespace

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw std::invalid_argument("ARI: labelings differ in length");
  const std::size_t n = a.size();
  std::unordered_map<int, std::uint64_t> rows, cols;
  std::map<std::pair<int, int>, std::uint64_t> cells;
  for (std::size_t i = 0; i < n; ++i) {
    ++rows[a[i]];
    ++cols[b[i]];
    ++cells[{a[i], b[i]}];
  }
  i128 index = 0, sa = 0, sb = 0;
  for (const auto& [_, c] : cells) index += pairs(c);
  for (const auto& [_, c] : rows) sa += pairs(c);
  for (const auto& [_, c] : cols) sb += pairs(c);
  const i128 total = pairs(n);

  // (index - sa*sb/total) / ((sa+sb)/2 - sa*sb/total), scaled by 2*total.
  const i128 num = 2 * (index * total - sa * sb);
  const i128 den = (sa + sb) * total - 2 * sa * sb;
  if (den == 0) {
    const bool identical = cells.size() == rows.size() && cells.size() == cols.size();
    return identical ? 1.0 : 0.0;
  }
  return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

double adjusted_rand_index(const Labeling& a, const Labeling& b) {
  if (a.size() != b.size()) throw std::invalid_argument("ARI: id sets differ");
  std::vector<int> la, lb;
  std::map<std::string, int> codes_a, codes_b;
  auto ib = b.begin();
  for (auto ia = a.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) throw std::invalid_argument("ARI: id sets differ");
    la.push_back(codes_a.try_emplace(ia->second, static_cast<int>(codes_a.size())).first->second);
    lb.push_back(codes_b.try_emplace(ib->second, static_cast<int>(codes_b.size())).first->second);
  }
  return adjusted_rand_index(la, lb);
}

// ---- embeddings ------------------------------------------------------------

EmbeddingSet load_embeddings(std::string_view text, const std::string& source) {
  EmbeddingSet emb;
  std::unordered_set<std::string> seen;
  auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t ln = i + 1;
    if (detail::is_blank(lines[i]) || lines[i].front() == '#') continue;
    const char delim = lines[i].find('\t') != std::string_view::npos ? '\t' : ',';
    auto f = detail::split(lines[i], delim);
    std::string id(detail::trim(f[0]));
    if (id.empty()) throw ParseError(source, ln, "empty accession");
    const std::size_t dim = f.size() - 1;
    if (dim == 0) throw ParseError(source, ln, "row has no values");
    if (emb.ids.empty()) {
      emb.dim = dim;
    } else if (dim != emb.dim) {
      throw ParseError(source, ln,
                       "ragged row: expected " + std::to_string(emb.dim) + " values, found " +
                           std::to_string(dim));
    }
    if (!seen.insert(id).second) throw ParseError(source, ln, "duplicate accession " + id);
    for (std::size_t k = 1; k < f.size(); ++k) {
      auto v = detail::parse_double(f[k]);
      if (!v) throw ParseError(source, ln, "non-numeric value in column " + std::to_string(k + 1));
      if (!std::isfinite(*v)) {
        throw ParseError(source, ln, "non-finite value in column " + std::to_string(k + 1));
      }
      emb.values.push_back(*v);
    }
    emb.ids.push_back(std::move(id));
  }
  return emb;
}

std::string_view to_string(Linkage) noexcept { return "average"; }

std::string_view to_string(DistanceMetric m) noexcept {
  return m == DistanceMetric::Cosine ? "cosine" : "euclidean";
}

DistanceMetric parse_metric(std::string_view s) {
  if (s == "cosine") return DistanceMetric::Cosine;
  if (s == "euclidean") return DistanceMetric::Euclidean;
  throw std::invalid_argument("unknown distance metric: " + std::string(s));
}

Labeling agglomerative_cluster(const EmbeddingSet& emb, std::size_t k, Linkage,
                               DistanceMetric metric) {
  const std::size_t n = emb.size();
  if (n == 0 || emb.dim == 0) throw std::invalid_argument("agglomerative_cluster: empty input");
  if (k < 1 || k > n) throw std::invalid_argument("agglomerative_cluster: k must be in 1..n");

  std::vector<double> dist = kernels::distance_matrix(emb.values, n, emb.dim, metric);
  std::vector<std::size_t> active(n);
  std::vector<std::size_t> owner(n), size(n, 1);
  for (std::size_t i = 0; i < n; ++i) active[i] = owner[i] = i;

  // Clusters are named by their smallest member index; average linkage is
  // maintained with the Lance-Williams update.
  while (active.size() > k) {
    const auto p = kernels::closest_pair(dist, n, active);
    const double si = static_cast<double>(size[p.i]);
    const double sj = static_cast<double>(size[p.j]);
    for (std::size_t m : active) {
      if (m == p.i || m == p.j) continue;
      const double d = (si * dist[p.i * n + m] + sj * dist[p.j * n + m]) / (si + sj);
      dist[p.i * n + m] = d;
      dist[m * n + p.i] = d;
    }
    size[p.i] += size[p.j];
    for (auto& o : owner) {
      if (o == p.j) o = p.i;
    }
    active.erase(std::find(active.begin(), active.end(), p.j));
  }

  Labeling out;
  std::unordered_map<std::size_t, std::size_t> label_of;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, _] = label_of.try_emplace(owner[i], label_of.size());
    out.emplace(emb.ids[i], std::to_string(it->second));
  }
  return out;
}

ARIReport ari_report(const EmbeddingSet& emb, const Labeling& truth, DistanceMetric metric) {
  if (truth.size() != emb.size()) {
    throw std::invalid_argument("ari_report: embedding ids and truth labels differ");
  }
  for (const auto& id : emb.ids) {
    if (!truth.contains(id)) {
      throw std::invalid_argument("ari_report: no truth label for " + id);
    }
  }
  std::set<std::string> labels;
  for (const auto& [_, l] : truth) labels.insert(l);
  ARIReport r;
  r.k = labels.size();
  r.metric = metric;
  r.n = emb.size();
  r.ari = adjusted_rand_index(agglomerative_cluster(emb, r.k, Linkage::Average, metric), truth);
  return r;
}

}  // namespace protctx
