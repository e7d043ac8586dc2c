#include "protctx/dataset.hpp"

#include "text_util.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace protctx {

std::string_view to_string(Category c) noexcept {
  switch (c) {
    case Category::Function: return "Function";
    case Category::Pathway: return "Pathway";
    case Category::SubcellularLocation: return "SubcellularLocation";
  }
  return "Function";
}

Category parse_category(std::string_view s) {
  if (s == "Function") return Category::Function;
  if (s == "Pathway") return Category::Pathway;
  if (s == "SubcellularLocation") return Category::SubcellularLocation;
  throw std::invalid_argument("unknown category: " + std::string(s));
}

std::string_view question_for(Category c) noexcept {
  switch (c) {
    case Category::Function: return "What is the function of this protein?";
    case Category::Pathway: return "What is the pathway of this protein?";
    case Category::SubcellularLocation: return "What is the subcellular location of this protein?";
  }
  return "";
}

void validate_item(const BenchmarkItem& item) {
  if (item.item_id.empty()) throw std::invalid_argument("item_id must be non-empty");
  if (item.question != question_for(item.category)) {
    throw std::invalid_argument("item " + item.item_id + ": question does not match category");
  }
  if (item.ground_truth.empty()) {
    throw std::invalid_argument("item " + item.item_id + ": empty ground truth");
  }
}

std::vector<BenchmarkItem> build_items(const AnnotationDB& db) {
  std::vector<BenchmarkItem> items;
  for (const auto& [acc, entry] : db.entries()) {
    const std::pair<Category, const std::optional<std::string>*> fields[] = {
        {Category::Function, &entry.function_text},
        {Category::Pathway, &entry.pathway_text},
        {Category::SubcellularLocation, &entry.subcellular_text},
    };
    for (const auto& [cat, text] : fields) {
      if (!*text) continue;
      BenchmarkItem item;
      item.item_id = acc + ":" + std::string(to_string(cat));
      item.accession = acc;
      item.category = cat;
      item.question = std::string(question_for(cat));
      item.ground_truth = **text;
      item.year = entry.first_publication_year;
      items.push_back(std::move(item));
    }
  }
  return items;
}

namespace {

// Unbiased draw from [0, n) using only the engine's raw output, so the
// sequence is identical across standard library implementations.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace

std::vector<std::string> time_split_sample(const AnnotationDB& db,
                                           const TimeSplitOptions& options) {
  if (options.per_year < 0) throw std::invalid_argument("per_year must be >= 0");
  std::map<int, std::vector<std::string>> by_year;
  for (const auto& [acc, entry] : db.entries()) {
    if (!entry.first_publication_year) continue;
    const int y = *entry.first_publication_year;
    if (y < options.first_year || y > options.last_year) continue;
    by_year[y].push_back(acc);
  }
  std::mt19937_64 rng(options.seed);
  std::vector<std::string> out;
  for (int year = options.first_year; year <= options.last_year; ++year) {
    auto it = by_year.find(year);
    if (it == by_year.end() || it->second.empty()) {
      spdlog::debug("time split: no entries for {}", year);
      continue;
    }
    auto& pool = it->second;  // already sorted by accession
    const std::size_t take = std::min(pool.size(), static_cast<std::size_t>(options.per_year));
    for (std::size_t k = 0; k < take; ++k) {
      const auto pick = k + uniform_below(rng, pool.size() - k);
      std::swap(pool[k], pool[pick]);
    }
    std::vector<std::string> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
    std::sort(chosen.begin(), chosen.end());
    out.insert(out.end(), chosen.begin(), chosen.end());
  }
  return out;
}

void attach_hardness(std::vector<BenchmarkItem>& items, std::span<const ProteinRecord> tests,
                     const TrainingReference& reference, double theta,
                     const AlignmentParams& params) {
  std::vector<ProteinRecord> needed;
  std::unordered_map<std::string, std::size_t> index;
  std::unordered_map<std::string_view, const ProteinRecord*> by_acc;
  for (const auto& t : tests) by_acc.emplace(t.accession, &t);
  for (const auto& item : items) {
    if (index.contains(item.accession)) continue;
    auto it = by_acc.find(item.accession);
    if (it == by_acc.end()) {
      throw Error("no test sequence for accession " + item.accession);
    }
    index.emplace(item.accession, needed.size());
    needed.push_back(*it->second);
  }
  auto labels = assign_hardness_batch(needed, reference, theta, params);
  for (auto& item : items) item.hardness = labels[index.at(item.accession)];
}

std::string to_jsonl(std::span<const BenchmarkItem> items) {
  std::string out;
  for (const auto& item : items) {
    nlohmann::ordered_json j;
    j["item_id"] = item.item_id;
    j["accession"] = item.accession;
    j["category"] = to_string(item.category);
    j["question"] = item.question;
    j["ground_truth"] = item.ground_truth;
    if (item.hardness) j["hardness"] = to_string(*item.hardness);
    if (item.year) j["year"] = *item.year;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<BenchmarkItem> from_jsonl(std::string_view text, const std::string& source) {
  std::vector<BenchmarkItem> items;
  std::unordered_set<std::string> ids;
  auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t ln = i + 1;
    if (detail::is_blank(lines[i])) continue;
    auto j = nlohmann::json::parse(lines[i], nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError(source, ln, "malformed JSON object");
    auto str = [&](const char* key) {
      auto it = j.find(key);
      if (it == j.end() || !it->is_string()) {
        throw ParseError(source, ln, std::string("missing string field \"") + key + "\"");
      }
      return it->get<std::string>();
    };
    BenchmarkItem item;
    try {
      item.item_id = str("item_id");
      item.accession = str("accession");
      item.category = parse_category(str("category"));
      item.question = str("question");
      item.ground_truth = str("ground_truth");
      if (auto h = j.find("hardness"); h != j.end() && !h->is_null()) {
        if (!h->is_string()) throw ParseError(source, ln, "hardness must be a string");
        item.hardness = parse_hardness(h->get<std::string>());
      }
      if (auto y = j.find("year"); y != j.end() && !y->is_null()) {
        if (!y->is_number_integer()) throw ParseError(source, ln, "year must be an integer");
        item.year = y->get<int>();
      }
      validate_item(item);
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, ln, e.what());
    }
    if (!ids.insert(item.item_id).second) {
      throw ParseError(source, ln, "duplicate item_id " + item.item_id);
    }
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace protctx
