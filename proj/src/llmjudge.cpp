#include "protctx/llmjudge.hpp"

#include "protctx/hash.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <regex>
#include <thread>

namespace protctx {

std::string build_judge_prompt(std::string_view ground_truth, std::string_view generated) {
  std::string out =
      "As an expert biologist, you are assigned to check one paragraph is aligned with facts or "
      "not. You will receive some facts, and one paragraph. Score the paragraph between 0 to "
      "100.\n"
      "\n"
      "The score should be the format of {\"score\": score}\n"
      "\n"
      "---------\n"
      "\n"
      "Here's the facts:\n"
      "\n";
  out += ground_truth;
  out +=
      "\n"
      "\n"
      "---------\n"
      "\n"
      "Here's the paragraph:\n"
      "\n";
  out += generated;
  out += '\n';
  return out;
}

std::optional<int> extract_score(std::string_view text) {
  static const std::regex re(R"re(["']?\bscore\b["']?\s*[:=]\s*["']?(-?\d+(\.\d*)?))re",
                             std::regex::ECMAScript | std::regex::icase);
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(text.begin(), text.end(), m, re)) return std::nullopt;
  const std::string number = m[1].str();
  const double value = std::strtod(number.c_str(), nullptr);
  const double rounded = std::floor(value + 0.5);
  if (rounded > 100.0 || rounded < 0.0) {
    spdlog::warn("judge score {} outside [0, 100], clamping", number);
  }
  return static_cast<int>(std::clamp(rounded, 0.0, 100.0));
}

JudgeResult judge(std::string item_id, std::string_view generated, std::string_view ground_truth,
                  Backend& backend) {
  JudgeResult r;
  r.item_id = std::move(item_id);
  if (generated.empty() || ground_truth.empty()) {
    r.failure = "judge: empty generated text or ground truth";
    return r;
  }
  PromptText prompt{PromptMode::ContextOnly, build_judge_prompt(ground_truth, generated)};
  try {
    r.raw_judge_text = backend.complete(prompt).response_text;
  } catch (const std::exception& e) {
    r.failure = std::string("judge: ") + e.what();
    return r;
  }
  r.score = extract_score(r.raw_judge_text);
  if (!r.score) r.failure = "judge: unparseable score";
  return r;
}

ScoreReport aggregate(std::span<const JudgeResult> results, std::span<const BenchmarkItem> items) {
  std::map<std::string_view, Category> category_of;
  for (const auto& item : items) category_of.emplace(item.item_id, item.category);

  // Integer sums keep the means independent of result order.
  std::map<Category, long long> sums;
  long long total = 0;
  std::size_t parsed = 0;
  ScoreReport report;
  for (Category c : {Category::Function, Category::Pathway, Category::SubcellularLocation}) {
    report.per_category_count[c] = 0;
    sums[c] = 0;
  }
  for (const auto& r : results) {
    auto it = category_of.find(r.item_id);
    if (it == category_of.end()) {
      throw std::invalid_argument("result for unknown item " + r.item_id);
    }
    ++report.n_items;
    if (!r.score) {
      ++report.n_failures;
      continue;
    }
    sums[it->second] += *r.score;
    ++report.per_category_count[it->second];
    total += *r.score;
    ++parsed;
  }
  for (auto& [c, n] : report.per_category_count) {
    report.per_category_mean[c] =
        n == 0 ? std::nullopt
               : std::optional<double>(static_cast<double>(sums[c]) / static_cast<double>(n));
  }
  if (parsed > 0) report.overall_mean = static_cast<double>(total) / static_cast<double>(parsed);
  return report;
}

namespace {

struct ItemOutcome {
  JudgeResult result;
  BenchRecord record;
};

ItemOutcome run_item(const BenchmarkItem& item, const BenchSettings& settings, Backend& answer,
                     Backend& judge_backend, EvidenceSource& evidence) {
  ItemOutcome out;
  out.result.item_id = item.item_id;
  out.record.item_id = item.item_id;
  out.record.category = item.category;
  out.record.mode = settings.mode;
  auto fail = [&](std::string why) {
    out.result.failure = why;
    out.record.failure = std::move(why);
    return out;
  };

  std::optional<Context> ctx;
  std::optional<ProteinRecord> seq;
  try {
    if (settings.mode != PromptMode::SequenceOnly) {
      ctx = evidence.context_for(item.accession, settings.policy);
      if (!ctx) return fail("missing context for " + item.accession);
    }
    if (settings.mode != PromptMode::ContextOnly) {
      seq = evidence.sequence_for(item.accession);
      if (!seq) return fail("missing sequence for " + item.accession);
    }
  } catch (const std::exception& e) {
    return fail(std::string("evidence: ") + e.what());
  }

  PromptText prompt = assemble_prompt(item.question, settings.mode, ctx ? &*ctx : nullptr,
                                      seq ? &*seq : nullptr);
  out.record.prompt_fingerprint = fnv1a64_hex(prompt.text);

  std::string answer_text;
  try {
    answer_text = answer.complete(prompt).response_text;
  } catch (const std::exception& e) {
    return fail(std::string("answer: ") + e.what());
  }
  out.record.answer_digest = fnv1a64_hex(answer_text);

  out.result = judge(item.item_id, answer_text, item.ground_truth, judge_backend);
  out.record.score = out.result.score;
  out.record.failure = out.result.failure;
  return out;
}

}  // namespace

BenchOutcome run_benchmark(std::span<const BenchmarkItem> items, const BenchSettings& settings,
                           Backend& answer_backend, Backend& judge_backend,
                           EvidenceSource& evidence) {
  if (settings.workers < 1) throw ConfigError("workers must be >= 1");
  settings.policy.validate();

  std::vector<ItemOutcome> outcomes(items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      outcomes[i] = run_item(items[i], settings, answer_backend, judge_backend, evidence);
    }
  };
  const auto n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(settings.workers), items.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  std::sort(outcomes.begin(), outcomes.end(), [](const ItemOutcome& a, const ItemOutcome& b) {
    return a.result.item_id < b.result.item_id;
  });
  BenchOutcome bench;
  for (auto& o : outcomes) {
    bench.results.push_back(std::move(o.result));
    bench.records.push_back(std::move(o.record));
  }
  bench.report = aggregate(bench.results, items);
  return bench;
}

namespace {

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::string score_report_json(const ScoreReport& report, const BenchSettings& settings,
                              std::string_view answer_backend_id,
                              std::string_view judge_backend_id, double judge_temperature) {
  nlohmann::ordered_json j;
  j["mode"] = to_string(settings.mode);
  j["policy"] = settings.policy.fingerprint_text();
  j["n_items"] = report.n_items;
  j["n_failures"] = report.n_failures;
  j["overall_mean"] = optional_number(report.overall_mean);
  nlohmann::ordered_json per_cat = nlohmann::ordered_json::object();
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [c, mean] : report.per_category_mean) {
    per_cat[std::string(to_string(c))] = optional_number(mean);
    counts[std::string(to_string(c))] = report.per_category_count.at(c);
  }
  j["per_category_mean"] = per_cat;
  j["per_category_count"] = counts;
  j["overall_aggregation"] = "unweighted mean over parsed items";
  j["failure_rule"] = "unparseable or failed items excluded from means";
  j["answer_backend"] = answer_backend_id;
  j["judge_backend"] = judge_backend_id;
  j["judge_temperature"] = judge_temperature;
  return j.dump() + "\n";
}

std::string score_report_table(const ScoreReport& report) {
  auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *v);
    return std::string(buf);
  };
  std::string out = "category              n   mean\n";
  char line[96];
  for (const auto& [c, mean] : report.per_category_mean) {
    std::snprintf(line, sizeof line, "%-20s %3zu %6s\n", std::string(to_string(c)).c_str(),
                  report.per_category_count.at(c), cell(mean).c_str());
    out += line;
  }
  std::snprintf(line, sizeof line, "%-20s %3zu %6s\n", "All", report.n_items - report.n_failures,
                cell(report.overall_mean).c_str());
  out += line;
  std::snprintf(line, sizeof line, "items: %zu  failures: %zu\n", report.n_items,
                report.n_failures);
  out += line;
  return out;
}

std::string bench_records_jsonl(std::span<const BenchRecord> records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["item_id"] = r.item_id;
    j["category"] = to_string(r.category);
    j["mode"] = to_string(r.mode);
    if (r.score) {
      j["score"] = *r.score;
    } else {
      j["failure"] = r.failure;
    }
    j["prompt_fingerprint"] = r.prompt_fingerprint;
    j["answer_digest"] = r.answer_digest;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace protctx
