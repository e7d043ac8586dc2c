#include "corpus.hpp"
#include "judge_cases.hpp"
#include "mock_bench.hpp"
#include "protctx/llmjudge.hpp"

#include <doctest.h>

using namespace protctx;

TEST_CASE("judge prompt matches the golden template") {
  CHECK(corpus::check_golden("judge_prompt.txt",
                             build_judge_prompt("{ground_truth}", "{generated}")) == "");
  const auto p = build_judge_prompt("FACTS", "PARA");
  CHECK(p.find("FACTS") < p.find("PARA"));
  CHECK(p.ends_with("PARA\n"));
}

TEST_CASE("extract_score robustness suite") {
  for (const auto& c : judge_cases::all()) {
    INFO("reply: ", c.reply);
    CHECK(extract_score(c.reply) == c.expected);
  }
}

TEST_CASE("judge records failures instead of throwing") {
  MockBackend backend({}, MockMissPolicy::Echo);
  backend.add(prompt_digest(build_judge_prompt("gt", "good")), R"({"score": 91})");
  auto r = judge("i1", "good", "gt", backend);
  CHECK(r.ok());
  CHECK(r.score == 91);
  CHECK(r.raw_judge_text == R"({"score": 91})");

  r = judge("i2", "other", "gt", backend);
  CHECK_FALSE(r.ok());
  CHECK(r.failure == "judge: unparseable score");

  r = judge("i3", "", "gt", backend);
  CHECK_FALSE(r.ok());

  MockBackend strict({}, MockMissPolicy::Error);
  r = judge("i4", "x", "gt", strict);
  CHECK_FALSE(r.ok());
  CHECK(r.failure.starts_with("judge: "));
}

TEST_CASE("aggregate by hand") {
  std::vector<BenchmarkItem> items(5);
  const Category cats[] = {Category::Function, Category::Function, Category::Pathway,
                           Category::Pathway, Category::SubcellularLocation};
  for (int i = 0; i < 5; ++i) {
    items[i].item_id = "i" + std::to_string(i);
    items[i].category = cats[i];
  }
  std::vector<JudgeResult> results = {
      {"i0", 80, "", ""}, {"i1", 91, "", ""}, {"i2", 70, "", ""},
      {"i3", std::nullopt, "", "judge: unparseable score"}, {"i4", 50, "", ""}};
  const auto rep = aggregate(results, items);
  CHECK(rep.n_items == 5);
  CHECK(rep.n_failures == 1);
  // (80 + 91 + 70 + 50) / 4
  CHECK(*rep.overall_mean == doctest::Approx(72.75).epsilon(1e-15));
  CHECK(*rep.per_category_mean.at(Category::Function) == doctest::Approx(85.5));
  CHECK(*rep.per_category_mean.at(Category::Pathway) == doctest::Approx(70.0));
  CHECK(rep.per_category_count.at(Category::Pathway) == 1);
  CHECK(*rep.per_category_mean.at(Category::SubcellularLocation) == doctest::Approx(50.0));

  std::reverse(results.begin(), results.end());
  CHECK(aggregate(results, items) == rep);

  results.push_back({"nope", 1, "", ""});
  CHECK_THROWS_AS(aggregate(results, items), std::invalid_argument);

  const auto none = aggregate({}, items);
  CHECK_FALSE(none.overall_mean.has_value());
  CHECK_FALSE(none.per_category_mean.at(Category::Function).has_value());
}

TEST_CASE("mock benchmark is deterministic and matches hand arithmetic") {
  for (auto mode : {PromptMode::ContextOnly, PromptMode::SequenceOnly,
                    PromptMode::SequenceAndContext}) {
    std::string reports[2];
    for (int run = 0; run < 2; ++run) {
      auto s = mock_bench::make(mode);
      const BenchSettings settings{mode, ContextPolicy{}, run == 0 ? 1 : 4};
      const auto out = run_benchmark(s.items, settings, *s.answer, *s.judge, s.evidence);
      REQUIRE(out.results.size() == 6);
      for (const auto& r : out.results) CHECK(r.score == s.expected.at(r.item_id));
      // 80 + 90 + 70 + 65 + 60 + 76 = 441 over 6 items.
      CHECK(*out.report.overall_mean == doctest::Approx(441.0 / 6.0).epsilon(1e-15));
      CHECK(*out.report.per_category_mean.at(Category::Function) == doctest::Approx(75.0));
      CHECK(*out.report.per_category_mean.at(Category::SubcellularLocation) ==
            doctest::Approx(70.5));
      reports[run] = bench_records_jsonl(out.records) +
                     score_report_json(out.report, settings, "a", "j", 0.0) +
                     score_report_table(out.report);
    }
    CHECK(reports[0] == reports[1]);
  }
}

TEST_CASE("benchmark failures are per item") {
  auto s = mock_bench::make(PromptMode::ContextOnly, "Q00002:Function");
  s.evidence.contexts.erase("Q00003");
  const BenchSettings settings{PromptMode::ContextOnly, ContextPolicy{}, 2};
  const auto out = run_benchmark(s.items, settings, *s.answer, *s.judge, s.evidence);
  CHECK(out.report.n_items == 6);
  CHECK(out.report.n_failures == 3);
  CHECK(*out.report.overall_mean == doctest::Approx((80 + 90 + 65) / 3.0));
  for (const auto& rec : out.records) {
    if (rec.item_id.starts_with("Q00003")) {
      CHECK(rec.failure == "missing context for Q00003");
      CHECK(rec.prompt_fingerprint.empty());
    }
  }
  const auto jsonl = bench_records_jsonl(out.records);
  CHECK(jsonl.find("\"failure\":\"judge: unparseable score\"") != std::string::npos);

  const BenchSettings bad{PromptMode::ContextOnly, ContextPolicy{}, 0};
  CHECK_THROWS_AS(run_benchmark(s.items, bad, *s.answer, *s.judge, s.evidence), ConfigError);
}

TEST_CASE("score report renderings") {
  auto s = mock_bench::make(PromptMode::ContextOnly);
  const BenchSettings settings{PromptMode::ContextOnly, ContextPolicy{}, 1};
  const auto out = run_benchmark(s.items, settings, *s.answer, *s.judge, s.evidence);
  const auto json = score_report_json(out.report, settings, "mock-answer", "mock-judge", 0.0);
  CHECK(json.starts_with("{\"mode\":\"context_only\""));
  CHECK(json.ends_with("}\n"));
  CHECK(json.find("\"overall_mean\":73.5") != std::string::npos);
  const auto table = score_report_table(out.report);
  CHECK(table.find("All                    6  73.50") != std::string::npos);
}

TEST_CASE("mock backend fixtures") {
  const auto fx = parse_mock_fixtures("{\"digest\":\"ab\",\"response\":\"r\"}\n");
  CHECK(fx.at("ab") == "r");
  CHECK_THROWS_AS(parse_mock_fixtures("{\"digest\":\"ab\"}\n"), ParseError);
  MockBackend m(fx, MockMissPolicy::Echo);
  const PromptText p{PromptMode::ContextOnly, "hello"};
  CHECK(m.complete(p).response_text == MockBackend::placeholder(prompt_digest("hello")));
  CHECK(m.complete(p).prompt_digest == prompt_digest("hello"));
}

TEST_CASE("backend configuration validation") {
  BackendConfig c;
  CHECK_NOTHROW(c.validate());
  c.kind = BackendKind::Http;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.endpoint_url = "http://127.0.0.1:1/v1/chat/completions";
  c.model_name = "m";
  CHECK_NOTHROW(c.validate());
  c.temperature = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}
