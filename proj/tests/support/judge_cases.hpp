#pragma once

// Adjudicator replies and the score each must parse to (nullopt = failure).

#include <optional>
#include <string>
#include <vector>

namespace judge_cases {

struct Case {
  std::string reply;
  std::optional<int> expected;
};

inline const std::vector<Case>& all() {
  static const std::vector<Case> cases = {
      {R"({"score": 85})", 85},
      {R"({"score":85})", 85},
      {R"({'score': 70})", 70},
      {"```json\n{\"score\": 92}\n```", 92},
      {"Here is my evaluation.\n{\"score\": 40}\nThe paragraph misses the pathway.", 40},
      {R"({"reasoning": "mostly right", "score": 55, "confidence": 0.9})", 55},
      {R"({"result": {"score": 64}})", 64},
      {R"({"score": 87.5})", 88},
      {R"({"score": 87.4})", 87},
      {R"({"score": 0.5})", 1},
      {R"({"score": 150})", 100},
      {R"({"score": -5})", 0},
      {"Score: 66", 66},
      {R"({"SCORE": 12})", 12},
      {R"({"score": "75"})", 75},
      {"score = 81", 81},
      {R"({"score": 30} and later {"score": 90})", 30},
      {"no number given", std::nullopt},
      {"", std::nullopt},
      {R"({"score": null})", std::nullopt},
      {R"({"scores": 50})", std::nullopt},
      {"my_score: 5", std::nullopt},
  };
  return cases;
}

}  // namespace judge_cases
