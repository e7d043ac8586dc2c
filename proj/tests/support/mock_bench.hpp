#pragma once

// A six-item benchmark wired to mock backends with known judge scores.

#include "protctx/backend.hpp"
#include "protctx/llmjudge.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mock_bench {

/// In-memory evidence: contexts and sequences by accession.
class MapEvidence final : public protctx::EvidenceSource {
 public:
  std::map<std::string, protctx::Context> contexts;
  std::map<std::string, protctx::ProteinRecord> sequences;

  std::optional<protctx::Context> context_for(const std::string& accession,
                                              const protctx::ContextPolicy&) override;
  std::optional<protctx::ProteinRecord> sequence_for(const std::string& accession) override;
};

struct Setup {
  std::vector<protctx::BenchmarkItem> items;
  MapEvidence evidence;
  std::unique_ptr<protctx::MockBackend> answer;
  std::unique_ptr<protctx::MockBackend> judge;
  /// item_id -> score the judge fixture encodes (nullopt: unparseable reply).
  std::map<std::string, std::optional<int>> expected;
};

/// Six items over three accessions. `broken_item`, when given, receives an
/// unparseable judge reply.
Setup make(protctx::PromptMode mode, const std::string& broken_item = "");

}  // namespace mock_bench
