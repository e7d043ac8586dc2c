#pragma once

#include "protctx/evidence.hpp"
#include "protctx/seqio.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace protctx {

enum class ProtrekMode { Conditional, Always, Never };

std::string_view to_string(ProtrekMode m) noexcept;
ProtrekMode parse_protrek_mode(std::string_view s);

struct ContextPolicy {
  ProtrekMode protrek_mode = ProtrekMode::Conditional;
  bool include_pfam = true;
  bool include_go = true;
  int max_protrek_hits = 3;
  /// Conditional mode falls back to ProTrek when the GO and Pfam sections
  /// together hold at most this many entries. 0 means "both empty".
  int sparse_entry_threshold = 0;

  /// Throws std::invalid_argument on negative counts.
  void validate() const;
  /// Canonical one-line encoding, used in cache keys.
  std::string fingerprint_text() const;
};

struct GoEntry {
  std::string id;
  std::string name;
  std::string definition;

  bool operator==(const GoEntry&) const = default;
};

/// Hierarchical textual context for one protein.
struct Context {
  std::vector<std::string> pfam_entries;
  std::vector<GoEntry> go_entries;
  std::vector<std::string> protrek_entries;
  bool fallback_active = false;

  bool empty() const noexcept {
    return pfam_entries.empty() && go_entries.empty() && protrek_entries.empty();
  }
  bool operator==(const Context&) const = default;
};

/// Homolog GO terms first in priority, Pfam domains second, ProTrek only as
/// a fallback under the conditional policy.
Context construct_context(const EvidenceProfile& profile, const ContextPolicy& policy);

inline constexpr std::string_view kPfamHeading = "Conserved Domains (from Pfam):";
inline constexpr std::string_view kHomologyHeading =
    "Functional Annotations (from Homology via BLASTp):";
inline constexpr std::string_view kHomologyLead = "- GO terms associated with the homolog:";
inline constexpr std::string_view kProtrekHeading = "Fallback Semantic Analysis (from ProTrek):";

/// Sections in fixed order (Pfam, homology GO, ProTrek); empty sections are
/// omitted, so an empty context renders as "".
std::string render_context(const Context& ctx);

/// fnv1a64 of the rendered bytes as 16 hex digits.
std::string context_fingerprint(const Context& ctx);

enum class PromptMode { ContextOnly, SequenceOnly, SequenceAndContext };

std::string_view to_string(PromptMode m) noexcept;
PromptMode parse_prompt_mode(std::string_view s);

struct PromptText {
  PromptMode mode = PromptMode::ContextOnly;
  std::string text;

  bool operator==(const PromptText&) const = default;
};

/// Bumped whenever the prompt or context layout changes; part of cache keys.
inline constexpr std::string_view kPromptTemplateVersion = "prompt-v1";

inline constexpr std::string_view kSystemLine =
    "You are a senior systems biologist. Analyze the input information to answer the given "
    "question.";
inline constexpr std::string_view kEmptyContextNote = "No structured evidence is available.";

/// Builds the inference prompt. Throws std::invalid_argument if the inputs
/// required by `mode` are missing.
PromptText assemble_prompt(std::string_view question, PromptMode mode,
                           const Context* ctx, const ProteinRecord* sequence);

}  // namespace protctx
