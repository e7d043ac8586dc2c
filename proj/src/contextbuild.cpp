#include "protctx/contextbuild.hpp"

#include "protctx/hash.hpp"

#include <stdexcept>

namespace protctx {

std::string_view to_string(ProtrekMode m) noexcept {
  switch (m) {
    case ProtrekMode::Conditional: return "conditional";
    case ProtrekMode::Always: return "always";
    case ProtrekMode::Never: return "never";
  }
  return "conditional";
}

ProtrekMode parse_protrek_mode(std::string_view s) {
  if (s == "conditional") return ProtrekMode::Conditional;
  if (s == "always") return ProtrekMode::Always;
  if (s == "never") return ProtrekMode::Never;
  throw std::invalid_argument("unknown protrek mode: " + std::string(s));
}

void ContextPolicy::validate() const {
  if (max_protrek_hits < 0) throw std::invalid_argument("max_protrek_hits must be >= 0");
  if (sparse_entry_threshold < 0) {
    throw std::invalid_argument("sparse_entry_threshold must be >= 0");
  }
}

std::string ContextPolicy::fingerprint_text() const {
  return std::string("protrek=") + std::string(to_string(protrek_mode)) +
         ";pfam=" + (include_pfam ? "1" : "0") + ";go=" + (include_go ? "1" : "0") +
         ";max_protrek=" + std::to_string(max_protrek_hits) +
         ";sparse=" + std::to_string(sparse_entry_threshold);
}

namespace {

std::string pfam_entry(const DomainHit& d) {
  std::string text = d.signature_description;
  if (text.empty() && d.interpro_description) text = *d.interpro_description;
  std::string entry = text.empty() ? d.signature_accession : d.signature_accession + ": " + text;
  // InterProScan GO cross-references stay with their domain.
  for (std::size_t i = 0; i < d.go_xrefs.size(); ++i) {
    entry += i == 0 ? " [" : ", ";
    entry += d.go_xrefs[i];
  }
  if (!d.go_xrefs.empty()) entry += ']';
  return entry;
}

}  // namespace

Context construct_context(const EvidenceProfile& profile, const ContextPolicy& policy) {
  policy.validate();
  Context ctx;
  if (policy.include_go && profile.top_homolog) {
    for (const auto& t : profile.top_homolog->go_terms) {
      ctx.go_entries.push_back({t.id, t.name, t.definition});
    }
  }
  if (policy.include_pfam) {
    for (const auto& d : profile.pfam_hits) ctx.pfam_entries.push_back(pfam_entry(d));
  }

  bool include_protrek = false;
  switch (policy.protrek_mode) {
    case ProtrekMode::Conditional: {
      const auto primary = ctx.go_entries.size() + ctx.pfam_entries.size();
      ctx.fallback_active = primary <= static_cast<std::size_t>(policy.sparse_entry_threshold);
      include_protrek = ctx.fallback_active;
      break;
    }
    case ProtrekMode::Always: include_protrek = true; break;
    case ProtrekMode::Never: include_protrek = false; break;
  }
  if (include_protrek) {
    const auto limit = static_cast<std::size_t>(policy.max_protrek_hits);
    for (const auto& h : profile.protrek_hits) {
      if (ctx.protrek_entries.size() >= limit) break;
      ctx.protrek_entries.push_back(h.description);
    }
  }
  return ctx;
}

std::string render_context(const Context& ctx) {
  std::string out;
  auto section_break = [&out] {
    if (!out.empty()) out += '\n';
  };
  if (!ctx.pfam_entries.empty()) {
    out += kPfamHeading;
    out += '\n';
    for (const auto& e : ctx.pfam_entries) {
      out += "- ";
      out += e;
      out += '\n';
    }
  }
  if (!ctx.go_entries.empty()) {
    section_break();
    out += kHomologyHeading;
    out += '\n';
    out += kHomologyLead;
    out += '\n';
    for (const auto& g : ctx.go_entries) {
      out += "- ";
      out += g.id;
      if (!g.name.empty()) out += " (" + g.name + ")";
      if (!g.definition.empty()) out += ": " + g.definition;
      out += '\n';
    }
  }
  if (!ctx.protrek_entries.empty()) {
    section_break();
    out += kProtrekHeading;
    out += '\n';
    for (const auto& e : ctx.protrek_entries) {
      out += "- ";
      out += e;
      out += '\n';
    }
  }
  return out;
}

std::string context_fingerprint(const Context& ctx) { return fnv1a64_hex(render_context(ctx)); }

std::string_view to_string(PromptMode m) noexcept {
  switch (m) {
    case PromptMode::ContextOnly: return "context_only";
    case PromptMode::SequenceOnly: return "sequence_only";
    case PromptMode::SequenceAndContext: return "sequence_and_context";
  }
  return "context_only";
}

PromptMode parse_prompt_mode(std::string_view s) {
  if (s == "context_only") return PromptMode::ContextOnly;
  if (s == "sequence_only") return PromptMode::SequenceOnly;
  if (s == "sequence_and_context") return PromptMode::SequenceAndContext;
  throw std::invalid_argument("unknown prompt mode: " + std::string(s));
}

namespace {

constexpr std::string_view kDelimiter = "---------\n";

}  // namespace

PromptText assemble_prompt(std::string_view question, PromptMode mode, const Context* ctx,
                           const ProteinRecord* sequence) {
  const bool wants_ctx = mode != PromptMode::SequenceOnly;
  const bool wants_seq = mode != PromptMode::ContextOnly;
  if (wants_ctx && !ctx) throw std::invalid_argument("prompt mode requires a context");
  if (wants_seq && !sequence) throw std::invalid_argument("prompt mode requires a sequence");

  std::string out;
  out += kSystemLine;
  out += "\n\n";
  out += kDelimiter;
  out += "\nQuestion:\n";
  out += question;
  out += "\n\n";
  out += kDelimiter;
  out += '\n';
  if (wants_ctx) {
    out += "Context Provided:\n\n";
    std::string body = render_context(*ctx);
    if (body.empty()) {
      out += kEmptyContextNote;
      out += '\n';
    } else {
      out += body;
    }
    if (wants_seq) out += '\n';
  }
  if (wants_seq) {
    out += "Sequence Provided:\n";
    out += sequence->sequence;
    out += '\n';
  }
  out += '\n';
  out += kDelimiter;
  out += "\nAnswer:\n";
  return {mode, std::move(out)};
}

}  // namespace protctx
