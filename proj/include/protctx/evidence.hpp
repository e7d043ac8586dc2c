#pragma once

#include "protctx/error.hpp"
#include "protctx/seqio.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace protctx {

// ---- BLAST -----------------------------------------------------------------

/// One row of BLAST tabular output (outfmt 6, the 12 standard columns).
struct BlastHit {
  std::string query_accession;
  std::string subject_accession;
  double percent_identity = 0.0;
  std::int64_t alignment_length = 0;
  std::int64_t mismatches = 0;
  std::int64_t gap_opens = 0;
  std::int64_t query_start = 0;
  std::int64_t query_end = 0;
  std::int64_t subject_start = 0;
  std::int64_t subject_end = 0;
  double evalue = 0.0;
  double bitscore = 0.0;

  bool operator==(const BlastHit&) const = default;
};

std::vector<BlastHit> parse_blast_tab(std::string_view text,
                                      const std::string& source = "<blast>");

/// Strips database decorations from sequence ids: "sp|P12345|NAME_HUMAN"
/// becomes "P12345". Plain ids are returned unchanged.
std::string canonical_accession(std::string_view id);

/// Best non-self hit by (lowest e-value, highest bitscore, subject id).
/// Hits whose identity fraction exceeds `max_identity_cap` are dropped.
std::optional<BlastHit> select_top_homolog(std::span<const BlastHit> hits,
                                           std::string_view query_accession,
                                           std::optional<double> max_identity_cap = std::nullopt);

// ---- InterProScan ----------------------------------------------------------

struct DomainHit {
  std::string protein_accession;
  std::string analysis_name;
  std::string signature_accession;
  std::string signature_description;
  std::int64_t start = 0;
  std::int64_t stop = 0;
  std::optional<double> evalue;
  std::optional<std::string> interpro_accession;
  std::optional<std::string> interpro_description;
  std::vector<std::string> go_xrefs;
  bool allowed_analysis = true;  // analysis is on the configured allow-list

  bool operator==(const DomainHit&) const = default;
};

struct InterProScanOptions {
  std::set<std::string> allowed_analyses{"Pfam"};
};

std::vector<DomainHit> parse_interproscan_tsv(std::string_view text,
                                              const InterProScanOptions& options = {},
                                              const std::string& source = "<interproscan>");

// ---- Gene Ontology ---------------------------------------------------------

/// True for "GO:" followed by exactly seven digits.
bool is_go_id(std::string_view id) noexcept;

struct GoTerm {
  std::string id;
  std::string name;
  std::string definition;

  bool operator==(const GoTerm&) const = default;
};

class GoStore {
 public:
  /// Replaces an existing entry with the same id.
  void insert(GoTerm term);
  const GoTerm* find(std::string_view id) const;
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  const std::map<std::string, GoTerm, std::less<>>& terms() const noexcept { return terms_; }

 private:
  std::map<std::string, GoTerm, std::less<>> terms_;
};

/// id<TAB>name<TAB>definition per line. A repeated id replaces the earlier
/// entry and logs a warning.
GoStore parse_go_tsv(std::string_view text, const std::string& source = "<go>");

// ---- ProTrek ---------------------------------------------------------------

struct SemanticHit {
  std::string description;
  double score = 0.0;

  bool operator==(const SemanticHit&) const = default;
};

/// JSON-lines, one {"description": ..., "score": ...} object per line.
std::vector<SemanticHit> load_protrek_results(std::string_view text,
                                              const std::string& source = "<protrek>");

// ---- annotation database ---------------------------------------------------

struct AnnotationEntry {
  std::vector<std::string> go_ids;
  std::optional<std::string> function_text;
  std::optional<std::string> pathway_text;
  std::optional<std::string> subcellular_text;
  std::optional<int> first_publication_year;

  bool operator==(const AnnotationEntry&) const = default;
};

/// Curated per-accession annotations. Lookups through find() are reported to
/// an optional observer so callers can audit which records were consulted.
class AnnotationDB {
 public:
  using AccessObserver = std::function<void(std::string_view accession)>;

  void insert(std::string accession, AnnotationEntry entry);
  const AnnotationEntry* find(std::string_view accession) const;
  bool contains(std::string_view accession) const;
  std::size_t size() const noexcept { return entries_.size(); }

  /// Ordered iteration for bulk consumers such as dataset construction.
  /// Does not notify the observer.
  const std::map<std::string, AnnotationEntry, std::less<>>& entries() const noexcept {
    return entries_;
  }

  /// The observer must be safe to call concurrently if the database is shared.
  void set_access_observer(AccessObserver observer) { observer_ = std::move(observer); }

 private:
  std::map<std::string, AnnotationEntry, std::less<>> entries_;
  AccessObserver observer_;
};

/// JSON-lines with fields accession, go_ids, function, pathway,
/// subcellular_location, year (absent fields omitted).
AnnotationDB parse_annotation_db(std::string_view text, const std::string& source = "<annotations>");
std::string write_annotation_db(const AnnotationDB& db);

// ---- profile assembly ------------------------------------------------------

struct TransferredGo {
  std::vector<GoTerm> terms;            // sorted by id, no duplicates
  std::vector<std::string> unresolved;  // ids missing from the GoStore
};

/// GO annotations of the hit's subject, resolved through `store`. Unknown ids
/// are kept with the name "unknown term". Throws Error if the subject has no
/// annotation entry.
TransferredGo transfer_go(const BlastHit& hit, const AnnotationDB& db, const GoStore& store);

struct HomologEvidence {
  BlastHit hit;
  std::vector<GoTerm> go_terms;

  bool operator==(const HomologEvidence&) const = default;
};

struct EvidenceProfile {
  std::string query_accession;
  std::vector<DomainHit> pfam_hits;   // allow-listed analyses, by position
  std::vector<DomainHit> other_hits;  // retained, not rendered by default
  std::optional<HomologEvidence> top_homolog;
  std::vector<SemanticHit> protrek_hits;
  std::vector<std::string> provenance_notes;

  bool operator==(const EvidenceProfile&) const = default;
};

/// Merges per-protein tool outputs. Only the homolog's annotation entry is
/// read from `db`; the query's own entry is never consulted.
EvidenceProfile build_profile(const ProteinRecord& record, std::span<const BlastHit> blast,
                              std::span<const DomainHit> domains,
                              std::span<const SemanticHit> protrek, const AnnotationDB& db,
                              const GoStore& store,
                              std::optional<double> max_identity_cap = std::nullopt);

}  // namespace protctx
