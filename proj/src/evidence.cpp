#include "protctx/evidence.hpp"

#include "text_util.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace protctx {

using nlohmann::json;

namespace {

std::int64_t int_field(std::string_view field, const char* name, const std::string& source,
                       std::size_t line) {
  auto v = detail::parse_int<std::int64_t>(field);
  if (!v) throw ParseError(source, line, std::string("non-numeric ") + name + " field");
  return *v;
}

double real_field(std::string_view field, const char* name, const std::string& source,
                  std::size_t line) {
  auto v = detail::parse_double(field);
  if (!v || std::isnan(*v)) {
    throw ParseError(source, line, std::string("non-numeric ") + name + " field");
  }
  return *v;
}

bool is_dash(std::string_view s) { return detail::trim(s) == "-" || detail::trim(s).empty(); }

std::optional<std::string> optional_field(const std::vector<std::string_view>& fields,
                                          std::size_t index) {
  if (index >= fields.size() || is_dash(fields[index])) return std::nullopt;
  return std::string(detail::trim(fields[index]));
}

json parse_json_line(std::string_view line, const std::string& source, std::size_t line_no) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw ParseError(source, line_no, "malformed JSON");
  if (!j.is_object()) throw ParseError(source, line_no, "expected a JSON object");
  return j;
}

std::optional<std::string> optional_text(const json& j, const char* key, const std::string& source,
                                         std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ParseError(source, line_no, std::string(key) + " must be a string");
  auto s = it->get<std::string>();
  if (s.empty()) throw ParseError(source, line_no, std::string(key) + " must be non-empty");
  return s;
}

}  // namespace

std::vector<BlastHit> parse_blast_tab(std::string_view text, const std::string& source) {
  std::vector<BlastHit> hits;
  auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t ln = i + 1;
    std::string_view line = lines[i];
    if (detail::is_blank(line) || line.front() == '#') continue;
    auto f = detail::split(line, '\t');
    if (f.size() < 12) {
      throw ParseError(source, ln,
                       "expected 12 tab-separated columns, found " + std::to_string(f.size()));
    }
    BlastHit h;
    h.query_accession = std::string(detail::trim(f[0]));
    h.subject_accession = std::string(detail::trim(f[1]));
    if (h.query_accession.empty() || h.subject_accession.empty()) {
      throw ParseError(source, ln, "empty query or subject id");
    }
    h.percent_identity = real_field(f[2], "pident", source, ln);
    h.alignment_length = int_field(f[3], "length", source, ln);
    h.mismatches = int_field(f[4], "mismatch", source, ln);
    h.gap_opens = int_field(f[5], "gapopen", source, ln);
    h.query_start = int_field(f[6], "qstart", source, ln);
    h.query_end = int_field(f[7], "qend", source, ln);
    h.subject_start = int_field(f[8], "sstart", source, ln);
    h.subject_end = int_field(f[9], "send", source, ln);
    h.evalue = real_field(f[10], "evalue", source, ln);
    h.bitscore = real_field(f[11], "bitscore", source, ln);
    if (h.percent_identity < 0.0 || h.percent_identity > 100.0) {
      throw ParseError(source, ln, "pident outside [0, 100]");
    }
    if (h.evalue < 0.0) throw ParseError(source, ln, "negative evalue");
    if (h.query_start > h.query_end) throw ParseError(source, ln, "qstart > qend");
    hits.push_back(std::move(h));
  }
  return hits;
}

std::string canonical_accession(std::string_view id) {
  id = detail::trim(id);
  // UniProt FASTA style: db|ACCESSION|ENTRY_NAME
  if (auto bar = id.find('|'); bar != std::string_view::npos) {
    auto rest = id.substr(bar + 1);
    auto bar2 = rest.find('|');
    auto acc = rest.substr(0, bar2);
    if (!acc.empty()) return std::string(acc);
  }
  return std::string(id);
}

std::optional<BlastHit> select_top_homolog(std::span<const BlastHit> hits,
                                           std::string_view query_accession,
                                           std::optional<double> max_identity_cap) {
  const std::string query = canonical_accession(query_accession);
  const BlastHit* best = nullptr;
  for (const auto& h : hits) {
    if (canonical_accession(h.subject_accession) == query) continue;
    if (max_identity_cap && h.percent_identity / 100.0 > *max_identity_cap) continue;
    if (!best) {
      best = &h;
      continue;
    }
    if (h.evalue != best->evalue) {
      if (h.evalue < best->evalue) best = &h;
    } else if (h.bitscore != best->bitscore) {
      if (h.bitscore > best->bitscore) best = &h;
    } else if (h.subject_accession < best->subject_accession) {
      best = &h;
    }
  }
  if (!best) return std::nullopt;
  return *best;
}

std::vector<DomainHit> parse_interproscan_tsv(std::string_view text,
                                              const InterProScanOptions& options,
                                              const std::string& source) {
  std::vector<DomainHit> hits;
  auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t ln = i + 1;
    std::string_view line = lines[i];
    if (detail::is_blank(line) || line.front() == '#') continue;
    auto f = detail::split(line, '\t');
    if (f.size() < 8) {
      throw ParseError(source, ln,
                       "expected at least 8 tab-separated columns, found " +
                           std::to_string(f.size()));
    }
    DomainHit d;
    d.protein_accession = std::string(detail::trim(f[0]));
    d.analysis_name = std::string(detail::trim(f[3]));
    d.signature_accession = std::string(detail::trim(f[4]));
    if (d.signature_accession.empty() || d.signature_accession == "-") {
      throw ParseError(source, ln, "empty signature accession");
    }
    if (!is_dash(f[5])) d.signature_description = std::string(detail::trim(f[5]));
    d.start = int_field(f[6], "start", source, ln);
    d.stop = int_field(f[7], "stop", source, ln);
    if (d.start > d.stop) throw ParseError(source, ln, "start > stop");
    if (f.size() > 8 && !is_dash(f[8])) {
      if (auto v = detail::parse_double(f[8])) d.evalue = *v;
    }
    d.interpro_accession = optional_field(f, 11);
    d.interpro_description = optional_field(f, 12);
    if (auto go = optional_field(f, 13)) {
      for (auto token : detail::split(*go, '|')) {
        token = detail::trim(token);
        if (token.empty()) continue;
        // Newer releases annotate the source, e.g. GO:0005524(InterPro).
        if (auto paren = token.find('('); paren != std::string_view::npos) {
          token = token.substr(0, paren);
        }
        if (!is_go_id(token)) {
          throw ParseError(source, ln, "malformed GO id '" + std::string(token) + "'");
        }
        std::string id(token);
        if (std::find(d.go_xrefs.begin(), d.go_xrefs.end(), id) == d.go_xrefs.end()) {
          d.go_xrefs.push_back(std::move(id));
        }
      }
    }
    d.allowed_analysis = options.allowed_analyses.contains(d.analysis_name);
    hits.push_back(std::move(d));
  }
  return hits;
}

bool is_go_id(std::string_view id) noexcept {
  if (id.size() != 10 || id.substr(0, 3) != "GO:") return false;
  return std::all_of(id.begin() + 3, id.end(), [](char c) { return c >= '0' && c <= '9'; });
}

void GoStore::insert(GoTerm term) {
  std::string key = term.id;
  terms_.insert_or_assign(std::move(key), std::move(term));
}

const GoTerm* GoStore::find(std::string_view id) const {
  auto it = terms_.find(id);
  return it == terms_.end() ? nullptr : &it->second;
}

GoStore parse_go_tsv(std::string_view text, const std::string& source) {
  GoStore store;
  auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t ln = i + 1;
    std::string_view line = lines[i];
    if (detail::is_blank(line) || line.front() == '#') continue;
    auto f = detail::split(line, '\t');
    if (f.size() != 3) {
      throw ParseError(source, ln, "expected id<TAB>name<TAB>definition");
    }
    GoTerm t{std::string(detail::trim(f[0])), std::string(detail::trim(f[1])),
             std::string(detail::trim(f[2]))};
    if (!is_go_id(t.id)) throw ParseError(source, ln, "malformed GO id '" + t.id + "'");
    if (t.name.empty()) throw ParseError(source, ln, "empty GO term name");
    if (store.find(t.id)) {
      spdlog::warn("{}:{}: duplicate GO id {}, keeping the later entry", source, ln, t.id);
    }
    store.insert(std::move(t));
  }
  return store;
}

std::vector<SemanticHit> load_protrek_results(std::string_view text, const std::string& source) {
  std::vector<SemanticHit> hits;
  auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t ln = i + 1;
    if (detail::is_blank(lines[i])) continue;
    json j = parse_json_line(lines[i], source, ln);
    auto desc = j.find("description");
    if (desc == j.end() || !desc->is_string()) {
      throw ParseError(source, ln, "missing string field \"description\"");
    }
    auto score = j.find("score");
    if (score == j.end() || !score->is_number()) {
      throw ParseError(source, ln, "missing numeric field \"score\"");
    }
    SemanticHit h{desc->get<std::string>(), score->get<double>()};
    if (detail::is_blank(h.description)) throw ParseError(source, ln, "empty description");
    hits.push_back(std::move(h));
  }
  return hits;
}

void AnnotationDB::insert(std::string accession, AnnotationEntry entry) {
  entries_.insert_or_assign(std::move(accession), std::move(entry));
}

const AnnotationEntry* AnnotationDB::find(std::string_view accession) const {
  if (observer_) observer_(accession);
  auto it = entries_.find(accession);
  return it == entries_.end() ? nullptr : &it->second;
}

bool AnnotationDB::contains(std::string_view accession) const {
  return find(accession) != nullptr;
}

AnnotationDB parse_annotation_db(std::string_view text, const std::string& source) {
  AnnotationDB db;
  auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t ln = i + 1;
    if (detail::is_blank(lines[i])) continue;
    json j = parse_json_line(lines[i], source, ln);
    auto acc = j.find("accession");
    if (acc == j.end() || !acc->is_string() || acc->get<std::string>().empty()) {
      throw ParseError(source, ln, "missing string field \"accession\"");
    }
    AnnotationEntry e;
    if (auto go = j.find("go_ids"); go != j.end() && !go->is_null()) {
      if (!go->is_array()) throw ParseError(source, ln, "go_ids must be an array");
      for (const auto& g : *go) {
        if (!g.is_string() || !is_go_id(g.get<std::string>())) {
          throw ParseError(source, ln, "malformed GO id in go_ids");
        }
        e.go_ids.push_back(g.get<std::string>());
      }
    }
    e.function_text = optional_text(j, "function", source, ln);
    e.pathway_text = optional_text(j, "pathway", source, ln);
    e.subcellular_text = optional_text(j, "subcellular_location", source, ln);
    if (auto y = j.find("year"); y != j.end() && !y->is_null()) {
      if (!y->is_number_integer()) throw ParseError(source, ln, "year must be an integer");
      e.first_publication_year = y->get<int>();
    }
    std::string key = acc->get<std::string>();
    if (db.entries().contains(key)) {
      throw ParseError(source, ln, "duplicate accession " + key);
    }
    db.insert(std::move(key), std::move(e));
  }
  return db;
}

std::string write_annotation_db(const AnnotationDB& db) {
  std::string out;
  for (const auto& [acc, e] : db.entries()) {
    nlohmann::ordered_json j;
    j["accession"] = acc;
    j["go_ids"] = e.go_ids;
    if (e.function_text) j["function"] = *e.function_text;
    if (e.pathway_text) j["pathway"] = *e.pathway_text;
    if (e.subcellular_text) j["subcellular_location"] = *e.subcellular_text;
    if (e.first_publication_year) j["year"] = *e.first_publication_year;
    out += j.dump();
    out += '\n';
  }
  return out;
}

TransferredGo transfer_go(const BlastHit& hit, const AnnotationDB& db, const GoStore& store) {
  const std::string subject = canonical_accession(hit.subject_accession);
  const AnnotationEntry* entry = db.find(subject);
  if (!entry) throw Error("homolog " + subject + " has no annotation entry");

  std::vector<std::string> ids = entry->go_ids;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  TransferredGo out;
  for (const auto& id : ids) {
    if (const GoTerm* t = store.find(id)) {
      out.terms.push_back(*t);
    } else {
      out.terms.push_back({id, "unknown term", ""});
      out.unresolved.push_back(id);
    }
  }
  return out;
}

namespace {

std::string format_real(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

EvidenceProfile build_profile(const ProteinRecord& record, std::span<const BlastHit> blast,
                              std::span<const DomainHit> domains,
                              std::span<const SemanticHit> protrek, const AnnotationDB& db,
                              const GoStore& store, std::optional<double> max_identity_cap) {
  EvidenceProfile p;
  p.query_accession = record.accession;
  const std::string query = canonical_accession(record.accession);

  for (const auto& d : domains) {
    if (canonical_accession(d.protein_accession) != query) continue;
    (d.allowed_analysis ? p.pfam_hits : p.other_hits).push_back(d);
  }
  auto by_position = [](const DomainHit& a, const DomainHit& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.stop != b.stop) return a.stop < b.stop;
    return a.signature_accession < b.signature_accession;
  };
  std::stable_sort(p.pfam_hits.begin(), p.pfam_hits.end(), by_position);
  std::stable_sort(p.other_hits.begin(), p.other_hits.end(), by_position);
  if (!p.pfam_hits.empty()) {
    p.provenance_notes.push_back("Pfam: " + std::to_string(p.pfam_hits.size()) + " domain hit(s)");
  }

  const auto self_hits = std::count_if(blast.begin(), blast.end(), [&](const BlastHit& h) {
    return canonical_accession(h.subject_accession) == query;
  });
  if (self_hits > 0) {
    p.provenance_notes.push_back("homology: excluded " + std::to_string(self_hits) +
                                 " self-hit(s)");
  }
  if (auto top = select_top_homolog(blast, record.accession, max_identity_cap)) {
    auto go = transfer_go(*top, db, store);
    p.provenance_notes.push_back("homology: top homolog " + top->subject_accession + " (evalue " +
                                 format_real(top->evalue) + ", identity " +
                                 format_real(top->percent_identity) + "%), " +
                                 std::to_string(go.terms.size()) + " GO term(s)");
    for (const auto& id : go.unresolved) {
      p.provenance_notes.push_back("homology: GO id " + id + " not in vocabulary");
    }
    p.top_homolog = HomologEvidence{*top, std::move(go.terms)};
  }

  p.protrek_hits.assign(protrek.begin(), protrek.end());
  if (!p.protrek_hits.empty()) {
    p.provenance_notes.push_back("ProTrek: " + std::to_string(p.protrek_hits.size()) +
                                 " semantic hit(s)");
  }
  return p;
}

}  // namespace protctx
