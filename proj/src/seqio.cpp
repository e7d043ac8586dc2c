#include "protctx/seqio.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <unordered_map>

namespace protctx {

FastaError::FastaError(std::string source, std::size_t line, std::string accession,
                       std::optional<std::size_t> offset, const std::string& message)
    : ParseError(std::move(source), line, message),
      accession_(std::move(accession)),
      offset_(offset) {}

bool is_residue_code(char c) noexcept {
  switch (c) {
    case 'A': case 'C': case 'D': case 'E': case 'F': case 'G': case 'H':
    case 'I': case 'K': case 'L': case 'M': case 'N': case 'P': case 'Q':
    case 'R': case 'S': case 'T': case 'V': case 'W': case 'Y':
    case 'X': case 'B': case 'Z': case 'U': case 'O': case 'J':
      return true;
    default:
      return false;
  }
}

std::optional<SequenceViolation> validate_sequence(std::string_view seq) noexcept {
  if (seq.empty()) return SequenceViolation{SequenceViolation::Kind::Empty, 0, '\0'};
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!is_residue_code(seq[i])) {
      return SequenceViolation{SequenceViolation::Kind::InvalidResidue, i, seq[i]};
    }
  }
  return std::nullopt;
}

namespace {

struct PendingRecord {
  ProteinRecord record;
  std::size_t header_line = 0;
  // (line number, offset in joined sequence where the line starts)
  std::vector<std::pair<std::size_t, std::size_t>> line_starts;
};

std::string describe_char(char c) {
  if (std::isprint(static_cast<unsigned char>(c))) return std::string("'") + c + "'";
  return "byte 0x" + std::to_string(static_cast<unsigned char>(c));
}

void finish(PendingRecord& pending, const std::string& source, DuplicatePolicy duplicates,
            std::unordered_map<std::string, std::size_t>& seen,
            std::vector<ProteinRecord>& out) {
  auto& rec = pending.record;
  if (auto v = validate_sequence(rec.sequence)) {
    if (v->kind == SequenceViolation::Kind::Empty) {
      throw FastaError(source, pending.header_line, rec.accession, std::nullopt,
                       "record " + rec.accession + " has an empty sequence");
    }
    std::size_t line = pending.header_line;
    for (auto [ln, start] : pending.line_starts) {
      if (start <= v->offset) line = ln;
    }
    throw FastaError(source, line, rec.accession, v->offset,
                     "record " + rec.accession + ": invalid residue " +
                         describe_char(v->residue) + " at offset " +
                         std::to_string(v->offset));
  }
  auto [it, inserted] = seen.try_emplace(rec.accession, 1);
  if (!inserted) {
    if (duplicates == DuplicatePolicy::Strict) {
      throw FastaError(source, pending.header_line, rec.accession, std::nullopt,
                       "duplicate accession " + rec.accession);
    }
    std::string renamed;
    do {
      renamed = rec.accession + "#" + std::to_string(++it->second);
    } while (seen.contains(renamed));
    seen.emplace(renamed, 1);
    rec.accession = std::move(renamed);
  }
  out.push_back(std::move(rec));
}

}  // namespace

std::vector<ProteinRecord> parse_fasta(std::string_view text, DuplicatePolicy duplicates,
                                       const std::string& source) {
  std::vector<ProteinRecord> records;
  std::unordered_map<std::string, std::size_t> seen;
  std::optional<PendingRecord> pending;
  auto lines = detail::split_lines(text);

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    std::string_view line = lines[i];
    if (!line.empty() && line.front() == '>') {
      if (pending) finish(*pending, source, duplicates, seen, records);
      std::string_view header = detail::trim(line.substr(1));
      std::size_t ws = 0;
      while (ws < header.size() && !detail::is_space(header[ws])) ++ws;
      if (ws == 0) throw ParseError(source, line_no, "header with empty accession");
      pending.emplace();
      pending->header_line = line_no;
      pending->record.accession = std::string(header.substr(0, ws));
      pending->record.description = std::string(detail::trim(header.substr(ws)));
      continue;
    }
    std::string_view residues = detail::trim(line);
    if (residues.empty()) continue;
    if (!pending) throw ParseError(source, line_no, "sequence data before first header");
    auto& seq = pending->record.sequence;
    pending->line_starts.emplace_back(line_no, seq.size());
    for (char c : residues) {
      seq.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  }
  if (pending) finish(*pending, source, duplicates, seen, records);

  return records;
}

std::string write_fasta(std::span<const ProteinRecord> records, std::size_t width) {
  if (width == 0) throw std::invalid_argument("write_fasta: line width must be positive");
  std::string out;
  for (const auto& rec : records) {
    out += '>';
    out += rec.accession;
    if (!rec.description.empty()) {
      out += ' ';
      out += rec.description;
    }
    out += '\n';
    for (std::size_t pos = 0; pos < rec.sequence.size(); pos += width) {
      out.append(rec.sequence, pos, width);
      out += '\n';
    }
  }
  return out;
}

}  // namespace protctx
