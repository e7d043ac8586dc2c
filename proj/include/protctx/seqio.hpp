#pragma once

#include "protctx/error.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace protctx {

/// One FASTA entry. `accession` is the first whitespace-delimited token of the
/// header line, `description` the (trimmed) remainder.
struct ProteinRecord {
  std::string accession;
  std::string description;
  std::string sequence;

  bool operator==(const ProteinRecord&) const = default;
};

/// Residue codes accepted in a sequence: the 20 standard amino acids plus
/// the ambiguity and rare codes X, B, Z, U, O, J. Uppercase only.
bool is_residue_code(char c) noexcept;

struct SequenceViolation {
  enum class Kind { Empty, InvalidResidue };
  Kind kind = Kind::Empty;
  std::size_t offset = 0;  // 0-based; meaningful for InvalidResidue
  char residue = '\0';

  bool operator==(const SequenceViolation&) const = default;
};

/// Returns the first violation, or nullopt when `seq` is a valid sequence.
std::optional<SequenceViolation> validate_sequence(std::string_view seq) noexcept;

enum class DuplicatePolicy {
  Strict,   // a repeated accession is an error
  Lenient,  // later repeats are renamed ACC#2, ACC#3, ...
};

/// Raised for sequence-level problems; carries the offending record.
class FastaError : public ParseError {
 public:
  FastaError(std::string source, std::size_t line, std::string accession,
             std::optional<std::size_t> offset, const std::string& message);

  const std::string& accession() const noexcept { return accession_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }

 private:
  std::string accession_;
  std::optional<std::size_t> offset_;
};

/// Whole-text FASTA parse. LF and CRLF line endings are accepted, wrapped
/// sequence lines are joined and residues uppercased.
std::vector<ProteinRecord> parse_fasta(std::string_view text,
                                       DuplicatePolicy duplicates = DuplicatePolicy::Strict,
                                       const std::string& source = "<fasta>");

/// Emits LF-terminated FASTA with sequence lines wrapped at `width`.
/// Throws std::invalid_argument when width is 0.
std::string write_fasta(std::span<const ProteinRecord> records, std::size_t width = 60);

}  // namespace protctx
