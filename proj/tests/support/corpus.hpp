#pragma once

// The three-protein context corpus under fixtures/ctx and its golden files.

#include "protctx/contextbuild.hpp"
#include "protctx/evidence.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace corpus {

struct Protein {
  protctx::ProteinRecord record;
  protctx::EvidenceProfile profile;
};

/// Parses every fixture file and builds one profile per FASTA record.
std::vector<Protein> load();

std::filesystem::path golden_dir();

/// Golden file name for a prompt of `accession` in `mode`.
std::string prompt_golden(const std::string& accession, protctx::PromptMode mode);

/// Compares `actual` with the golden file, or rewrites the golden file when
/// PROTCTX_UPDATE_GOLDENS is set. Returns an empty string on match, else a
/// short description of the first difference.
std::string check_golden(const std::string& name, const std::string& actual);

}  // namespace corpus
