#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "roles/semantic_groups.hpp"

namespace misengine {

// Maps PropBank-style labels onto configured roles. Labels that are valid
// PropBank labels but not mapped are ignored; anything else is rejected.
struct SrlLabelMap {
  std::map<std::string, std::string> label_to_role{
      {"V", std::string(kPredicate)}, {"ARGM-PRT", std::string(kPredicate)}, {"ARG1", std::string(kObject)}};

  static SrlLabelMap parse(const std::string& spec);  // "V=Predicate,ARG1=Object"
};

struct SrlImportResult {
  std::vector<SemanticGroups> parses;
  std::size_t entries = 0;
  std::size_t rejected = 0;
  std::vector<std::string> warnings;
};

// Line-delimited entries, one per description. Accepted shapes:
//   {"description": s, "spans": {"V": [b, e), "ARG1": [b, e)}}   (half-open token ranges)
//   {"description": s, "tags": ["B-V", "I-V", "B-ARG1", ...]}
//   {"words": [...], "verbs": [{"tags": [...]}, ...]}           (first frame used)
// An optional "tokens" array overrides whitespace tokenisation of the
// description. A first line carrying a "format" key is treated as a header.
SrlImportResult import_external_srl(const std::filesystem::path& path, const RoleSet& roles,
                                    const SrlLabelMap& labels = {});
SrlImportResult import_external_srl_text(const std::string& text, const RoleSet& roles,
                                         const SrlLabelMap& labels = {});

bool is_propbank_label(const std::string& label);

// description -> parse, first entry wins.
using SrlTable = std::unordered_map<std::string, SemanticGroups>;
SrlTable make_srl_table(const SrlImportResult& result);

}  // namespace misengine
