#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "corpus/record.hpp"
#include "roles/lexicon.hpp"
#include "roles/parser.hpp"
#include "roles/srl_import.hpp"

namespace misengine {

struct GroupingOptions {
  RoleSet roles;
  const VerbLexicon* lexicon = &VerbLexicon::builtin();
  // When set, parses come from this table (keyed by exact description)
  // instead of the built-in parser.
  const SrlTable* srl = nullptr;
  unsigned threads = 1;
};

struct GroupingResult {
  RoleSet roles;
  // Sorted by role-key tuple; a group's id is its position.
  std::vector<SemanticGroups> groups;
  std::size_t records_in = 0;
  std::size_t rejected = 0;
  std::map<std::string, std::size_t> rejected_by_reason;
  std::size_t lexicon_misses = 0;
  // Leading tokens that missed the lexicon, with counts.
  std::map<std::string, std::size_t> unknown_predicates;
  Json parser_info = Json::object();

  Json counters() const;
};

// Parses every record and merges records whose canonical role tuples agree.
// Within a group, source ids are sorted and the representative surface text
// and description come from the smallest record id. Predicate/Object groups
// take their taxonomy id from the records' verb/noun classes (most frequent,
// ties to the smaller id).
GroupingResult group_corpus(std::span<const ActionRecord> records, const GroupingOptions& options);

inline constexpr int kGroupsVersion = 1;
inline constexpr std::string_view kGroupsFormat = "misengine-groups";

std::string serialize_groups(const GroupingResult& result);
GroupingResult parse_groups(const std::string& text);
void save_groups(const GroupingResult& result, const std::filesystem::path& path);
GroupingResult load_groups(const std::filesystem::path& path);

}  // namespace misengine
