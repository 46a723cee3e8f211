#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roles/semantic_groups.hpp"

namespace misengine {

enum class CompareMode { kCharacter, kTaxonomy };

std::string_view compare_mode_name(CompareMode mode);
CompareMode parse_compare_mode(std::string_view name);

// The equality test between two same-role groups. `mode` applies to every
// role unless overridden.
struct Comparator {
  CompareMode mode = CompareMode::kCharacter;
  std::map<std::string, CompareMode> per_role;

  CompareMode mode_for(const std::string& role) const;
  Json to_json() const;
  friend bool operator==(const Comparator&, const Comparator&) = default;
  static Comparator from_json(const Json& j);
};

// Set of mistaken roles as a bitmask over RoleSet positions; 0 = No Mistake.
struct MisalignmentCategory {
  std::uint32_t mask = 0;

  bool empty() const { return mask == 0; }
  bool contains(std::size_t role) const { return (mask >> role) & 1u; }
  // "none", "Predicate", "Predicate+Object", ...
  std::string name(const RoleSet& roles) const;
  std::vector<std::string> role_names(const RoleSet& roles) const;
  static MisalignmentCategory from_names(std::span<const std::string> names, const RoleSet& roles);

  friend auto operator<=>(const MisalignmentCategory&, const MisalignmentCategory&) = default;
};

// 2^|roles| categories in mask order.
std::vector<MisalignmentCategory> all_categories(const RoleSet& roles);

// Throws kMissingTaxonomy when the role compares by taxonomy and either side
// lacks a class id.
bool groups_equal(const Comparator& cmp, const SemanticGroups& a, const SemanticGroups& b, const RoleSet& roles,
                  std::size_t role);

MisalignmentCategory misalignment_category(const Comparator& cmp, const SemanticGroups& a, const SemanticGroups& b,
                                           const RoleSet& roles);

using GroupId = std::uint32_t;

// Per role: comparison key -> ascending group ids. Keys are interned so that
// category computation between two indexed groups is integer comparisons.
class RoleIndex {
 public:
  RoleIndex() = default;

  const RoleSet& roles() const { return roles_; }
  const Comparator& comparator() const { return comparator_; }
  std::size_t group_count() const { return key_of_.size(); }
  std::span<const SemanticGroups> groups() const { return groups_; }

  // Interned key of group g for role r.
  std::uint32_t key(GroupId g, std::size_t role) const { return key_of_[g][role]; }
  // Ascending ids sharing group g's key for role r (includes g).
  std::span<const GroupId> postings(GroupId g, std::size_t role) const {
    return postings_[role][key(g, role)];
  }
  std::size_t key_count(std::size_t role) const { return postings_[role].size(); }
  const std::string& key_text(std::size_t role, std::uint32_t key) const { return key_text_[role][key]; }

  // Category from interned keys; agrees with misalignment_category().
  MisalignmentCategory category(GroupId a, GroupId b) const;

  // key text -> posting count per role, for diagnostics.
  Json histogram() const;

  friend bool operator==(const RoleIndex&, const RoleIndex&) = default;

 private:
  friend RoleIndex build_index(std::span<const SemanticGroups>, const RoleSet&, const Comparator&);

  RoleSet roles_;
  Comparator comparator_;
  std::vector<SemanticGroups> groups_;
  std::vector<std::vector<std::uint32_t>> key_of_;            // [group][role]
  std::vector<std::vector<std::vector<GroupId>>> postings_;   // [role][key]
  std::vector<std::vector<std::string>> key_text_;            // [role][key]
};

// Keys are interned in sorted key order, so the index depends only on the
// multiset of groups and their positions.
RoleIndex build_index(std::span<const SemanticGroups> groups, const RoleSet& roles, const Comparator& cmp);

// Ids j != g whose category against g is exactly `cat`, ascending. Built from
// posting-list intersections and differences (complement of the union of
// g's postings when every role is mistaken).
std::vector<GroupId> candidates(const RoleIndex& index, GroupId g, MisalignmentCategory cat);

}  // namespace misengine
