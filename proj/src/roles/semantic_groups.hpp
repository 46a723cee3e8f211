#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "common/io.hpp"

namespace misengine {

inline constexpr std::string_view kPredicate = "Predicate";
inline constexpr std::string_view kObject = "Object";
inline constexpr std::string_view kComplement = "Complement";

// Ordered, duplicate-free set of role names. Role positions index every
// per-role array in the engine and the bits of a MisalignmentCategory.
class RoleSet {
 public:
  static constexpr std::size_t kMaxRoles = 16;

  RoleSet();  // {Predicate, Object}
  explicit RoleSet(std::vector<std::string> roles);
  // Comma separated, e.g. "Predicate,Object".
  static RoleSet parse(const std::string& text);

  const std::vector<std::string>& names() const { return roles_; }
  std::size_t size() const { return roles_.size(); }
  const std::string& operator[](std::size_t i) const { return roles_[i]; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::string to_string() const;

  friend bool operator==(const RoleSet&, const RoleSet&) = default;

 private:
  std::vector<std::string> roles_;
};

struct RoleGroup {
  std::string surface;
  std::string key;  // canonical form, never empty
  std::optional<std::int64_t> taxonomy;

  friend bool operator==(const RoleGroup&, const RoleGroup&) = default;
};

// Parse of one description: one RoleGroup per role of the owning RoleSet,
// plus the records that share this canonical role tuple.
struct SemanticGroups {
  std::vector<RoleGroup> roles;
  std::string description;
  std::vector<std::string> source_record_ids;

  // Role keys joined with U+001F; identical tuples merge into one group.
  std::string tuple_key() const;

  friend bool operator==(const SemanticGroups&, const SemanticGroups&) = default;
};

Json groups_to_json(const SemanticGroups& g, const RoleSet& roles);
SemanticGroups groups_from_json(const Json& j, const RoleSet& roles);

}  // namespace misengine
