#include "matcher/matcher.hpp"

#include <algorithm>
#include <unordered_map>

#include "common/error.hpp"

namespace misengine {

std::string_view compare_mode_name(CompareMode mode) {
  return mode == CompareMode::kCharacter ? "character" : "taxonomy";
}

CompareMode parse_compare_mode(std::string_view name) {
  if (name == "character") return CompareMode::kCharacter;
  if (name == "taxonomy") return CompareMode::kTaxonomy;
  fail(ErrorCode::kUsage, "unknown comparator mode '" + std::string(name) + "'");
}

CompareMode Comparator::mode_for(const std::string& role) const {
  auto it = per_role.find(role);
  return it == per_role.end() ? mode : it->second;
}

Json Comparator::to_json() const {
  Json j;
  j["mode"] = compare_mode_name(mode);
  Json overrides = Json::object();
  for (const auto& [role, m] : per_role) overrides[role] = compare_mode_name(m);
  j["per_role"] = overrides;
  return j;
}

Comparator Comparator::from_json(const Json& j) {
  Comparator c;
  c.mode = parse_compare_mode(j.value("mode", "character"));
  if (j.contains("per_role")) {
    for (auto it = j["per_role"].begin(); it != j["per_role"].end(); ++it) {
      c.per_role[it.key()] = parse_compare_mode(it.value().get<std::string>());
    }
  }
  return c;
}

std::string MisalignmentCategory::name(const RoleSet& roles) const {
  if (mask == 0) return "none";
  std::string out;
  for (std::size_t r = 0; r < roles.size(); ++r) {
    if (!contains(r)) continue;
    if (!out.empty()) out += '+';
    out += roles[r];
  }
  return out;
}

std::vector<std::string> MisalignmentCategory::role_names(const RoleSet& roles) const {
  std::vector<std::string> out;
  for (std::size_t r = 0; r < roles.size(); ++r) {
    if (contains(r)) out.push_back(roles[r]);
  }
  return out;
}

MisalignmentCategory MisalignmentCategory::from_names(std::span<const std::string> names, const RoleSet& roles) {
  MisalignmentCategory c;
  for (const auto& n : names) {
    auto idx = roles.index_of(n);
    if (!idx) fail(ErrorCode::kSchemaMismatch, "category names unknown role '" + n + "'");
    c.mask |= 1u << *idx;
  }
  return c;
}

std::vector<MisalignmentCategory> all_categories(const RoleSet& roles) {
  std::vector<MisalignmentCategory> out;
  const std::uint32_t n = 1u << roles.size();
  for (std::uint32_t m = 0; m < n; ++m) out.push_back(MisalignmentCategory{m});
  return out;
}

namespace {

std::string comparison_key(const Comparator& cmp, const SemanticGroups& g, const RoleSet& roles, std::size_t role) {
  if (cmp.mode_for(roles[role]) == CompareMode::kCharacter) return g.roles[role].key;
  const auto& tax = g.roles[role].taxonomy;
  if (!tax) {
    fail(ErrorCode::kMissingTaxonomy,
         "group '" + g.description + "' has no taxonomy id for role " + roles[role]);
  }
  return "#" + std::to_string(*tax);
}

}  // namespace

bool groups_equal(const Comparator& cmp, const SemanticGroups& a, const SemanticGroups& b, const RoleSet& roles,
                  std::size_t role) {
  if (role >= roles.size()) fail(ErrorCode::kInvalidArgument, "role index out of range");
  if (cmp.mode_for(roles[role]) == CompareMode::kCharacter) return a.roles[role].key == b.roles[role].key;
  const auto& ta = a.roles[role].taxonomy;
  const auto& tb = b.roles[role].taxonomy;
  if (!ta || !tb) fail(ErrorCode::kMissingTaxonomy, "taxonomy comparison needs class ids on both groups");
  return *ta == *tb;
}

MisalignmentCategory misalignment_category(const Comparator& cmp, const SemanticGroups& a, const SemanticGroups& b,
                                           const RoleSet& roles) {
  MisalignmentCategory c;
  for (std::size_t r = 0; r < roles.size(); ++r) {
    if (!groups_equal(cmp, a, b, roles, r)) c.mask |= 1u << r;
  }
  return c;
}

MisalignmentCategory RoleIndex::category(GroupId a, GroupId b) const {
  MisalignmentCategory c;
  const auto& ka = key_of_[a];
  const auto& kb = key_of_[b];
  for (std::size_t r = 0; r < ka.size(); ++r) {
    if (ka[r] != kb[r]) c.mask |= 1u << r;
  }
  return c;
}

Json RoleIndex::histogram() const {
  Json j = Json::object();
  for (std::size_t r = 0; r < roles_.size(); ++r) {
    Json role = Json::object();
    for (std::size_t k = 0; k < postings_[r].size(); ++k) role[key_text_[r][k]] = postings_[r][k].size();
    j[roles_[r]] = std::move(role);
  }
  return j;
}

RoleIndex build_index(std::span<const SemanticGroups> groups, const RoleSet& roles, const Comparator& cmp) {
  RoleIndex index;
  index.roles_ = roles;
  index.comparator_ = cmp;
  index.groups_.assign(groups.begin(), groups.end());
  for (const auto& g : index.groups_) {
    if (g.roles.size() != roles.size()) fail(ErrorCode::kInvalidArgument, "group does not match role set");
  }
  // Canonical order makes ids independent of input order.
  std::vector<std::string> tuples(index.groups_.size());
  std::vector<std::size_t> order(index.groups_.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
    tuples[i] = index.groups_[i].tuple_key();
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (tuples[a] != tuples[b]) return tuples[a] < tuples[b];
    const auto& ga = index.groups_[a];
    const auto& gb = index.groups_[b];
    if (ga.source_record_ids != gb.source_record_ids) return ga.source_record_ids < gb.source_record_ids;
    return ga.description < gb.description;
  });
  {
    std::vector<SemanticGroups> sorted;
    sorted.reserve(order.size());
    for (std::size_t i : order) sorted.push_back(std::move(index.groups_[i]));
    index.groups_ = std::move(sorted);
  }

  const std::size_t n = index.groups_.size();
  index.key_of_.assign(n, std::vector<std::uint32_t>(roles.size()));
  index.postings_.assign(roles.size(), {});
  index.key_text_.assign(roles.size(), {});
  for (std::size_t r = 0; r < roles.size(); ++r) {
    std::vector<std::string> keys(n);
    for (std::size_t g = 0; g < n; ++g) keys[g] = comparison_key(cmp, index.groups_[g], roles, r);
    std::vector<std::string> distinct = keys;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::unordered_map<std::string, std::uint32_t> id_of;
    id_of.reserve(distinct.size());
    for (std::uint32_t k = 0; k < distinct.size(); ++k) id_of.emplace(distinct[k], k);
    index.postings_[r].assign(distinct.size(), {});
    for (std::size_t g = 0; g < n; ++g) {
      const auto k = id_of.at(keys[g]);
      index.key_of_[g][r] = k;
      index.postings_[r][k].push_back(static_cast<GroupId>(g));
    }
    index.key_text_[r] = std::move(distinct);
  }
  return index;
}

namespace {

std::vector<GroupId> intersect(std::span<const GroupId> a, std::span<const GroupId> b) {
  std::vector<GroupId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<GroupId> subtract(std::span<const GroupId> a, std::span<const GroupId> b) {
  std::vector<GroupId> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

std::vector<GroupId> candidates(const RoleIndex& index, GroupId g, MisalignmentCategory cat) {
  const std::size_t n_roles = index.roles().size();
  std::vector<std::size_t> matched, mistaken;
  for (std::size_t r = 0; r < n_roles; ++r) (cat.contains(r) ? mistaken : matched).push_back(r);

  std::vector<GroupId> pool;
  if (!matched.empty()) {
    // Start from the shortest matched posting list.
    std::sort(matched.begin(), matched.end(),
              [&](std::size_t a, std::size_t b) { return index.postings(g, a).size() < index.postings(g, b).size(); });
    auto first = index.postings(g, matched.front());
    pool.assign(first.begin(), first.end());
    for (std::size_t i = 1; i < matched.size() && !pool.empty(); ++i) pool = intersect(pool, index.postings(g, matched[i]));
    for (std::size_t r : mistaken) pool = subtract(pool, index.postings(g, r));
  } else {
    // Every role mistaken: complement of the union of g's postings.
    std::vector<GroupId> shared;
    for (std::size_t r = 0; r < n_roles; ++r) {
      std::vector<GroupId> merged;
      auto p = index.postings(g, r);
      std::set_union(shared.begin(), shared.end(), p.begin(), p.end(), std::back_inserter(merged));
      shared = std::move(merged);
    }
    pool.reserve(index.group_count() - shared.size());
    std::size_t s = 0;
    for (GroupId j = 0; j < index.group_count(); ++j) {
      if (s < shared.size() && shared[s] == j) {
        ++s;
        continue;
      }
      pool.push_back(j);
    }
  }
  std::erase(pool, g);
  return pool;
}

}  // namespace misengine
