#include "roles/semantic_groups.hpp"

#include <set>

#include "common/error.hpp"

namespace misengine {

RoleSet::RoleSet() : roles_{std::string(kPredicate), std::string(kObject)} {}

RoleSet::RoleSet(std::vector<std::string> roles) : roles_(std::move(roles)) {
  if (roles_.empty()) fail(ErrorCode::kInvalidArgument, "role set must not be empty");
  if (roles_.size() > kMaxRoles) fail(ErrorCode::kInvalidArgument, "too many roles");
  std::set<std::string> seen;
  for (const auto& r : roles_) {
    if (r.empty()) fail(ErrorCode::kInvalidArgument, "empty role name");
    if (!seen.insert(r).second) fail(ErrorCode::kInvalidArgument, "duplicate role '" + r + "'");
  }
}

RoleSet RoleSet::parse(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',') {
      const auto b = cur.find_first_not_of(' ');
      const auto e = cur.find_last_not_of(' ');
      if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return RoleSet(std::move(out));
}

std::optional<std::size_t> RoleSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < roles_.size(); ++i) {
    if (roles_[i] == name) return i;
  }
  return std::nullopt;
}

std::string RoleSet::to_string() const {
  std::string out;
  for (const auto& r : roles_) {
    if (!out.empty()) out += ',';
    out += r;
  }
  return out;
}

std::string SemanticGroups::tuple_key() const {
  std::string out;
  for (std::size_t i = 0; i < roles.size(); ++i) {
    if (i) out += '\x1f';
    out += roles[i].key;
  }
  return out;
}

Json groups_to_json(const SemanticGroups& g, const RoleSet& roles) {
  Json j;
  Json rm = Json::object();
  for (std::size_t i = 0; i < roles.size(); ++i) {
    Json r{{"surface", g.roles[i].surface}, {"key", g.roles[i].key}};
    if (g.roles[i].taxonomy) r["taxonomy"] = *g.roles[i].taxonomy;
    rm[roles[i]] = std::move(r);
  }
  j["roles"] = std::move(rm);
  j["description"] = g.description;
  j["records"] = g.source_record_ids;
  return j;
}

SemanticGroups groups_from_json(const Json& j, const RoleSet& roles) {
  try {
    SemanticGroups g;
    const auto& rm = j.at("roles");
    if (rm.size() != roles.size()) fail(ErrorCode::kSchemaMismatch, "group role count does not match role set");
    for (std::size_t i = 0; i < roles.size(); ++i) {
      const auto& r = rm.at(roles[i]);
      RoleGroup rg{r.at("surface").get<std::string>(), r.at("key").get<std::string>(), std::nullopt};
      if (r.contains("taxonomy")) rg.taxonomy = r["taxonomy"].get<std::int64_t>();
      if (rg.key.empty()) fail(ErrorCode::kSchemaMismatch, "empty canonical key");
      g.roles.push_back(std::move(rg));
    }
    g.description = j.at("description").get<std::string>();
    g.source_record_ids = j.at("records").get<std::vector<std::string>>();
    return g;
  } catch (const Json::exception& e) {
    fail(ErrorCode::kSchemaMismatch, std::string("group: ") + e.what());
  }
}

}  // namespace misengine
