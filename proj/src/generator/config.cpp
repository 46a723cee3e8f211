#include "generator/config.hpp"

#include <limits>

#include "common/error.hpp"

namespace misengine {

std::uint64_t SamplerConfig::gamma() const {
  std::uint64_t total = 0;
  for (const auto& c : counts) total += std::uint64_t{c.descriptions} * c.videos;
  return total;
}

void SamplerConfig::validate() const {
  if (counts.size() != (std::size_t{1} << roles.size())) {
    fail(ErrorCode::kInvalidArgument, "counts must cover all " + std::to_string(1u << roles.size()) + " categories");
  }
  for (const auto& c : counts) {
    if (c.descriptions < 1 || c.videos < 1) fail(ErrorCode::kInvalidArgument, "category counts must be >= 1");
  }
  for (const auto& [role, mode] : comparator.per_role) {
    if (!roles.index_of(role)) fail(ErrorCode::kInvalidArgument, "comparator override for unknown role " + role);
  }
}

SamplerConfig SamplerConfig::uniform(const RoleSet& roles, std::uint32_t descriptions, std::uint32_t videos) {
  SamplerConfig c;
  c.roles = roles;
  c.counts.assign(std::size_t{1} << roles.size(), CategoryCounts{descriptions, videos});
  return c;
}

// Category order is mask order over {Predicate, Object}:
// none, Predicate, Object, Predicate+Object.
SamplerConfig SamplerConfig::from_preset(const std::string& name) {
  SamplerConfig c;
  c.roles = RoleSet();
  c.preset = name;
  if (name == "ego4d-paper") {
    c.comparator.mode = CompareMode::kTaxonomy;
    c.counts = {{1, 4}, {2, 2}, {2, 2}, {2, 2}};
  } else if (name == "epic-paper") {
    c.comparator.mode = CompareMode::kCharacter;
    c.counts = {{1, 3}, {2, 3}, {2, 3}, {1, 3}};
  } else {
    fail(ErrorCode::kUsage, "unknown preset '" + name + "'");
  }
  return c;
}

std::vector<std::string> SamplerConfig::preset_names() { return {"ego4d-paper", "epic-paper"}; }

Json SamplerConfig::to_json() const {
  Json j;
  j["roles"] = roles.names();
  j["comparator"] = comparator.to_json();
  Json cats = Json::array();
  for (std::size_t m = 0; m < counts.size(); ++m) {
    cats.push_back({{"category", MisalignmentCategory{static_cast<std::uint32_t>(m)}.name(roles)},
                    {"descriptions", counts[m].descriptions},
                    {"videos", counts[m].videos}});
  }
  j["counts"] = std::move(cats);
  j["gamma"] = gamma();
  j["seed"] = seed;
  j["preset"] = preset;
  return j;
}

SamplerConfig SamplerConfig::from_json(const Json& j) {
  try {
    SamplerConfig c;
    c.roles = RoleSet(j.at("roles").get<std::vector<std::string>>());
    c.comparator = Comparator::from_json(j.at("comparator"));
    for (const auto& e : j.at("counts")) {
      c.counts.push_back({e.at("descriptions").get<std::uint32_t>(), e.at("videos").get<std::uint32_t>()});
    }
    c.seed = j.at("seed").get<std::uint64_t>();
    c.preset = j.value("preset", "");
    c.validate();
    return c;
  } catch (const Json::exception& e) {
    fail(ErrorCode::kSchemaMismatch, std::string("sampler config: ") + e.what());
  }
}

std::uint64_t dataset_size(std::uint64_t instructions, std::uint64_t gamma) {
  if (gamma != 0 && instructions > std::numeric_limits<std::uint64_t>::max() / gamma) {
    fail(ErrorCode::kInvalidArgument, "dataset size overflows");
  }
  return instructions * gamma;
}

}  // namespace misengine
