#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matcher/matcher.hpp"

namespace misengine {

struct CategoryCounts {
  std::uint32_t descriptions = 1;  // misaligned descriptions drawn per instruction
  std::uint32_t videos = 1;        // attempt videos drawn per description

  friend bool operator==(const CategoryCounts&, const CategoryCounts&) = default;
};

// Sampling parameters. `counts` is indexed by category mask and has
// 2^|roles| entries. Gamma (attempts per instruction) is the sum over
// categories of descriptions * videos.
struct SamplerConfig {
  RoleSet roles;
  Comparator comparator;
  std::vector<CategoryCounts> counts;
  std::uint64_t seed = 0;
  std::string preset;  // empty for hand-built configs

  std::uint64_t gamma() const;
  void validate() const;

  // Same counts for every category.
  static SamplerConfig uniform(const RoleSet& roles, std::uint32_t descriptions, std::uint32_t videos);
  // "ego4d-paper" (Gamma 16, taxonomy comparator) or "epic-paper" (Gamma 18,
  // character comparator); both use {Predicate, Object}.
  static SamplerConfig from_preset(const std::string& name);
  static std::vector<std::string> preset_names();

  Json to_json() const;
  static SamplerConfig from_json(const Json& j);
};

// |dataset| = instructions * gamma, with overflow check.
std::uint64_t dataset_size(std::uint64_t instructions, std::uint64_t gamma);

}  // namespace misengine
