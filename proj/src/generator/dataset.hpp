#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "corpus/record.hpp"
#include "generator/config.hpp"

namespace misengine {

// One (instruction, attempt video) pair with its attribution targets.
struct MistakeSample {
  std::string sample_id;
  std::string instruction_text;
  GroupId instruction_group_id = 0;
  std::vector<std::string> instruction_record_ids;
  std::string attempt_record_id;
  GroupId attempt_group_id = 0;
  std::string attempt_description;
  MisalignmentCategory category;
  std::vector<std::uint8_t> labels;  // per role, 1 = mistaken
  std::uint32_t ordinal = 0;         // position within (instruction, category)

  std::optional<std::int64_t> pnr_frame;
  std::optional<BBox> mistake_box;

  // Attempt clip geometry, carried so the manifest is self-contained.
  std::string video_id;
  std::int64_t clip_start_frame = 0;
  std::int64_t clip_end_frame = 0;
  Rational fps = kDefaultFps;
  std::optional<int> frame_width;
  std::optional<int> frame_height;

  bool detection_label() const;

  friend bool operator==(const MistakeSample&, const MistakeSample&) = default;
};

struct DatasetCounters {
  std::uint64_t groups = 0;
  std::uint64_t eligible_instructions = 0;  // N_T
  std::uint64_t filtered_instructions = 0;
  std::uint64_t samples = 0;
  std::uint64_t missing_pnr = 0;        // attempt had no PNR annotation
  std::uint64_t missing_box = 0;        // mistake sample without a grounding box
  std::vector<std::uint64_t> per_category;  // samples per category mask
  std::vector<std::uint64_t> filtered_by_category;  // first failing category

  Json to_json(const RoleSet& roles) const;
  static DatasetCounters from_json(const Json& j, const RoleSet& roles);

  friend bool operator==(const DatasetCounters&, const DatasetCounters&) = default;
};

struct MistakeDataset {
  SamplerConfig config;
  Json parser_info = Json::object();
  DatasetCounters counters;
  std::vector<MistakeSample> samples;

  const RoleSet& roles() const { return config.roles; }
  std::size_t instruction_count() const;
};

inline constexpr int kManifestVersion = 1;
inline constexpr std::string_view kManifestFormat = "misengine-manifest";

Json sample_to_json(const MistakeSample& s, const RoleSet& roles, const SamplerConfig& config);
MistakeSample sample_from_json(const Json& j, const RoleSet& roles);

// Header line (config snapshot, config hash, seed, rng id, engine version,
// counters), then one sample per line in dataset order.
std::string serialize_manifest(const MistakeDataset& dataset);
MistakeDataset parse_manifest(const std::string& text);
void save_manifest(const MistakeDataset& dataset, const std::filesystem::path& path);
MistakeDataset load_manifest(const std::filesystem::path& path);

}  // namespace misengine
