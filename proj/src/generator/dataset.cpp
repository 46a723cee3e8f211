#include "generator/dataset.hpp"

#include <set>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace misengine {

bool MistakeSample::detection_label() const {
  for (auto y : labels) {
    if (y) return true;
  }
  return false;
}

std::size_t MistakeDataset::instruction_count() const {
  std::set<GroupId> ids;
  for (const auto& s : samples) ids.insert(s.instruction_group_id);
  return ids.size();
}

Json DatasetCounters::to_json(const RoleSet& roles) const {
  Json j;
  j["groups"] = groups;
  j["eligible_instructions"] = eligible_instructions;
  j["filtered_instructions"] = filtered_instructions;
  j["samples"] = samples;
  j["missing_pnr"] = missing_pnr;
  j["missing_box"] = missing_box;
  Json per = Json::object();
  Json filtered = Json::object();
  for (std::size_t m = 0; m < per_category.size(); ++m) {
    per[MisalignmentCategory{static_cast<std::uint32_t>(m)}.name(roles)] = per_category[m];
  }
  for (std::size_t m = 0; m < filtered_by_category.size(); ++m) {
    filtered[MisalignmentCategory{static_cast<std::uint32_t>(m)}.name(roles)] = filtered_by_category[m];
  }
  j["per_category"] = std::move(per);
  j["filtered_by_category"] = std::move(filtered);
  return j;
}

DatasetCounters DatasetCounters::from_json(const Json& j, const RoleSet& roles) {
  DatasetCounters c;
  c.groups = j.at("groups").get<std::uint64_t>();
  c.eligible_instructions = j.at("eligible_instructions").get<std::uint64_t>();
  c.filtered_instructions = j.at("filtered_instructions").get<std::uint64_t>();
  c.samples = j.at("samples").get<std::uint64_t>();
  c.missing_pnr = j.at("missing_pnr").get<std::uint64_t>();
  c.missing_box = j.at("missing_box").get<std::uint64_t>();
  const std::size_t n = std::size_t{1} << roles.size();
  c.per_category.assign(n, 0);
  c.filtered_by_category.assign(n, 0);
  for (std::size_t m = 0; m < n; ++m) {
    const auto name = MisalignmentCategory{static_cast<std::uint32_t>(m)}.name(roles);
    c.per_category[m] = j.at("per_category").value(name, std::uint64_t{0});
    c.filtered_by_category[m] = j.at("filtered_by_category").value(name, std::uint64_t{0});
  }
  return c;
}

Json sample_to_json(const MistakeSample& s, const RoleSet& roles, const SamplerConfig& config) {
  Json j;
  j["sample_id"] = s.sample_id;
  j["instruction_text"] = s.instruction_text;
  j["instruction_group_id"] = s.instruction_group_id;
  j["instruction_records"] = s.instruction_record_ids;
  j["attempt_record_id"] = s.attempt_record_id;
  j["attempt_group_id"] = s.attempt_group_id;
  j["attempt_description"] = s.attempt_description;
  j["category"] = s.category.role_names(roles);
  Json labels = Json::object();
  for (std::size_t r = 0; r < roles.size(); ++r) labels[roles[r]] = s.labels[r];
  j["labels"] = std::move(labels);
  j["ordinal"] = s.ordinal;
  if (s.pnr_frame) j["pnr_frame"] = *s.pnr_frame;
  if (s.mistake_box) j["mistake_box"] = bbox_to_json(*s.mistake_box);
  j["video_id"] = s.video_id;
  j["clip_start"] = s.clip_start_frame;
  j["clip_end"] = s.clip_end_frame;
  j["fps"] = Json::array({s.fps.num, s.fps.den});
  if (s.frame_width) j["frame_width"] = *s.frame_width;
  if (s.frame_height) j["frame_height"] = *s.frame_height;
  j["provenance"] = {{"seed", config.seed}, {"comparator", config.comparator.to_json()}};
  return j;
}

MistakeSample sample_from_json(const Json& j, const RoleSet& roles) {
  try {
    MistakeSample s;
    s.sample_id = j.at("sample_id").get<std::string>();
    s.instruction_text = j.at("instruction_text").get<std::string>();
    s.instruction_group_id = j.at("instruction_group_id").get<GroupId>();
    s.instruction_record_ids = j.at("instruction_records").get<std::vector<std::string>>();
    s.attempt_record_id = j.at("attempt_record_id").get<std::string>();
    s.attempt_group_id = j.at("attempt_group_id").get<GroupId>();
    s.attempt_description = j.at("attempt_description").get<std::string>();
    const auto names = j.at("category").get<std::vector<std::string>>();
    s.category = MisalignmentCategory::from_names(names, roles);
    s.labels.resize(roles.size());
    for (std::size_t r = 0; r < roles.size(); ++r) {
      const auto y = j.at("labels").at(roles[r]).get<int>();
      if (y != 0 && y != 1) fail(ErrorCode::kSchemaMismatch, "label must be 0 or 1");
      s.labels[r] = static_cast<std::uint8_t>(y);
    }
    s.ordinal = j.at("ordinal").get<std::uint32_t>();
    if (j.contains("pnr_frame")) s.pnr_frame = j["pnr_frame"].get<std::int64_t>();
    if (j.contains("mistake_box")) s.mistake_box = bbox_from_json(j["mistake_box"]);
    s.video_id = j.at("video_id").get<std::string>();
    s.clip_start_frame = j.at("clip_start").get<std::int64_t>();
    s.clip_end_frame = j.at("clip_end").get<std::int64_t>();
    s.fps = Rational{j.at("fps").at(0).get<std::int64_t>(), j.at("fps").at(1).get<std::int64_t>()};
    if (j.contains("frame_width")) s.frame_width = j["frame_width"].get<int>();
    if (j.contains("frame_height")) s.frame_height = j["frame_height"].get<int>();
    return s;
  } catch (const Json::exception& e) {
    fail(ErrorCode::kSchemaMismatch, std::string("sample: ") + e.what());
  }
}

std::string serialize_manifest(const MistakeDataset& d) {
  Json header;
  header["format"] = kManifestFormat;
  header["version"] = kManifestVersion;
  header["engine_version"] = kEngineVersion;
  header["rng"] = kRngAlgorithm;
  header["seed"] = d.config.seed;
  header["config"] = d.config.to_json();
  Json hashed{{"config", header["config"]}, {"parser", d.parser_info}};
  header["config_hash"] = config_hash(hashed);
  header["parser"] = d.parser_info;
  header["counters"] = d.counters.to_json(d.roles());
  std::string out = header.dump();
  out += '\n';
  for (const auto& s : d.samples) {
    out += sample_to_json(s, d.roles(), d.config).dump();
    out += '\n';
  }
  return out;
}

MistakeDataset parse_manifest(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) fail(ErrorCode::kVersionMismatch, "manifest has no header");
  Json header;
  try {
    header = Json::parse(lines.front());
  } catch (const Json::exception&) {
    fail(ErrorCode::kVersionMismatch, "manifest header is not JSON");
  }
  if (!header.is_object() || header.value("format", "") != kManifestFormat ||
      header.value("version", -1) != kManifestVersion) {
    fail(ErrorCode::kVersionMismatch, "not a version-1 manifest");
  }
  MistakeDataset d;
  try {
    d.config = SamplerConfig::from_json(header.at("config"));
    d.parser_info = header.value("parser", Json::object());
    d.counters = DatasetCounters::from_json(header.at("counters"), d.config.roles);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kSchemaMismatch, std::string("manifest header: ") + e.what());
  }
  std::set<std::string> ids;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    Json j;
    try {
      j = Json::parse(lines[i]);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kSchemaMismatch, e.what(), i + 1);
    }
    auto s = sample_from_json(j, d.config.roles);
    if (!ids.insert(s.sample_id).second) {
      throw Error(ErrorCode::kSchemaMismatch, "duplicate sample id '" + s.sample_id + "'", i + 1);
    }
    d.samples.push_back(std::move(s));
  }
  if (d.counters.samples != d.samples.size()) {
    fail(ErrorCode::kSchemaMismatch, "manifest header counts " + std::to_string(d.counters.samples) +
                                         " samples, found " + std::to_string(d.samples.size()));
  }
  return d;
}

void save_manifest(const MistakeDataset& dataset, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_manifest(dataset));
}

MistakeDataset load_manifest(const std::filesystem::path& path) { return parse_manifest(read_file(path)); }

}  // namespace misengine
