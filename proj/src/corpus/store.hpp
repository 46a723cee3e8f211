#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "corpus/record.hpp"

namespace misengine {

inline constexpr int kStoreVersion = 1;
inline constexpr std::string_view kStoreFormat = "misengine-store";

// Line-delimited store: one header object, then one record object per line.
struct RecordStore {
  std::vector<ActionRecord> records;
  // Free-form provenance carried in the header (ingestion spec, counters).
  Json provenance = Json::object();
};

std::string serialize_store(const RecordStore& store);
RecordStore parse_store(const std::string& text);

void save_store(const RecordStore& store, const std::filesystem::path& path);
RecordStore load_store(const std::filesystem::path& path);

}  // namespace misengine
