#include "corpus/store.hpp"

#include <unordered_set>

#include "common/error.hpp"

namespace misengine {

std::string serialize_store(const RecordStore& store) {
  Json header;
  header["format"] = kStoreFormat;
  header["version"] = kStoreVersion;
  header["engine_version"] = kEngineVersion;
  header["records"] = store.records.size();
  header["provenance"] = store.provenance;
  std::string out = header.dump();
  out += '\n';
  for (const auto& r : store.records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

RecordStore parse_store(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) fail(ErrorCode::kVersionMismatch, "store has no header line");
  Json header;
  try {
    header = Json::parse(lines.front());
  } catch (const Json::exception&) {
    fail(ErrorCode::kVersionMismatch, "store header is not JSON");
  }
  if (!header.is_object() || header.value("format", "") != kStoreFormat) {
    fail(ErrorCode::kVersionMismatch, "not a record store");
  }
  if (!header.contains("version") || !header["version"].is_number_integer() ||
      header["version"].get<int>() != kStoreVersion) {
    fail(ErrorCode::kVersionMismatch, "unsupported store version " + header.value("version", Json()).dump());
  }
  RecordStore store;
  store.provenance = header.value("provenance", Json::object());
  std::unordered_set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    Json j;
    try {
      j = Json::parse(lines[i]);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kSchemaMismatch, e.what(), i + 1);
    }
    ActionRecord r = record_from_json(j);
    validate_record(r, i + 1);
    if (!seen.insert(r.record_id).second) {
      throw Error(ErrorCode::kDuplicateRecordId, "duplicate record id '" + r.record_id + "'", i + 1);
    }
    store.records.push_back(std::move(r));
  }
  const auto declared = header.value("records", store.records.size());
  if (declared != store.records.size()) {
    fail(ErrorCode::kSchemaMismatch, "store header declares " + std::to_string(declared) + " records, found " +
                                         std::to_string(store.records.size()));
  }
  return store;
}

void save_store(const RecordStore& store, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_store(store));
}

RecordStore load_store(const std::filesystem::path& path) { return parse_store(read_file(path)); }

}  // namespace misengine
