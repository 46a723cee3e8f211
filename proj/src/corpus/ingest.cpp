#include "corpus/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <unordered_set>

#include "common/error.hpp"

namespace misengine {
namespace {

const std::vector<std::string>& required_fields() {
  static const std::vector<std::string> fields = {"id", "video", "start", "end", "description"};
  return fields;
}
const std::set<std::string>& known_fields() {
  static const std::set<std::string> fields = {"id",          "video",      "start",       "end",
                                            "description", "fps",        "verb_class",  "noun_class",
                                            "pnr",         "participant", "environment", "width",
                                            "height"};
  return fields;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

struct Row {
  std::vector<std::string> cells;
  std::size_t line = 0;
};

// Minimal RFC 4180 reader generalised to any single-byte delimiter.
std::vector<Row> read_rows(const std::string& text, char delim) {
  std::vector<Row> rows;
  Row row;
  std::string cell;
  bool quoted = false;
  bool row_has_content = false;
  std::size_t line = 1;
  row.line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      row_has_content = true;
    } else if (c == delim) {
      row.cells.push_back(std::move(cell));
      cell.clear();
      row_has_content = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (row_has_content || !cell.empty()) {
        row.cells.push_back(std::move(cell));
        rows.push_back(std::move(row));
      }
      cell.clear();
      row = Row{};
      row_has_content = false;
      ++line;
      row.line = line;
    } else {
      cell += c;
      row_has_content = true;
    }
  }
  if (quoted) throw Error(ErrorCode::kMalformedRow, "unterminated quoted field", row.line);
  if (row_has_content || !cell.empty()) {
    row.cells.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::int64_t to_int(const std::string& s, const std::string& field, std::size_t line) {
  std::int64_t v = 0;
  const std::string t = trim(s);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw Error(ErrorCode::kMalformedRow, "field '" + field + "' is not an integer: '" + s + "'", line);
  }
  return v;
}

void check_unique(const std::vector<ActionRecord>& records) {
  std::unordered_set<std::string> seen;
  seen.reserve(records.size());
  for (const auto& r : records) {
    if (!seen.insert(r.record_id).second) {
      fail(ErrorCode::kDuplicateRecordId, "duplicate record id '" + r.record_id + "'");
    }
  }
}

}  // namespace

ColumnMapping ColumnMapping::parse(const std::string& spec, char delimiter) {
  ColumnMapping m;
  m.delimiter = delimiter;
  const std::string t = trim(spec);
  if (!t.empty() && t.front() == '{') {
    Json j;
    try {
      j = Json::parse(t);
      for (auto it = j.begin(); it != j.end(); ++it) m.field_to_column[it.key()] = it.value().get<std::string>();
    } catch (const Json::exception& e) {
      fail(ErrorCode::kUsage, std::string("column mapping: ") + e.what());
    }
  } else {
    std::size_t pos = 0;
    while (pos <= t.size()) {
      auto comma = t.find(',', pos);
      if (comma == std::string::npos) comma = t.size();
      const std::string pair = trim(std::string_view(t).substr(pos, comma - pos));
      if (!pair.empty()) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos) fail(ErrorCode::kUsage, "column mapping entry needs field=column: " + pair);
        m.field_to_column[trim(pair.substr(0, eq))] = trim(pair.substr(eq + 1));
      }
      pos = comma + 1;
    }
  }
  for (const auto& [field, column] : m.field_to_column) {
    if (!known_fields().count(field)) fail(ErrorCode::kUsage, "unknown record field in mapping: " + field);
  }
  return m;
}

Json ColumnMapping::to_json() const {
  Json j = Json::object();
  for (const auto& [field, column] : field_to_column) j[field] = column;
  return j;
}

IngestResult ingest_table_text(const std::string& text, const ColumnMapping& mapping) {
  for (const auto& f : required_fields()) {
    if (!mapping.field_to_column.count(f)) fail(ErrorCode::kMissingColumn, "required field not mapped: " + f);
  }
  auto rows = read_rows(text, mapping.delimiter);
  if (rows.empty()) fail(ErrorCode::kMissingColumn, "table has no header row");
  const Row& header = rows.front();
  std::map<std::string, std::size_t> column_index;
  for (std::size_t i = 0; i < header.cells.size(); ++i) column_index[trim(header.cells[i])] = i;
  std::map<std::string, std::size_t> field_index;
  for (const auto& [field, column] : mapping.field_to_column) {
    auto it = column_index.find(column);
    if (it == column_index.end()) fail(ErrorCode::kMissingColumn, "column '" + column + "' not in header");
    field_index[field] = it->second;
  }

  IngestResult result;
  for (std::size_t ri = 1; ri < rows.size(); ++ri) {
    const Row& row = rows[ri];
    ++result.rows_in;
    if (row.cells.size() != header.cells.size()) {
      throw Error(ErrorCode::kMalformedRow,
                  "expected " + std::to_string(header.cells.size()) + " cells, got " + std::to_string(row.cells.size()),
                  row.line);
    }
    auto cell = [&](const std::string& field) -> std::optional<std::string> {
      auto it = field_index.find(field);
      if (it == field_index.end()) return std::nullopt;
      std::string v = trim(row.cells[it->second]);
      if (v.empty()) return std::nullopt;
      return v;
    };
    ActionRecord r;
    r.record_id = cell("id").value_or("");
    r.video_id = cell("video").value_or("");
    if (r.record_id.empty() || r.video_id.empty()) throw Error(ErrorCode::kMalformedRow, "empty id or video", row.line);
    r.clip_start_frame = to_int(cell("start").value_or(""), "start", row.line);
    r.clip_end_frame = to_int(cell("end").value_or(""), "end", row.line);
    auto description = cell("description");
    if (!description) {
      ++result.dropped;
      result.warnings.push_back("line " + std::to_string(row.line) + ": record '" + r.record_id +
                                "' has no description; dropped");
      continue;
    }
    r.description = *description;
    if (auto v = cell("fps")) {
      try {
        r.fps = Rational::parse(*v);
      } catch (const Error& e) {
        throw Error(ErrorCode::kMalformedRow, e.what(), row.line);
      }
      r.fps_defaulted = false;
    }
    if (auto v = cell("verb_class")) r.taxonomy_verb = to_int(*v, "verb_class", row.line);
    if (auto v = cell("noun_class")) r.taxonomy_noun = to_int(*v, "noun_class", row.line);
    if (auto v = cell("pnr")) r.pnr_frame = to_int(*v, "pnr", row.line);
    if (auto v = cell("participant")) r.participant_id = *v;
    if (auto v = cell("environment")) r.environment_id = *v;
    if (auto v = cell("width")) r.frame_width = static_cast<int>(to_int(*v, "width", row.line));
    if (auto v = cell("height")) r.frame_height = static_cast<int>(to_int(*v, "height", row.line));
    validate_record(r, row.line);
    result.records.push_back(std::move(r));
  }
  check_unique(result.records);
  return result;
}

IngestResult ingest_table(const std::filesystem::path& path, const ColumnMapping& mapping) {
  return ingest_table_text(read_file(path), mapping);
}

IngestResult ingest_structured_text(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kSchemaMismatch, std::string("structured annotations: ") + e.what());
  }
  std::optional<Rational> file_fps;
  const Json* clips = &root;
  if (root.is_object()) {
    if (!root.contains("clips") || !root["clips"].is_array()) {
      fail(ErrorCode::kSchemaMismatch, "expected a 'clips' array");
    }
    if (root.contains("fps")) {
      const auto& f = root["fps"];
      file_fps = Rational::parse(f.is_string() ? f.get<std::string>() : f.dump());
    }
    clips = &root["clips"];
  } else if (!root.is_array()) {
    fail(ErrorCode::kSchemaMismatch, "expected an array of clips or an object with 'clips'");
  }

  IngestResult result;
  std::size_t index = 0;
  for (const auto& clip : *clips) {
    ++index;
    ++result.rows_in;
    const std::string where = "clip #" + std::to_string(index);
    if (!clip.is_object()) fail(ErrorCode::kSchemaMismatch, where + " is not an object");
    try {
      ActionRecord r;
      r.record_id = clip.at("id").is_string() ? clip["id"].get<std::string>() : clip["id"].dump();
      r.video_id = clip.at("video").get<std::string>();
      const auto& span = clip.at("span");
      if (!span.is_array() || span.size() != 2) fail(ErrorCode::kSchemaMismatch, where + ": span must be [start, end]");
      r.clip_start_frame = span[0].get<std::int64_t>();
      r.clip_end_frame = span[1].get<std::int64_t>();
      const bool has_description = clip.contains("description") && clip["description"].is_string() &&
                                   !trim(clip["description"].get<std::string>()).empty();
      if (!has_description) {
        ++result.dropped;
        result.warnings.push_back(where + " ('" + r.record_id + "') has no description; dropped");
        continue;
      }
      r.description = clip["description"].get<std::string>();
      if (clip.contains("fps")) {
        const auto& f = clip["fps"];
        r.fps = Rational::parse(f.is_string() ? f.get<std::string>() : f.dump());
        r.fps_defaulted = false;
      } else if (file_fps) {
        r.fps = *file_fps;
        r.fps_defaulted = false;
      }
      if (clip.contains("frame_size")) {
        const auto& fs = clip["frame_size"];
        if (!fs.is_array() || fs.size() != 2) fail(ErrorCode::kSchemaMismatch, where + ": frame_size must be [w, h]");
        r.frame_width = fs[0].get<int>();
        r.frame_height = fs[1].get<int>();
      }
      if (clip.contains("pnr") && !clip["pnr"].is_null()) {
        r.pnr_frame = clip["pnr"].get<std::int64_t>();
      } else if (clip.contains("pnr_offset") && !clip["pnr_offset"].is_null()) {
        r.pnr_frame = r.clip_start_frame + clip["pnr_offset"].get<std::int64_t>();
      }
      auto boxes = [&](const char* key) -> std::optional<std::vector<BBox>> {
        if (!clip.contains(key) || clip[key].is_null()) return std::nullopt;
        if (!clip[key].is_array()) fail(ErrorCode::kSchemaMismatch, where + ": '" + key + "' must be an array");
        std::vector<BBox> out;
        for (const auto& b : clip[key]) out.push_back(bbox_from_json(b));
        return out;
      };
      r.hand_boxes = boxes("hands");
      r.object_boxes = boxes("objects");
      if (clip.contains("verb_class")) r.taxonomy_verb = clip["verb_class"].get<std::int64_t>();
      if (clip.contains("noun_class")) r.taxonomy_noun = clip["noun_class"].get<std::int64_t>();
      if (clip.contains("participant")) r.participant_id = clip["participant"].get<std::string>();
      if (clip.contains("environment")) r.environment_id = clip["environment"].get<std::string>();
      validate_record(r, index);
      result.records.push_back(std::move(r));
    } catch (const Json::exception& e) {
      fail(ErrorCode::kSchemaMismatch, where + ": " + e.what());
    }
  }
  check_unique(result.records);
  return result;
}

IngestResult ingest_structured(const std::filesystem::path& path) { return ingest_structured_text(read_file(path)); }

IngestResult merge_ingest(std::vector<IngestResult> parts) {
  IngestResult out;
  for (auto& p : parts) {
    out.rows_in += p.rows_in;
    out.dropped += p.dropped;
    for (auto& w : p.warnings) out.warnings.push_back(std::move(w));
    for (auto& r : p.records) out.records.push_back(std::move(r));
  }
  check_unique(out.records);
  return out;
}

}  // namespace misengine
