#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "corpus/record.hpp"

namespace misengine {

// Record fields a table column can feed. The first five are required.
//   id video start end description
//   fps verb_class noun_class pnr participant environment width height
struct ColumnMapping {
  std::map<std::string, std::string> field_to_column;
  char delimiter = ',';

  // "field=column,field=column" or a JSON object {"field": "column"}.
  static ColumnMapping parse(const std::string& spec, char delimiter = ',');
  Json to_json() const;
};

struct IngestResult {
  std::vector<ActionRecord> records;
  std::size_t rows_in = 0;
  std::size_t dropped = 0;
  std::vector<std::string> warnings;
};

// Delimiter-separated table with a header row. Quoted fields may contain the
// delimiter, doubled quotes and newlines.
IngestResult ingest_table(const std::filesystem::path& path, const ColumnMapping& mapping);
IngestResult ingest_table_text(const std::string& text, const ColumnMapping& mapping);

// Structured clip export, either a top-level array of clip objects or
// {"fps": <default>, "clips": [...]}. Each clip:
//   {"id", "video", "span": [start, end], "description", "fps"?,
//    "frame_size"?: [w, h], "pnr"? | "pnr_offset"?, "hands"?: [box...],
//    "objects"?: [box...], "verb_class"?, "noun_class"?, "participant"?,
//    "environment"?}
// `pnr` is on the video timeline; `pnr_offset` is relative to span start.
IngestResult ingest_structured(const std::filesystem::path& path);
IngestResult ingest_structured_text(const std::string& text);

// Concatenates per-file results in argument order; rejects duplicate ids
// across files.
IngestResult merge_ingest(std::vector<IngestResult> parts);

}  // namespace misengine
