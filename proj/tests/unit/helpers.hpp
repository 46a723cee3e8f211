#pragma once

#include <unistd.h>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "corpus/record.hpp"
#include "roles/semantic_groups.hpp"

namespace misengine::test {

inline ActionRecord record(const std::string& id, const std::string& description,
                           std::optional<std::int64_t> verb = std::nullopt,
                           std::optional<std::int64_t> noun = std::nullopt) {
  static std::int64_t serial = 0;
  ActionRecord r;
  r.record_id = id;
  r.video_id = "v" + id;
  r.clip_start_frame = (serial++) * 300;
  r.clip_end_frame = r.clip_start_frame + 240;
  r.description = description;
  r.taxonomy_verb = verb;
  r.taxonomy_noun = noun;
  return r;
}

inline SemanticGroups group(const std::string& pred, const std::string& obj, std::vector<std::string> ids,
                            std::optional<std::int64_t> verb = std::nullopt,
                            std::optional<std::int64_t> noun = std::nullopt) {
  SemanticGroups g;
  g.roles = {RoleGroup{pred, pred, verb}, RoleGroup{obj, obj, noun}};
  g.description = pred + " the " + obj;
  g.source_record_ids = std::move(ids);
  return g;
}

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int n = 0;
    path = std::filesystem::temp_directory_path() /
           ("misengine-test-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace misengine::test
