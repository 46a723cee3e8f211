#include "roles/grouping.hpp"

#include <algorithm>
#include <unordered_map>

#include "common/error.hpp"
#include "roles/canonical.hpp"

namespace misengine {
namespace {

std::optional<std::int64_t> majority(std::vector<std::int64_t> ids) {
  if (ids.empty()) return std::nullopt;
  std::sort(ids.begin(), ids.end());
  std::int64_t best = ids.front();
  std::size_t best_run = 0;
  for (std::size_t i = 0; i < ids.size();) {
    std::size_t j = i;
    while (j < ids.size() && ids[j] == ids[i]) ++j;
    if (j - i > best_run) {
      best_run = j - i;
      best = ids[i];
    }
    i = j;
  }
  return best;
}

}  // namespace

Json GroupingResult::counters() const {
  Json j;
  j["records_in"] = records_in;
  j["groups"] = groups.size();
  j["rejected"] = rejected;
  j["rejected_by_reason"] = rejected_by_reason;
  j["lexicon_misses"] = lexicon_misses;
  return j;
}

GroupingResult group_corpus(std::span<const ActionRecord> records, const GroupingOptions& options) {
  GroupingResult result;
  result.roles = options.roles;
  result.records_in = records.size();
  if (options.srl) {
    result.parser_info = {{"kind", "external-srl"}, {"entries", options.srl->size()}};
  } else {
    result.parser_info = {{"kind", "builtin"}, {"lexicon", options.lexicon->fingerprint()}};
  }

  std::vector<ParseResult> parsed(records.size(), Rejection{RejectReason::kEmpty, ""});
  std::vector<char> missed(records.size(), 0);
  parallel_for(records.size(), options.threads, [&](std::size_t i) {
    const auto& description = records[i].description;
    if (options.srl) {
      auto it = options.srl->find(description);
      if (it == options.srl->end()) {
        parsed[i] = Rejection{RejectReason::kNoExternalParse, "no external parse"};
      } else {
        parsed[i] = it->second;
      }
      return;
    }
    ParseNotes notes;
    parsed[i] = parse_description(description, options.roles, *options.lexicon, &notes);
    missed[i] = notes.lexicon_miss ? 1 : 0;
  });

  // Deterministic merge keyed by the role-key tuple.
  std::unordered_map<std::string, std::vector<std::size_t>> by_tuple;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (const auto* rej = std::get_if<Rejection>(&parsed[i])) {
      ++result.rejected;
      ++result.rejected_by_reason[std::string(reject_reason_name(rej->reason))];
      continue;
    }
    if (missed[i]) {
      ++result.lexicon_misses;
      const auto tokens = split_whitespace(records[i].description);
      if (!tokens.empty()) ++result.unknown_predicates[normalize_token(tokens.front())];
    }
    by_tuple[std::get<SemanticGroups>(parsed[i]).tuple_key()].push_back(i);
  }

  std::vector<std::pair<std::string, std::vector<std::size_t>>> ordered(by_tuple.begin(), by_tuple.end());
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  const auto pred_idx = options.roles.index_of(kPredicate);
  const auto obj_idx = options.roles.index_of(kObject);
  result.groups.reserve(ordered.size());
  for (auto& [tuple, members] : ordered) {
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return records[a].record_id < records[b].record_id; });
    SemanticGroups g = std::get<SemanticGroups>(parsed[members.front()]);
    g.description = records[members.front()].description;
    g.source_record_ids.clear();
    std::vector<std::int64_t> verbs, nouns;
    for (std::size_t m : members) {
      g.source_record_ids.push_back(records[m].record_id);
      if (records[m].taxonomy_verb) verbs.push_back(*records[m].taxonomy_verb);
      if (records[m].taxonomy_noun) nouns.push_back(*records[m].taxonomy_noun);
    }
    for (auto& rg : g.roles) rg.taxonomy.reset();
    if (pred_idx) g.roles[*pred_idx].taxonomy = majority(std::move(verbs));
    if (obj_idx) g.roles[*obj_idx].taxonomy = majority(std::move(nouns));
    result.groups.push_back(std::move(g));
  }
  return result;
}

std::string serialize_groups(const GroupingResult& result) {
  Json header;
  header["format"] = kGroupsFormat;
  header["version"] = kGroupsVersion;
  header["engine_version"] = kEngineVersion;
  header["roles"] = result.roles.names();
  header["parser"] = result.parser_info;
  header["counters"] = result.counters();
  std::string out = header.dump();
  out += '\n';
  for (std::size_t i = 0; i < result.groups.size(); ++i) {
    Json j = groups_to_json(result.groups[i], result.roles);
    j["id"] = i;
    out += j.dump();
    out += '\n';
  }
  return out;
}

GroupingResult parse_groups(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) fail(ErrorCode::kVersionMismatch, "groups file has no header");
  Json header;
  try {
    header = Json::parse(lines.front());
  } catch (const Json::exception&) {
    fail(ErrorCode::kVersionMismatch, "groups header is not JSON");
  }
  if (!header.is_object() || header.value("format", "") != kGroupsFormat ||
      header.value("version", -1) != kGroupsVersion) {
    fail(ErrorCode::kVersionMismatch, "not a version-1 groups file");
  }
  GroupingResult result;
  try {
    result.roles = RoleSet(header.at("roles").get<std::vector<std::string>>());
    result.parser_info = header.value("parser", Json::object());
    const auto& c = header.at("counters");
    result.records_in = c.at("records_in").get<std::size_t>();
    result.rejected = c.at("rejected").get<std::size_t>();
    result.rejected_by_reason = c.at("rejected_by_reason").get<std::map<std::string, std::size_t>>();
    result.lexicon_misses = c.at("lexicon_misses").get<std::size_t>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::kSchemaMismatch, std::string("groups header: ") + e.what());
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      result.groups.push_back(groups_from_json(Json::parse(lines[i]), result.roles));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kSchemaMismatch, e.what(), i + 1);
    }
  }
  return result;
}

void save_groups(const GroupingResult& result, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_groups(result));
}

GroupingResult load_groups(const std::filesystem::path& path) { return parse_groups(read_file(path)); }

}  // namespace misengine
