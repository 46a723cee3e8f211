#include "roles/srl_import.hpp"

#include <regex>

#include "common/error.hpp"
#include "roles/canonical.hpp"

namespace misengine {
namespace {

// Per-token role label ("" = outside every mapped span).
using TokenLabels = std::vector<std::string>;

TokenLabels labels_from_spans(const Json& spans, std::size_t n_tokens, std::size_t line) {
  TokenLabels out(n_tokens);
  if (!spans.is_object()) throw Error(ErrorCode::kSchemaMismatch, "'spans' must be an object", line);
  for (auto it = spans.begin(); it != spans.end(); ++it) {
    const auto& range = it.value();
    if (!range.is_array() || range.size() != 2 || !range[0].is_number_integer() || !range[1].is_number_integer()) {
      throw Error(ErrorCode::kSchemaMismatch, "span for '" + it.key() + "' must be [begin, end)", line);
    }
    const auto b = range[0].get<long long>();
    const auto e = range[1].get<long long>();
    if (b < 0 || e > static_cast<long long>(n_tokens) || b >= e) {
      throw Error(ErrorCode::kSpanOutOfRange,
                  "span '" + it.key() + "' [" + std::to_string(b) + "," + std::to_string(e) + ") over " +
                      std::to_string(n_tokens) + " tokens",
                  line);
    }
    for (auto i = b; i < e; ++i) out[static_cast<std::size_t>(i)] = it.key();
  }
  return out;
}

TokenLabels labels_from_tags(const Json& tags, std::size_t n_tokens, std::size_t line) {
  if (!tags.is_array()) throw Error(ErrorCode::kSchemaMismatch, "'tags' must be an array", line);
  if (tags.size() != n_tokens) {
    throw Error(ErrorCode::kSpanOutOfRange,
                std::to_string(tags.size()) + " tags for " + std::to_string(n_tokens) + " tokens", line);
  }
  TokenLabels out(n_tokens);
  for (std::size_t i = 0; i < n_tokens; ++i) {
    const auto tag = tags[i].get<std::string>();
    if (tag == "O") continue;
    if (tag.size() < 3 || (tag[0] != 'B' && tag[0] != 'I') || tag[1] != '-') {
      throw Error(ErrorCode::kUnknownRoleLabel, "bad BIO tag '" + tag + "'", line);
    }
    out[i] = tag.substr(2);
  }
  return out;
}

}  // namespace

bool is_propbank_label(const std::string& label) {
  static const std::regex re(R"(^(V|ARG[0-5A]|ARGM-[A-Z]+|[RC]-(ARG[0-5A]|ARGM-[A-Z]+|V))$)");
  return std::regex_match(label, re);
}

SrlLabelMap SrlLabelMap::parse(const std::string& spec) {
  SrlLabelMap m;
  m.label_to_role.clear();
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    auto comma = spec.find(',', pos);
    if (comma == std::string::npos) comma = spec.size();
    const std::string pair = spec.substr(pos, comma - pos);
    if (!pair.empty()) {
      const auto eq = pair.find('=');
      if (eq == std::string::npos) fail(ErrorCode::kUsage, "label map entry needs LABEL=Role: " + pair);
      m.label_to_role[pair.substr(0, eq)] = pair.substr(eq + 1);
    }
    pos = comma + 1;
  }
  return m;
}

SrlImportResult import_external_srl_text(const std::string& text, const RoleSet& roles, const SrlLabelMap& labels) {
  for (const auto& [label, role] : labels.label_to_role) {
    if (!is_propbank_label(label)) fail(ErrorCode::kUnknownRoleLabel, "label map uses unknown label '" + label + "'");
    if (!roles.index_of(role)) fail(ErrorCode::kInvalidArgument, "label map targets role '" + role + "' not in role set");
  }
  SrlImportResult result;
  const auto lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t line = li + 1;
    if (lines[li].find_first_not_of(" \t") == std::string::npos) continue;
    Json entry;
    try {
      entry = Json::parse(lines[li]);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kSchemaMismatch, e.what(), line);
    }
    if (li == 0 && entry.is_object() && entry.contains("format")) continue;
    if (!entry.is_object()) throw Error(ErrorCode::kSchemaMismatch, "entry must be an object", line);
    ++result.entries;

    try {
      std::string description;
      std::vector<std::string> tokens;
      TokenLabels token_labels;
      if (entry.contains("verbs")) {
        tokens = entry.at("words").get<std::vector<std::string>>();
        description = entry.contains("description") ? entry["description"].get<std::string>() : "";
        if (description.empty()) {
          for (const auto& w : tokens) description += (description.empty() ? "" : " ") + w;
        }
        const auto& frames = entry["verbs"];
        if (!frames.is_array() || frames.empty()) {
          ++result.rejected;
          result.warnings.push_back("line " + std::to_string(line) + ": no verb frame");
          continue;
        }
        token_labels = labels_from_tags(frames[0].at("tags"), tokens.size(), line);
      } else {
        description = entry.at("description").get<std::string>();
        tokens = entry.contains("tokens") ? entry["tokens"].get<std::vector<std::string>>() : split_whitespace(description);
        if (entry.contains("spans")) {
          token_labels = labels_from_spans(entry["spans"], tokens.size(), line);
        } else if (entry.contains("tags")) {
          token_labels = labels_from_tags(entry["tags"], tokens.size(), line);
        } else {
          throw Error(ErrorCode::kSchemaMismatch, "entry needs 'spans' or 'tags'", line);
        }
      }

      std::vector<std::string> surface(roles.size());
      for (std::size_t t = 0; t < tokens.size(); ++t) {
        const auto& label = token_labels[t];
        if (label.empty()) continue;
        if (!is_propbank_label(label)) throw Error(ErrorCode::kUnknownRoleLabel, "unknown label '" + label + "'", line);
        auto it = labels.label_to_role.find(label);
        if (it == labels.label_to_role.end()) continue;
        auto& s = surface[*roles.index_of(it->second)];
        if (!s.empty()) s += ' ';
        s += tokens[t];
      }
      SemanticGroups g;
      g.description = description;
      bool complete = true;
      for (std::size_t r = 0; r < roles.size(); ++r) {
        RoleGroup rg{surface[r], canonicalize(surface[r]), std::nullopt};
        if (rg.key.empty()) {
          complete = false;
          break;
        }
        g.roles.push_back(std::move(rg));
      }
      if (!complete) {
        ++result.rejected;
        result.warnings.push_back("line " + std::to_string(line) + ": entry does not cover every role");
        continue;
      }
      result.parses.push_back(std::move(g));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kSchemaMismatch, e.what(), line);
    }
  }
  return result;
}

SrlImportResult import_external_srl(const std::filesystem::path& path, const RoleSet& roles,
                                    const SrlLabelMap& labels) {
  return import_external_srl_text(read_file(path), roles, labels);
}

SrlTable make_srl_table(const SrlImportResult& result) {
  SrlTable table;
  for (const auto& g : result.parses) table.emplace(g.description, g);
  return table;
}

}  // namespace misengine
