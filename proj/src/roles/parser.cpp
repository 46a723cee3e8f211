#include "roles/parser.hpp"

#include <array>
#include <span>

#include "common/error.hpp"
#include "roles/canonical.hpp"

namespace misengine {
namespace {

constexpr std::array<std::string_view, 20> kClauseBoundaries = {
    "with", "on", "onto", "in",   "into",    "from",  "to",    "using", "at",  "for",
    "under", "over", "inside", "towards", "toward", "and", "then", "while", "by", "through"};

bool is_boundary(const std::string& token) {
  const std::string n = normalize_token(token);
  for (auto b : kClauseBoundaries) {
    if (n == b) return true;
  }
  return false;
}

std::string join(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace

std::string_view reject_reason_name(RejectReason reason) {
  switch (reason) {
    case RejectReason::kEmpty: return "Empty";
    case RejectReason::kMissingRole: return "MissingRole";
    case RejectReason::kNoExternalParse: return "NoExternalParse";
  }
  return "Unknown";
}

std::string_view first_sentence(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.' || c == '!' || c == '?' || c == ';') {
      const bool at_end = i + 1 == text.size();
      if (at_end || text[i + 1] == ' ' || text[i + 1] == '\t' || text[i + 1] == '\n' || text[i + 1] == '\r') {
        return text.substr(0, i);
      }
    }
  }
  return text;
}

ParseResult parse_description(std::string_view text, const RoleSet& roles, const VerbLexicon& lexicon,
                              ParseNotes* notes) {
  for (const auto& r : roles.names()) {
    if (r != kPredicate && r != kObject && r != kComplement) {
      fail(ErrorCode::kUnknownRoleLabel, "built-in parser has no rule for role '" + r + "'");
    }
  }
  const auto tokens = split_whitespace(first_sentence(text));
  if (tokens.empty()) return Rejection{RejectReason::kEmpty, "empty description"};

  std::size_t verb_len = lexicon.longest_prefix_match(tokens);
  if (verb_len == 0) {
    verb_len = 1;
    if (notes) notes->lexicon_miss = true;
  }
  const std::span<const std::string> all(tokens);
  const auto predicate = all.subspan(0, verb_len);
  const auto rest = all.subspan(verb_len);
  std::size_t object_len = rest.size();
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (i > 0 && is_boundary(rest[i])) {
      object_len = i;
      break;
    }
    // "the sauce, slowly": a trailing comma closes the object
    if (rest[i].size() > 1 && rest[i].back() == ',') {
      object_len = i + 1;
      break;
    }
  }
  const auto object = rest.subspan(0, object_len);
  const auto complement = rest.subspan(object_len);

  SemanticGroups g;
  g.description = std::string(text);
  for (const auto& role : roles.names()) {
    std::span<const std::string> span = role == kPredicate ? predicate : role == kObject ? object : complement;
    RoleGroup rg{join(span), canonicalize(join(span)), std::nullopt};
    if (rg.key.empty()) return Rejection{RejectReason::kMissingRole, "no " + role + " span"};
    g.roles.push_back(std::move(rg));
  }
  return g;
}

}  // namespace misengine
