#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "roles/lexicon.hpp"
#include "roles/semantic_groups.hpp"

namespace misengine {

enum class RejectReason { kEmpty, kMissingRole, kNoExternalParse };

std::string_view reject_reason_name(RejectReason reason);

struct Rejection {
  RejectReason reason;
  std::string detail;
};

using ParseResult = std::variant<SemanticGroups, Rejection>;

struct ParseNotes {
  // The leading token was not in the lexicon and was taken as the predicate.
  bool lexicon_miss = false;
};

// Rule-based parse of the first sentence of `text`.
//   Predicate  = longest lexicon phrase at the start (first token on a miss)
//   Object     = following tokens up to the first clause boundary word
//                (with, on, into, ...) or through the first token ending in
//                a comma; a boundary word must follow at least one object
//                token
//   Complement = tokens from that boundary to the end of the sentence
// Roles outside {Predicate, Object, Complement} raise kUnknownRoleLabel.
// Taxonomy ids and source records are left empty.
ParseResult parse_description(std::string_view text, const RoleSet& roles,
                              const VerbLexicon& lexicon = VerbLexicon::builtin(), ParseNotes* notes = nullptr);

// Text up to the first '.', '!', '?' or ';' that is followed by whitespace
// or the end of input.
std::string_view first_sentence(std::string_view text);

}  // namespace misengine
