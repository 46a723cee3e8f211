#include "roles/lexicon.hpp"

#include <algorithm>

#include "common/io.hpp"
#include "roles/builtin_lexicon.hpp"
#include "roles/canonical.hpp"

namespace misengine {

VerbLexicon VerbLexicon::from_text(const std::string& text) {
  VerbLexicon lex;
  for (const auto& raw : split_lines(text)) {
    const auto hash = raw.find('#');
    const std::string line = raw.substr(0, hash);
    std::vector<std::string> tokens;
    for (const auto& t : split_whitespace(line)) {
      auto n = normalize_token(t);
      if (!n.empty()) tokens.push_back(std::move(n));
    }
    if (tokens.empty()) continue;
    std::string phrase;
    for (const auto& t : tokens) {
      if (!phrase.empty()) phrase += ' ';
      phrase += t;
    }
    lex.max_tokens_ = std::max(lex.max_tokens_, tokens.size());
    lex.phrases_.insert(std::move(phrase));
  }
  return lex;
}

VerbLexicon VerbLexicon::from_file(const std::filesystem::path& path) { return from_text(read_file(path)); }

const VerbLexicon& VerbLexicon::builtin() {
  static const VerbLexicon lex = from_text(std::string(kBuiltinVerbLexicon));
  return lex;
}

std::size_t VerbLexicon::longest_prefix_match(std::span<const std::string> tokens) const {
  const std::size_t limit = std::min(max_tokens_, tokens.size());
  std::vector<std::string> norm;
  norm.reserve(limit);
  for (std::size_t i = 0; i < limit; ++i) norm.push_back(normalize_token(tokens[i]));
  for (std::size_t len = limit; len > 0; --len) {
    std::string phrase;
    for (std::size_t i = 0; i < len; ++i) {
      if (i) phrase += ' ';
      phrase += norm[i];
    }
    if (phrases_.count(phrase)) return len;
  }
  return 0;
}

std::string VerbLexicon::fingerprint() const {
  std::vector<std::string> sorted(phrases_.begin(), phrases_.end());
  std::sort(sorted.begin(), sorted.end());
  std::string joined;
  for (const auto& p : sorted) {
    joined += p;
    joined += '\n';
  }
  return hex64(fnv1a64(joined));
}

}  // namespace misengine
