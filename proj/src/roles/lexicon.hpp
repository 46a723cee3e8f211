#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace misengine {

// Verb phrases ("pick up", "stir") used to find the predicate span.
class VerbLexicon {
 public:
  // One phrase per line, '#' starts a comment.
  static VerbLexicon from_text(const std::string& text);
  static VerbLexicon from_file(const std::filesystem::path& path);
  // The lexicon shipped in data/verb_lexicon.txt, compiled in.
  static const VerbLexicon& builtin();

  // Number of leading tokens forming the longest lexicon entry, 0 if none.
  // Tokens are compared after normalize_token().
  std::size_t longest_prefix_match(std::span<const std::string> tokens) const;

  std::size_t size() const { return phrases_.size(); }
  // Hash of the sorted entry list; recorded in group-file headers.
  std::string fingerprint() const;

 private:
  std::unordered_set<std::string> phrases_;
  std::size_t max_tokens_ = 0;
};

}  // namespace misengine
