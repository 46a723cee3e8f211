#include "roles/canonical.hpp"

namespace misengine {
namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_ascii_punct(unsigned char c) {
  return (c >= 0x21 && c <= 0x2f) || (c >= 0x3a && c <= 0x40) || (c >= 0x5b && c <= 0x60) ||
         (c >= 0x7b && c <= 0x7e);
}

char lower(unsigned char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c); }

bool is_article(std::string_view w) { return w == "a" || w == "an" || w == "the"; }

}  // namespace

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (is_space(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += static_cast<char>(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string normalize_token(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (unsigned char c : token) {
    if (is_ascii_punct(c)) continue;
    out += lower(c);
  }
  return out;
}

std::string canonicalize(std::string_view surface) {
  std::string stripped;
  stripped.reserve(surface.size());
  for (unsigned char c : surface) {
    if (is_ascii_punct(c)) continue;
    stripped += lower(c);
  }
  const auto words = split_whitespace(stripped);
  std::size_t first = 0;
  while (first < words.size() && is_article(words[first])) ++first;
  std::string out;
  for (std::size_t i = first; i < words.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += words[i];
  }
  return out;
}

}  // namespace misengine
