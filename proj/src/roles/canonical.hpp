#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace misengine {

// Lowercase (ASCII), drop ASCII punctuation, collapse whitespace, then strip
// leading articles (a, an, the) until none remain. Idempotent. Non-ASCII
// bytes pass through untouched.
std::string canonicalize(std::string_view surface);

// Lowercase + punctuation strip for a single token, no article handling.
std::string normalize_token(std::string_view token);

std::vector<std::string> split_whitespace(std::string_view text);

}  // namespace misengine
