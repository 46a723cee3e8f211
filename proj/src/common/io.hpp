#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace misengine {

using Json = nlohmann::json;

inline constexpr std::string_view kEngineVersion = "1.0.0";

// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

// Splits on '\n', dropping a trailing '\r' on each line and a final empty line.
std::vector<std::string> split_lines(std::string_view text);

// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t value);

// Hash of the canonical (key-sorted, compact) JSON dump.
std::string config_hash(const Json& config);

// Runs body(i) for i in [0, count) over `threads` workers with static
// contiguous chunking. Exceptions from workers are rethrown (first by index).
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

unsigned resolve_threads(unsigned requested);

}  // namespace misengine
