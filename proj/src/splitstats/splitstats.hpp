#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corpus/record.hpp"
#include "generator/dataset.hpp"

namespace misengine {

enum class SplitUnit { kInstruction, kSample };

struct SplitSpec {
  std::array<double, 3> ratios{8, 1, 1};  // train, val, test; non-negative, not all zero
  SplitUnit unit = SplitUnit::kInstruction;
  std::uint64_t seed = 0;

  // "8:1:1"
  static std::array<double, 3> parse_ratios(const std::string& text);
  void validate() const;
  Json to_json() const;
};

inline constexpr std::array<std::string_view, 3> kSplitNames{"train", "val", "test"};

struct SplitResult {
  std::array<std::vector<std::string>, 3> sample_ids;  // dataset order within each part
  std::array<std::size_t, 3> instructions{};
};

// Seeded shuffle of instructions (or samples), then cut by cumulative sample
// count. Instruction unit: a unit lands in the first part whose cumulative
// boundary exceeds the samples already placed, so each part is within one
// instruction's sample count of its target. Sample unit: largest-remainder
// counts, within 1 of target. kRatioInfeasible when fewer units than
// non-zero parts.
SplitResult split(const MistakeDataset& dataset, const SplitSpec& spec);

// One file per part: a '#'-prefixed JSON header line, then one id per line.
void write_split_files(const SplitResult& result, const SplitSpec& spec, const MistakeDataset& dataset,
                       const std::filesystem::path& dir);
std::vector<std::string> read_split_file(const std::filesystem::path& path);

struct StatsReport {
  std::uint64_t total_samples = 0;
  std::uint64_t activities = 0;  // unique instructions
  double samples_per_activity = 0;
  std::optional<std::uint64_t> participants;
  std::optional<std::uint64_t> environments;
  std::vector<std::pair<std::string, std::uint64_t>> per_category;
  double temporal_percent = 0;  // samples with a PNR frame
  double spatial_percent = 0;   // samples with a grounding box

  Json to_json() const;
  std::string to_table() const;
};

// Participant/environment counts come from the attempt records when
// `records` is given and at least one attempt carries the field.
StatsReport stats(const MistakeDataset& dataset, std::span<const ActionRecord> records = {});

}  // namespace misengine
