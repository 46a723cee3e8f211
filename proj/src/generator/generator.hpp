#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "common/rng.hpp"
#include "corpus/record.hpp"
#include "generator/dataset.hpp"
#include "roles/grouping.hpp"

namespace misengine {

// Index plus attempt-video bookkeeping: which store rows belong to each
// group, and for every per-category video threshold the sorted list of groups
// that can supply that many distinct videos.
class CandidatePools {
 public:
  CandidatePools(const RoleIndex& index, std::span<const ActionRecord> records, const SamplerConfig& config);

  const RoleIndex& index() const { return index_; }
  std::span<const std::uint32_t> rows(GroupId g) const { return rows_[g]; }

  // Groups j with category(g, j) == cat that own at least `min_videos`
  // records. For the No Mistake category g itself is a member.
  std::size_t pool_size(GroupId g, MisalignmentCategory cat, std::uint32_t min_videos) const;
  std::vector<GroupId> pool_members(GroupId g, MisalignmentCategory cat, std::uint32_t min_videos) const;

  // Sorted groups owning >= min_videos records. min_videos must be one of the
  // configured thresholds.
  std::span<const GroupId> universe(std::uint32_t min_videos) const;

 private:
  const RoleIndex& index_;
  std::vector<std::vector<std::uint32_t>> rows_;
  std::unordered_map<std::uint32_t, std::vector<GroupId>> universe_;

  std::vector<GroupId> shared_with(GroupId g) const;  // union of g's postings
};

// First category (mask order) g cannot fill, or nullopt if eligible.
std::optional<MisalignmentCategory> first_unfillable(const CandidatePools& pools, GroupId g,
                                                     const SamplerConfig& config);
bool eligible(const CandidatePools& pools, GroupId g, const SamplerConfig& config);

struct Assignment {
  MisalignmentCategory category;
  GroupId description = 0;
  std::uint32_t record_row = 0;  // index into the store records
  std::uint32_t ordinal = 0;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

// Stable per-instruction stream key: hash of the group's role-key tuple.
std::uint64_t instruction_stream_key(const SemanticGroups& g);

// Gamma assignments for instruction g in category-mask order. Per category:
// draw `descriptions` distinct pool members, then `videos` distinct records
// from each, uniformly without replacement. kInsufficientCandidates when g is
// not eligible.
std::vector<Assignment> sample_for_instruction(const CandidatePools& pools, GroupId g, const SamplerConfig& config);

// Steps 1-3 over a built index. Output is sorted by (instruction group,
// category, ordinal) and independent of `threads`.
MistakeDataset generate(std::span<const ActionRecord> records, const RoleIndex& index, const SamplerConfig& config,
                        unsigned threads = 1);

// Convenience: group, index and generate.
MistakeDataset generate_from_records(std::span<const ActionRecord> records, const GroupingOptions& grouping,
                                     const SamplerConfig& config, unsigned threads = 1);

}  // namespace misengine
