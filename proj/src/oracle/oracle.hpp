#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpus/record.hpp"
#include "eval/metrics.hpp"
#include "generator/dataset.hpp"
#include "matcher/matcher.hpp"
#include "roles/lexicon.hpp"
#include "synth/synth.hpp"

// Brute-force re-derivations used by tests and `selftest`. Nothing here goes
// through posting lists, candidate pools or the sampler.
namespace misengine::oracle {

struct Check {
  Check() = default;
  explicit Check(std::string check_name) : name(std::move(check_name)) {}

  std::string name;
  std::uint64_t checked = 0;
  std::uint64_t mismatches = 0;
  std::vector<std::string> examples;  // first few mismatches

  bool ok() const { return mismatches == 0 && checked > 0; }
  void expect(bool good, const std::string& what);
  void merge(const Check& other);
  Json to_json() const;
};

// All j != g whose per-role comparison against g gives exactly `cat`,
// by scanning every group.
std::vector<GroupId> brute_candidates(const RoleIndex& index, GroupId g, MisalignmentCategory cat);

// candidates() against brute_candidates() for every (group, category), and
// that the categories partition the other groups.
Check check_candidates(const RoleIndex& index);

// Labels against the generator-side truth of synthetic records.
Check check_labels_truth(const MistakeDataset& dataset, const std::unordered_map<std::string, SynthTruth>& truth);

// Labels re-derived from the raw instruction and attempt descriptions:
// re-parse both, compare canonical spans (character roles) or the records'
// majority class ids (taxonomy roles).
Check check_labels_reparse(const MistakeDataset& dataset, std::span<const ActionRecord> records,
                           const VerbLexicon& lexicon = VerbLexicon::builtin());

// Structural contract: eligible set equals the brute-force eligible set,
// each instruction has exactly Gamma samples with the configured per-category
// counts, distinct descriptions and records, attempt record inside its group,
// detection label = OR of role labels, category mask = labels.
Check check_dataset_shape(const MistakeDataset& dataset, const RoleIndex& index);

// Confusion counts by enumeration; F1 via precision and recall.
BinaryMetrics brute_confusion(std::span<const ScoredLabel> pairs, double threshold);

}  // namespace misengine::oracle
