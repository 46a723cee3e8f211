#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpus/record.hpp"

namespace misengine {

// Ground truth behind a synthetic record's description, used by oracles that
// must not go through the parser.
struct SynthTruth {
  std::string verb;  // canonical verb phrase
  std::string noun;  // canonical object phrase
  std::int64_t verb_class = 0;
  std::int64_t noun_class = 0;
};

struct SynthCorpus {
  std::vector<ActionRecord> records;
  std::unordered_map<std::string, SynthTruth> truth;  // record id -> truth
};

// Full verb x noun grid: every (verb, noun) pair is one group with exactly
// `records_per_group` records, plus `noise_groups` single-record groups on
// nouns outside the grid (never eligible). With enough records per group
// every grid cell is eligible under both presets.
struct GridSpec {
  std::uint32_t verbs = 4;
  std::uint32_t nouns = 4;
  std::uint32_t records_per_group = 4;
  std::uint32_t noise_groups = 0;
  std::uint32_t participants = 8;
  std::uint32_t environments = 4;
  std::uint64_t seed = 0;
  // Vary surface forms (case, articles, trailing clauses) within a group.
  bool surface_variants = true;
};

// Random groups drawn from a verb/noun vocabulary sized for `groups`;
// records per group uniform in [1, max_records_per_group]. Verb classes
// pair up verbs so the taxonomy comparator merges what text keeps apart.
struct RandomSpec {
  std::uint32_t groups = 100;
  std::uint32_t max_records_per_group = 6;
  std::uint32_t participants = 8;
  std::uint32_t environments = 4;
  std::uint64_t seed = 0;
  // Fraction of records without PNR / boxes.
  double missing_pnr = 0.1;
  double missing_boxes = 0.1;
};

SynthCorpus synth_grid(const GridSpec& spec);
SynthCorpus synth_random(const RandomSpec& spec);

// Verb phrases usable by the generators; each is a whole lexicon entry.
const std::vector<std::string>& synth_verbs();

}  // namespace misengine
