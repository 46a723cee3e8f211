#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oracle/oracle.hpp"

namespace misengine {

struct SelftestOptions {
  std::uint64_t seed = 1;
  std::uint32_t random_corpora = 4;
  std::uint32_t groups = 120;
  unsigned threads = 1;
};

struct SelftestReport {
  std::vector<oracle::Check> checks;

  bool ok() const;
  Json to_json() const;
  // One aligned line per check plus a verdict line.
  std::string summary() const;
};

// Runs the brute-force oracles over the bundled toy corpora and a few seeded
// random synthetic corpora, under both comparators.
SelftestReport run_selftest(const SelftestOptions& options = {});

// Bundled toy inputs.
const char* toy_table_text();
const char* toy_table_mapping();
const char* toy_clips_text();

}  // namespace misengine
