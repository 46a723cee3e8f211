#include "selftest/selftest.hpp"

#include <cmath>
#include <cstdio>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "corpus/ingest.hpp"
#include "generator/generator.hpp"
#include "roles/grouping.hpp"
#include "selftest/toy_data.hpp"

namespace misengine {

const char* toy_table_text() { return toy::kKitchenTable; }
const char* toy_clips_text() { return toy::kClips; }
const char* toy_table_mapping() {
  return "id=narration_id,video=video_uid,start=start_frame,end=end_frame,fps=fps,description=narration,"
         "verb_class=verb_class,noun_class=noun_class,pnr=pnr_frame,participant=participant,environment=scenario,"
         "width=width,height=height";
}

bool SelftestReport::ok() const {
  for (const auto& c : checks) {
    if (!c.ok()) return false;
  }
  return !checks.empty();
}

Json SelftestReport::to_json() const {
  Json arr = Json::array();
  for (const auto& c : checks) arr.push_back(c.to_json());
  return {{"ok", ok()}, {"checks", arr}};
}

std::string SelftestReport::summary() const {
  std::size_t width = 0;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  std::string out;
  std::uint64_t total = 0, bad = 0;
  for (const auto& c : checks) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "  %llu checked, %llu mismatches  %s\n", static_cast<unsigned long long>(c.checked),
                  static_cast<unsigned long long>(c.mismatches), c.ok() ? "ok" : "FAIL");
    out += c.name;
    out.append(width - c.name.size(), ' ');
    out += buf;
    for (const auto& e : c.examples) out += "    " + e + "\n";
    total += c.checked;
    bad += c.mismatches;
  }
  out += "oracle match: " + std::to_string(total - bad) + "/" + std::to_string(total) + (ok() ? " OK\n" : " FAILED\n");
  return out;
}

namespace {

void run_pipeline(SelftestReport& rep, const std::string& label, std::span<const ActionRecord> records,
                  const SamplerConfig& config, unsigned threads, const SynthCorpus* synth) {
  GroupingOptions gopt;
  gopt.roles = config.roles;
  gopt.threads = threads;
  const auto grouping = group_corpus(records, gopt);
  const auto index = build_index(grouping.groups, config.roles, config.comparator);

  auto cand = oracle::check_candidates(index);
  cand.name = label + "/candidates";
  rep.checks.push_back(cand);

  const auto dataset = generate(records, index, config, threads);
  oracle::Check nonempty{label + "/retained"};
  nonempty.expect(!dataset.samples.empty(), "no instruction retained");
  rep.checks.push_back(nonempty);

  auto shape = oracle::check_dataset_shape(dataset, index);
  shape.name = label + "/shape";
  rep.checks.push_back(shape);

  auto reparse = oracle::check_labels_reparse(dataset, records);
  reparse.name = label + "/labels-reparse";
  rep.checks.push_back(reparse);

  if (synth) {
    auto truth = oracle::check_labels_truth(dataset, synth->truth);
    truth.name = label + "/labels-truth";
    rep.checks.push_back(truth);
  }
}

SamplerConfig with(SamplerConfig config, CompareMode mode, std::uint64_t seed) {
  config.comparator = Comparator{mode, {}};
  config.seed = seed;
  return config;
}

}  // namespace

SelftestReport run_selftest(const SelftestOptions& options) {
  SelftestReport rep;
  const RoleSet roles;
  const auto small = SamplerConfig::uniform(roles, 1, 1);

  const auto table = ingest_table_text(toy_table_text(), ColumnMapping::parse(toy_table_mapping()));
  const auto clips = ingest_structured_text(toy_clips_text());
  for (auto mode : {CompareMode::kCharacter, CompareMode::kTaxonomy}) {
    const std::string m(compare_mode_name(mode));
    run_pipeline(rep, "toy-table/" + m, table.records, with(small, mode, options.seed), options.threads, nullptr);
    run_pipeline(rep, "toy-clips/" + m, clips.records, with(small, mode, options.seed), options.threads, nullptr);
  }

  for (std::uint32_t i = 0; i < options.random_corpora; ++i) {
    RandomSpec spec;
    spec.groups = options.groups;
    spec.seed = options.seed * 1000 + i;
    const auto corpus = synth_random(spec);
    const std::string base = "random" + std::to_string(i);
    run_pipeline(rep, base + "/ego4d-paper", corpus.records,
                 with(SamplerConfig::from_preset("ego4d-paper"), CompareMode::kTaxonomy, spec.seed), options.threads,
                 &corpus);
    run_pipeline(rep, base + "/epic-paper", corpus.records,
                 with(SamplerConfig::from_preset("epic-paper"), CompareMode::kCharacter, spec.seed), options.threads,
                 &corpus);
  }

  oracle::Check metrics{"metrics/binary-vs-confusion"};
  Rng rng = Rng::stream(options.seed, 0x6d6574726963);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<ScoredLabel> pairs(1 + rng.below(40));
    for (auto& p : pairs) p = {static_cast<double>(rng.below(5)) / 4.0, rng.below(2) == 1};
    const double t = static_cast<double>(rng.below(5)) / 4.0;
    const auto a = binary_metrics(pairs, t);
    const auto b = oracle::brute_confusion(pairs, t);
    metrics.expect(a.tp == b.tp && a.fp == b.fp && a.fn == b.fn && a.tn == b.tn &&
                       std::abs(a.f1 - b.f1) <= 1e-12 && std::abs(a.accuracy - b.accuracy) <= 1e-12,
                   "trial " + std::to_string(trial));
  }
  rep.checks.push_back(metrics);
  return rep;
}

}  // namespace misengine
