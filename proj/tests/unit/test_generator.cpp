#include <doctest.h>

#include <set>

#include "common/error.hpp"
#include "generator/generator.hpp"
#include "generator/spatial.hpp"
#include "helpers.hpp"
#include "oracle/oracle.hpp"
#include "synth/synth.hpp"

using namespace misengine;

namespace {

const RoleSet kRoles;

struct Built {
  std::vector<ActionRecord> records;
  GroupingResult grouping;
  RoleIndex index;
};

Built build(std::vector<ActionRecord> records, const Comparator& cmp = {}) {
  Built b{std::move(records), {}, {}};
  b.grouping = group_corpus(b.records, GroupingOptions{});
  b.index = build_index(b.grouping.groups, kRoles, cmp);
  return b;
}

GroupId id_of(const RoleIndex& index, const std::string& record_id) {
  const auto gs = index.groups();
  for (GroupId g = 0; g < gs.size(); ++g) {
    for (const auto& id : gs[g].source_record_ids) {
      if (id == record_id) return g;
    }
  }
  FAIL("no group holds " << record_id);
  return 0;
}

// (a,x) (a,y) (b,x) (c,y) (b,z): exactly the first three are eligible under 1x1 counts.
std::vector<ActionRecord> three_eligible() {
  return {test::record("ax", "add the xylophone"), test::record("ay", "add the yam"),
          test::record("bx", "boil the xylophone"), test::record("cy", "cut the yam"),
          test::record("bz", "boil the zucchini")};
}

}  // namespace

TEST_CASE("union of boxes") {
  const BBox b{3, 4, 5, 6};
  CHECK(union_boxes(std::vector<BBox>{b}) == b);
  CHECK(union_boxes(std::vector<BBox>{{0, 0, 2, 2}, {1, 1, 2, 2}}) == BBox{0, 0, 3, 3});
  CHECK(union_boxes(std::vector<BBox>{{0, 0, 10, 10}, {2, 2, 3, 3}}) == BBox{0, 0, 10, 10});
  CHECK_THROWS_AS(union_boxes(std::vector<BBox>{}), Error);
}

TEST_CASE("spatial annotation rules") {
  const std::optional<std::vector<BBox>> hands = std::vector<BBox>{{0, 0, 10, 10}, {20, 20, 5, 5}};
  const std::optional<std::vector<BBox>> one_hand = std::vector<BBox>{{7, 8, 9, 10}};
  const std::optional<std::vector<BBox>> objects = std::vector<BBox>{{30, 30, 10, 10}};
  CHECK(spatial_annotation(kRoles, {1}, one_hand, objects) == BBox{7, 8, 9, 10});
  CHECK(spatial_annotation(kRoles, {1}, hands, objects) == BBox{0, 0, 25, 25});
  CHECK(spatial_annotation(kRoles, {2}, hands, objects) == BBox{30, 30, 10, 10});
  CHECK(spatial_annotation(kRoles, {3}, hands, objects) == BBox{0, 0, 40, 40});
  CHECK_FALSE(spatial_annotation(kRoles, {0}, hands, objects));
  CHECK_FALSE(spatial_annotation(kRoles, {3}, hands, std::nullopt));
  CHECK_FALSE(spatial_annotation(kRoles, {1}, std::vector<BBox>{}, objects));
  CHECK_FALSE(spatial_annotation(kRoles, {2}, hands, std::nullopt));
}

TEST_CASE("size law") {
  CHECK(dataset_size(16099, SamplerConfig::from_preset("ego4d-paper").gamma()) == 257584);
  CHECK(dataset_size(12283, SamplerConfig::from_preset("epic-paper").gamma()) == 221094);
  CHECK(SamplerConfig::from_preset("ego4d-paper").gamma() == 16);
  CHECK(SamplerConfig::from_preset("epic-paper").gamma() == 18);
  CHECK_THROWS_AS(dataset_size(std::uint64_t{1} << 40, std::uint64_t{1} << 30), Error);
  CHECK_THROWS_AS(SamplerConfig::from_preset("nope"), Error);
}

TEST_CASE("sampler config validation and JSON round trip") {
  auto c = SamplerConfig::from_preset("epic-paper");
  c.seed = 99;
  const auto back = SamplerConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  c.counts.pop_back();
  CHECK_THROWS_AS(c.validate(), Error);
  auto z = SamplerConfig::uniform(kRoles, 1, 0);
  CHECK_THROWS_AS(z.validate(), Error);
}

TEST_CASE("eligibility: five object candidates pass a threshold of four") {
  GridSpec spec;
  spec.verbs = 2;
  spec.nouns = 6;
  spec.records_per_group = 1;
  const auto corpus = synth_grid(spec);
  const auto b = build(corpus.records);
  auto config = SamplerConfig::uniform(kRoles, 1, 1);
  config.counts[2] = {4, 1};
  const CandidatePools pools(b.index, b.records, config);
  const GroupId g = 0;
  CHECK(pools.pool_size(g, {2}, 1) == 5);
  CHECK(eligible(pools, g, config));
  config.counts[2] = {6, 1};
  const CandidatePools strict(b.index, b.records, config);
  CHECK(first_unfillable(strict, g, config) == MisalignmentCategory{2});
}

TEST_CASE("eligibility: no both-roles candidate means ineligible") {
  const auto b = build({test::record("ax", "add the xylophone"), test::record("ay", "add the yam"),
                        test::record("bx", "boil the xylophone")});
  const auto config = SamplerConfig::uniform(kRoles, 1, 1);
  const CandidatePools pools(b.index, b.records, config);
  CHECK(first_unfillable(pools, id_of(b.index, "ax"), config) == MisalignmentCategory{3});
  CHECK_THROWS_AS(sample_for_instruction(pools, id_of(b.index, "ax"), config), Error);
}

TEST_CASE("eligibility on a hand-made toy corpus matches the hand-listed set") {
  const auto b = build(three_eligible());
  const auto config = SamplerConfig::uniform(kRoles, 1, 1);
  const CandidatePools pools(b.index, b.records, config);
  std::set<std::string> got;
  for (GroupId g = 0; g < b.index.group_count(); ++g) {
    if (eligible(pools, g, config)) got.insert(b.index.groups()[g].source_record_ids.front());
  }
  CHECK(got == std::set<std::string>{"ax", "ay", "bx"});
}

TEST_CASE("no-mistake pool needs the instruction's own videos") {
  const auto b = build({test::record("ax", "add the xylophone"), test::record("ay", "add the yam"),
                        test::record("bx", "boil the xylophone"), test::record("by", "boil the yam")});
  auto config = SamplerConfig::uniform(kRoles, 1, 1);
  config.counts[0] = {1, 2};
  const CandidatePools pools(b.index, b.records, config);
  CHECK(first_unfillable(pools, 0, config) == MisalignmentCategory{0});
}

TEST_CASE("toy corpus: three eligible instructions, gamma 4, twelve label-checked samples") {
  const auto b = build(three_eligible());
  auto config = SamplerConfig::uniform(kRoles, 1, 1);
  config.seed = 5;
  const auto d = generate(b.records, b.index, config);
  CHECK(d.samples.size() == 12);
  CHECK(d.counters.eligible_instructions == 3);
  CHECK(d.counters.filtered_instructions == 2);
  CHECK(d.instruction_count() == 3);
  const auto labels = oracle::check_labels_reparse(d, b.records);
  CHECK(labels.mismatches == 0);
  CHECK(labels.checked == 12 * 3);
  const auto shape = oracle::check_dataset_shape(d, b.index);
  CHECK_MESSAGE(shape.mismatches == 0, (shape.examples.empty() ? "" : shape.examples.front()));
}

TEST_CASE("one instruction: gamma distinct attempt records") {
  GridSpec spec;
  spec.verbs = 3;
  spec.nouns = 3;
  spec.records_per_group = 3;
  const auto corpus = synth_grid(spec);
  const auto b = build(corpus.records);
  auto config = SamplerConfig::uniform(kRoles, 1, 1);
  const CandidatePools pools(b.index, b.records, config);
  const auto a = sample_for_instruction(pools, 0, config);
  REQUIRE(a.size() == 4);
  std::set<std::uint32_t> rows;
  for (const auto& x : a) rows.insert(x.record_row);
  CHECK(rows.size() == 4);
  CHECK(sample_for_instruction(pools, 0, config) == a);
}

TEST_CASE("different seeds give different draws when there is room") {
  GridSpec spec;
  spec.verbs = 5;
  spec.nouns = 5;
  spec.records_per_group = 3;
  const auto corpus = synth_grid(spec);
  const auto b = build(corpus.records);
  auto config = SamplerConfig::uniform(kRoles, 1, 1);
  config.seed = 11;
  const auto d1 = generate(b.records, b.index, config);
  config.seed = 12;
  const auto d2 = generate(b.records, b.index, config);
  REQUIRE(d1.samples.size() == d2.samples.size());
  std::size_t differ = 0;
  for (std::size_t i = 0; i < d1.samples.size(); ++i) differ += d1.samples[i].attempt_record_id != d2.samples[i].attempt_record_id;
  CHECK(differ > 0);
}

TEST_CASE("generation is independent of thread count and record order") {
  RandomSpec spec;
  spec.groups = 300;
  spec.seed = 3;
  auto corpus = synth_random(spec);
  auto config = SamplerConfig::from_preset("epic-paper");
  config.seed = 77;
  const auto b = build(corpus.records, config.comparator);
  const auto base = serialize_manifest(generate(b.records, b.index, config, 1));
  for (unsigned t : {2u, 4u, 8u}) CHECK(serialize_manifest(generate(b.records, b.index, config, t)) == base);

  GroupingOptions gopt;
  const auto from_records = generate_from_records(corpus.records, gopt, config, 3);
  Rng rng(1);
  shuffle(corpus.records, rng);
  const auto shuffled = generate_from_records(corpus.records, gopt, config, 1);
  // record rows move but every sample keeps its content
  CHECK(serialize_manifest(shuffled) == serialize_manifest(from_records));
}

TEST_CASE("pools are filtered by the video threshold") {
  // the only Object candidate has one record, the threshold asks for two
  const auto b = build({test::record("ax1", "add the xylophone"), test::record("ax2", "add the xylophone"),
                        test::record("ay", "add the yam")});
  auto config = SamplerConfig::uniform(kRoles, 1, 2);
  const CandidatePools pools(b.index, b.records, config);
  const auto g = id_of(b.index, "ax1");
  CHECK(pools.pool_size(g, {2}, 2) == 0);
  CHECK(pools.pool_size(g, {2}, 1) == 1);
}

TEST_CASE("generate rejects a mismatched index") {
  const auto b = build(three_eligible());
  auto config = SamplerConfig::uniform(kRoles, 1, 1);
  config.comparator.mode = CompareMode::kTaxonomy;
  CHECK_THROWS_AS(generate(b.records, b.index, config), Error);
}

TEST_CASE("samples carry attempt geometry and spatial boxes") {
  GridSpec spec;
  spec.verbs = 3;
  spec.nouns = 3;
  spec.records_per_group = 2;
  const auto corpus = synth_grid(spec);
  const auto b = build(corpus.records);
  const auto d = generate(b.records, b.index, SamplerConfig::uniform(kRoles, 1, 1));
  REQUIRE_FALSE(d.samples.empty());
  for (const auto& s : d.samples) {
    REQUIRE(s.pnr_frame);
    CHECK(*s.pnr_frame >= s.clip_start_frame);
    CHECK(*s.pnr_frame <= s.clip_end_frame);
    CHECK(s.mistake_box.has_value() == !s.category.empty());
    if (s.mistake_box) CHECK(s.mistake_box->fits_in(*s.frame_width, *s.frame_height));
  }
}

TEST_CASE("manifest round trip and version check") {
  const auto b = build(three_eligible());
  auto config = SamplerConfig::uniform(kRoles, 1, 1);
  config.seed = 8;
  auto d = generate(b.records, b.index, config);
  d.parser_info = {{"kind", "builtin"}};
  const auto text = serialize_manifest(d);
  const auto back = parse_manifest(text);
  CHECK(back.samples == d.samples);
  CHECK(back.counters == d.counters);
  CHECK(serialize_manifest(back) == text);
  auto bad = text;
  bad.replace(bad.find("\"version\":1"), 11, "\"version\":7");
  CHECK_THROWS_AS(parse_manifest(bad), Error);
}

TEST_CASE("synthetic grid verbs are whole lexicon entries") {
  for (const auto& v : synth_verbs()) {
    const auto r = parse_description(v + " the cup", kRoles);
    REQUIRE(std::holds_alternative<SemanticGroups>(r));
    CHECK(std::get<SemanticGroups>(r).roles[0].key == v);
    CHECK(std::get<SemanticGroups>(r).roles[1].key == "cup");
  }
}
