#include <doctest.h>

#include <algorithm>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "helpers.hpp"
#include "matcher/matcher.hpp"
#include "oracle/oracle.hpp"
#include "roles/parser.hpp"

using namespace misengine;
using test::group;

namespace {

const RoleSet kRoles;
const Comparator kChar{CompareMode::kCharacter, {}};
const Comparator kTax{CompareMode::kTaxonomy, {}};

GroupId id_of(const RoleIndex& index, const std::string& record_id) {
  const auto gs = index.groups();
  for (GroupId g = 0; g < gs.size(); ++g) {
    const auto& ids = gs[g].source_record_ids;
    if (std::find(ids.begin(), ids.end(), record_id) != ids.end()) return g;
  }
  FAIL("no group holds " << record_id);
  return 0;
}

std::vector<SemanticGroups> six_groups() {
  return {group("pick up", "sieve", {"s1"}), group("pick up", "sieve", {"s2"}), group("pick up", "pan", {"p1"}),
          group("wash", "sieve", {"w1"}),    group("wash", "pan", {"w2"}),      group("cut", "apple", {"c1"})};
}

}  // namespace

TEST_CASE("groups_equal examples") {
  const auto a = std::get<SemanticGroups>(parse_description("pick up the sieve", kRoles));
  const auto b = std::get<SemanticGroups>(parse_description("pick up the Sieve", kRoles));
  const auto c = std::get<SemanticGroups>(parse_description("pick up the pan", kRoles));
  CHECK(groups_equal(kChar, a, b, kRoles, 1));
  CHECK_FALSE(groups_equal(kChar, a, c, kRoles, 1));

  const auto x = group("take", "mug", {"x"}, 1, 10);
  const auto y = group("grab", "cup", {"y"}, 1, 10);
  CHECK(groups_equal(kTax, x, y, kRoles, 1));
  CHECK(groups_equal(kTax, x, y, kRoles, 0));
  CHECK_FALSE(groups_equal(kChar, x, y, kRoles, 1));

  const auto z = group("take", "mug", {"z"});
  try {
    groups_equal(kTax, x, z, kRoles, 1);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingTaxonomy);
  }
}

TEST_CASE("per-role comparator override") {
  Comparator mixed{CompareMode::kCharacter, {{"Object", CompareMode::kTaxonomy}}};
  const auto x = group("take", "mug", {"x"}, 1, 10);
  const auto y = group("grab", "cup", {"y"}, 1, 10);
  CHECK(misalignment_category(mixed, x, y, kRoles).mask == 1);
  CHECK(Comparator::from_json(mixed.to_json()).to_json() == mixed.to_json());
}

TEST_CASE("misalignment category examples") {
  const auto a = group("Pick up", "sieve", {"a"});
  const auto b = group("Pick up", "pan", {"b"});
  const auto c = group("wash", "pan", {"c"});
  CHECK(misalignment_category(kChar, a, b, kRoles).name(kRoles) == "Object");
  CHECK(misalignment_category(kChar, a, a, kRoles).empty());
  CHECK(misalignment_category(kChar, a, a, kRoles).name(kRoles) == "none");
  CHECK(misalignment_category(kChar, a, c, kRoles).name(kRoles) == "Predicate+Object");
  CHECK(misalignment_category(kChar, b, c, kRoles).role_names(kRoles) == std::vector<std::string>{"Predicate"});
  const std::vector<std::string> names{"Object", "Predicate"};
  CHECK(MisalignmentCategory::from_names(names, kRoles).mask == 3);
  CHECK(all_categories(kRoles).size() == 4);
}

TEST_CASE("index: shared object key maps to both ids") {
  const std::vector<SemanticGroups> gs{group("take", "cup", {"a"}), group("wash", "cup", {"b"}),
                                       group("take", "pan", {"c"})};
  const auto index = build_index(gs, kRoles, kChar);
  const auto a = id_of(index, "a"), b = id_of(index, "b");
  const auto post = index.postings(a, 1);
  CHECK(std::vector<GroupId>(post.begin(), post.end()) == std::vector<GroupId>{std::min(a, b), std::max(a, b)});
  CHECK(index.key_count(1) == 2);
  CHECK(index.histogram()["Object"]["cup"] == 2);
}

TEST_CASE("empty index") {
  const auto index = build_index({}, kRoles, kChar);
  CHECK(index.group_count() == 0);
  CHECK(index.key_count(0) == 0);
}

TEST_CASE("index is independent of input order") {
  auto gs = six_groups();
  const auto base = build_index(gs, kRoles, kChar);
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    shuffle(gs, rng);
    REQUIRE(build_index(gs, kRoles, kChar) == base);
  }
}

TEST_CASE("candidates on six hand-made groups") {
  const auto index = build_index(six_groups(), kRoles, kChar);
  const auto g = id_of(index, "s1");
  auto ids = [&](std::vector<std::string> names) {
    std::vector<GroupId> out;
    for (const auto& n : names) out.push_back(id_of(index, n));
    std::sort(out.begin(), out.end());
    return out;
  };
  CHECK(candidates(index, g, {0}) == ids({"s2"}));
  CHECK(candidates(index, g, {1}) == ids({"w1"}));
  CHECK(candidates(index, g, {2}) == ids({"p1"}));
  CHECK(candidates(index, g, {3}) == ids({"w2", "c1"}));
  // a group sharing no key: every other group is a both-roles candidate
  const auto lone = id_of(index, "c1");
  CHECK(candidates(index, lone, {3}) == ids({"s1", "s2", "p1", "w1", "w2"}));
  for (GroupId i = 0; i < index.group_count(); ++i) {
    for (const auto cat : all_categories(kRoles)) {
      REQUIRE(candidates(index, i, cat) == oracle::brute_candidates(index, i, cat));
    }
  }
}

TEST_CASE("index category agrees with the direct comparison") {
  const auto index = build_index(six_groups(), kRoles, kChar);
  const auto gs = index.groups();
  for (GroupId a = 0; a < gs.size(); ++a) {
    for (GroupId b = 0; b < gs.size(); ++b) {
      REQUIRE(index.category(a, b) == misalignment_category(kChar, gs[a], gs[b], kRoles));
    }
  }
}

TEST_CASE("taxonomy index needs class ids") {
  CHECK_THROWS_AS(build_index(six_groups(), kRoles, kTax), Error);
}

TEST_CASE("property: candidates equal brute force and partition, random corpora") {
  Rng rng(2024);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n_roles = 1 + rng.below(3);
    std::vector<std::string> names{"Predicate", "Object", "Complement"};
    names.resize(n_roles);
    const RoleSet roles(names);
    const bool tax = rng.below(2) == 1;
    std::vector<SemanticGroups> gs(1 + rng.below(60));
    for (std::size_t i = 0; i < gs.size(); ++i) {
      for (std::size_t r = 0; r < n_roles; ++r) {
        const auto k = rng.below(4);
        gs[i].roles.push_back(RoleGroup{"k" + std::to_string(k), "k" + std::to_string(k),
                                        static_cast<std::int64_t>(k / 2)});
      }
      gs[i].source_record_ids = {"r" + std::to_string(i)};
      gs[i].description = "d" + std::to_string(i);
    }
    const auto index = build_index(gs, roles, Comparator{tax ? CompareMode::kTaxonomy : CompareMode::kCharacter, {}});
    const auto check = oracle::check_candidates(index);
    REQUIRE_MESSAGE(check.mismatches == 0, (check.examples.empty() ? "" : check.examples.front()));
  }
}
