#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "eval/harness.hpp"
#include "helpers.hpp"
#include "oracle/oracle.hpp"

using namespace misengine;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

MistakeSample sample(const std::string& id, std::uint8_t yp, std::uint8_t yo) {
  MistakeSample s;
  s.sample_id = id;
  s.labels = {yp, yo};
  s.category = MisalignmentCategory{static_cast<std::uint32_t>(yp | (yo << 1))};
  s.clip_start_frame = 0;
  s.clip_end_frame = 240;
  s.frame_width = 100;
  s.frame_height = 100;
  return s;
}

MistakeDataset dataset(std::vector<MistakeSample> samples) {
  MistakeDataset d;
  d.config = SamplerConfig::uniform(RoleSet(), 1, 1);
  d.samples = std::move(samples);
  return d;
}

PredictionRecord perfect(const MistakeSample& s) {
  PredictionRecord p;
  p.sample_id = s.sample_id;
  p.role_scores = {{"Predicate", s.labels[0] ? 1.0 : 0.0}, {"Object", s.labels[1] ? 1.0 : 0.0}};
  p.pnr_frame = s.pnr_frame;
  p.box = s.mistake_box;
  return p;
}

}  // namespace

TEST_CASE("binary metrics examples") {
  std::vector<ScoredLabel> pairs;
  pairs.insert(pairs.end(), 2, {0.9, true});
  pairs.insert(pairs.end(), 1, {0.9, false});
  pairs.insert(pairs.end(), 1, {0.1, true});
  pairs.insert(pairs.end(), 6, {0.1, false});
  const auto m = binary_metrics(pairs);
  CHECK(m.tp == 2);
  CHECK(m.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m.accuracy == doctest::Approx(0.8).epsilon(1e-12));

  const std::vector<ScoredLabel> all_half{{0.5, false}, {0.5, true}};
  CHECK(binary_metrics(all_half).fp == 1);
  CHECK(binary_metrics(all_half).tp == 1);

  const std::vector<ScoredLabel> perfect{{1, true}, {0, false}};
  CHECK(binary_metrics(perfect).f1 == 1.0);
  CHECK(binary_metrics(perfect).accuracy == 1.0);

  const std::vector<ScoredLabel> negatives{{0.1, false}, {0.2, false}};
  CHECK(binary_metrics(negatives).f1 == 1.0);
  const std::vector<ScoredLabel> misses{{0.1, true}};
  CHECK(binary_metrics(misses).f1 == 0.0);
  CHECK_THROWS_AS(binary_metrics(std::vector<ScoredLabel>{}), Error);
}

TEST_CASE("property: binary metrics equal the brute-force confusion matrix") {
  Rng rng(77);
  for (int trial = 0; trial < 3000; ++trial) {
    std::vector<ScoredLabel> pairs(1 + rng.below(30));
    for (auto& p : pairs) p = {rng.unit(), rng.below(2) == 1};
    const double t = rng.below(3) == 0 ? pairs[rng.below(pairs.size())].score : rng.unit();
    const auto a = binary_metrics(pairs, t);
    const auto b = oracle::brute_confusion(pairs, t);
    REQUIRE(a.tp == b.tp);
    REQUIRE(a.fp == b.fp);
    REQUIRE(a.fn == b.fn);
    REQUIRE(a.tn == b.tn);
    REQUIRE(std::abs(a.f1 - b.f1) <= 1e-12);
    REQUIRE(std::abs(a.accuracy - b.accuracy) <= 1e-12);
  }
}

TEST_CASE("iou examples and properties") {
  const BBox a{0, 0, 2, 2}, b{1, 0, 2, 2}, far{10, 10, 1, 1};
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, far) == 0.0);
  CHECK(std::abs(iou(a, b) - 1.0 / 3.0) <= 1e-12);
  CHECK(iou(BBox{0, 0, 2, 2}, BBox{2, 0, 2, 2}) == 0.0);
  Rng rng(8);
  for (int i = 0; i < 5000; ++i) {
    const BBox x{rng.unit() * 10, rng.unit() * 10, 0.1 + rng.unit() * 5, 0.1 + rng.unit() * 5};
    const BBox y{rng.unit() * 10, rng.unit() * 10, 0.1 + rng.unit() * 5, 0.1 + rng.unit() * 5};
    const double v = iou(x, y);
    REQUIRE(v == iou(y, x));
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 1.0);
    REQUIRE(std::abs(iou(x, x) - 1.0) <= 1e-12);
  }
}

TEST_CASE("detection from semantic scores") {
  CHECK(detection_from_semantic(std::vector<double>{0.9, 0.1}));
  CHECK_FALSE(detection_from_semantic(std::vector<double>{0.1, 0.2}));
  CHECK(detection_from_semantic(std::vector<double>{0.6, 0.7}));
  CHECK(detection_from_semantic(std::vector<double>{0.5, 0.0}));
}

TEST_CASE("semantic report: average over roles") {
  // Predicate: TP 2, FP 1, FN 0 -> F1 0.8. Object: TP 3, FP 2, FN 2 -> F1 0.6.
  std::vector<MistakeSample> gold;
  std::vector<PredictionRecord> preds;
  auto add = [&](std::uint8_t yp, double sp, std::uint8_t yo, double so) {
    auto s = sample("s" + std::to_string(gold.size()), yp, yo);
    gold.push_back(s);
    preds.push_back(PredictionRecord{s.sample_id, {{"Predicate", sp}, {"Object", so}}, std::nullopt, std::nullopt});
  };
  add(1, 0.9, 1, 0.9);
  add(1, 0.9, 1, 0.9);
  add(0, 0.9, 1, 0.9);
  add(0, 0.1, 0, 0.9);
  add(0, 0.1, 0, 0.9);
  add(0, 0.1, 1, 0.1);
  add(0, 0.1, 1, 0.1);
  add(0, 0.1, 0, 0.1);
  EvalOptions o;
  o.tasks = {Task::kSemantic};
  const auto rep = evaluate(dataset(gold), preds, o);
  REQUIRE(rep.semantic);
  CHECK(rep.semantic->per_role[0].second.f1 == doctest::Approx(0.8));
  CHECK(rep.semantic->per_role[1].second.f1 == doctest::Approx(0.6));
  CHECK(rep.semantic->average_f1 == doctest::Approx(0.7));
  CHECK(rep.semantic->per_role[0].second.accuracy == doctest::Approx(7.0 / 8.0));
  CHECK(rep.semantic->per_role[1].second.accuracy == doctest::Approx(4.0 / 8.0));
}

TEST_CASE("temporal MAE examples") {
  auto s1 = sample("a", 1, 0);
  s1.pnr_frame = 17;
  auto s2 = sample("b", 0, 1);
  s2.pnr_frame = 100;
  auto s3 = sample("c", 0, 0);  // no mistake: outside the temporal scope
  s3.pnr_frame = 5;
  const auto d = dataset({s1, s2, s3});
  EvalOptions o;
  o.tasks = {Task::kTemporal};

  std::vector<PredictionRecord> exact{{"a", {}, 17, {}}, {"b", {}, 100, {}}};
  auto rep = evaluate(d, exact, o);
  CHECK(rep.temporal->mae_frames == 0.0);
  CHECK(rep.temporal->mae_seconds == 0.0);

  std::vector<PredictionRecord> off{{"a", {}, 20, {}}, {"b", {}, 100, {}}};
  o.only_ids = std::set<std::string>{"a"};
  rep = evaluate(d, off, o);
  CHECK(rep.temporal->mae_frames == 3.0);
  CHECK(std::abs(rep.temporal->mae_seconds - 0.1) <= 1e-12);
  CHECK(rep.unused_predictions == 1);
  o.only_ids.reset();

  std::vector<PredictionRecord> two{{"a", {}, 27, {}}, {"b", {}, 80, {}}};
  rep = evaluate(d, two, o);
  CHECK(rep.temporal->mae_frames == 15.0);
  CHECK(rep.coverage.at("temporal").in_scope == 2);
}

TEST_CASE("MAE seconds use the exact frame rate") {
  auto s = sample("a", 1, 0);
  s.pnr_frame = 0;
  s.fps = Rational{30000, 1001};
  EvalOptions o;
  o.tasks = {Task::kTemporal};
  const auto rep = evaluate(dataset({s}), {{"a", {}, 30, {}}}, o);
  CHECK(std::abs(rep.temporal->mae_seconds - 30.0 * 1001.0 / 30000.0) <= 1e-12);
}

TEST_CASE("spatial metrics") {
  auto s = sample("a", 1, 0);
  s.frame_width = 300;
  s.frame_height = 400;  // diagonal 500
  s.mistake_box = BBox{5, 5, 10, 10};  // centre (10, 10)
  EvalOptions o;
  o.tasks = {Task::kSpatial};
  auto rep = evaluate(dataset({s}), {{"a", {}, {}, BBox{8, 10, 10, 8}}}, o);  // centre (13, 14)
  CHECK(std::abs(rep.spatial->cd_percent - 1.0) <= 1e-12);
  CHECK(rep.spatial->cd_pixels == doctest::Approx(5.0));

  auto t = sample("b", 0, 1);
  t.frame_width = 100;
  t.frame_height = 100;
  t.mistake_box = BBox{0, 0, 10, 10};
  rep = evaluate(dataset({t}), {{"b", {}, {}, BBox{0, 0, 10, 8}}}, o);
  CHECK(std::abs(rep.spatial->bse_percent - 0.2) <= 1e-12);
  CHECK(rep.spatial->bse_pixels == doctest::Approx(20.0));

  rep = evaluate(dataset({t}), {{"b", {}, {}, t.mistake_box}}, o);
  CHECK(rep.spatial->miou == 1.0);
  CHECK(rep.spatial->cd_percent == 0.0);
  CHECK(rep.spatial->bse_percent == 0.0);
}

TEST_CASE("perfect predictions score perfectly on every task") {
  std::vector<MistakeSample> gold;
  for (int i = 0; i < 40; ++i) {
    auto s = sample("s" + std::to_string(i), i % 2, (i / 2) % 2);
    s.pnr_frame = 10 + i;
    if (s.detection_label()) s.mistake_box = BBox{1.0 * i, 2, 5, 5};
    gold.push_back(s);
  }
  std::vector<PredictionRecord> preds;
  for (const auto& s : gold) preds.push_back(perfect(s));
  const auto rep = evaluate(dataset(gold), preds, EvalOptions{});
  CHECK(rep.semantic->average_f1 == 1.0);
  CHECK(rep.semantic->average_accuracy == 1.0);
  CHECK(rep.detection->f1 == 1.0);
  CHECK(rep.detection->accuracy == 1.0);
  CHECK(rep.temporal->mae_frames == 0.0);
  CHECK(rep.spatial->miou == 1.0);
  CHECK(rep.to_table().find("Detection F1@0.5") != std::string::npos);
}

TEST_CASE("missing, unknown and malformed predictions") {
  auto s1 = sample("a", 1, 0);
  s1.pnr_frame = 3;
  auto s2 = sample("b", 0, 0);
  const auto d = dataset({s1, s2});
  std::vector<PredictionRecord> only_a{perfect(s1)};
  CHECK(code_of([&] { evaluate(d, only_a, EvalOptions{}); }) == ErrorCode::kMissingPrediction);
  EvalOptions partial;
  partial.allow_partial = true;
  const auto rep = evaluate(d, only_a, partial);
  CHECK(rep.coverage.at("semantic").missing == 1);
  CHECK(rep.coverage.at("semantic").scored == 1);

  std::vector<PredictionRecord> stranger{perfect(s1), perfect(s2), PredictionRecord{"zzz", {}, {}, {}}};
  CHECK(code_of([&] { evaluate(d, stranger, EvalOptions{}); }) == ErrorCode::kUnknownSampleId);

  CHECK(code_of([] { parse_predictions("{\"sample_id\":\"a\",\"role_scores\":{\"Object\":1.5}}\n"); }) ==
        ErrorCode::kMalformedPrediction);
  CHECK(code_of([] { parse_predictions("{\"sample_id\":\"a\"}\n{\"sample_id\":\"a\"}\n"); }) ==
        ErrorCode::kMalformedPrediction);
  CHECK(code_of([] { parse_predictions("not json\n"); }) == ErrorCode::kMalformedPrediction);
  CHECK(code_of([] { parse_predictions("{\"sample_id\":\"a\",\"box\":[0,0,0,1]}\n"); }) ==
        ErrorCode::kMalformedPrediction);
}

TEST_CASE("prediction file round trip ignores unknown fields and line order") {
  const std::string text =
      "{\"format\":\"misengine-predictions\",\"version\":1}\n"
      "{\"sample_id\":\"b\",\"role_scores\":{\"Predicate\":0.2,\"Object\":0.9},\"extra\":true}\n"
      "{\"sample_id\":\"a\",\"role_scores\":{\"Predicate\":0.7,\"Object\":0.1},\"pnr_frame\":5,\"box\":[1,2,3,4]}\n";
  const auto preds = parse_predictions(text);
  REQUIRE(preds.size() == 2);
  CHECK(preds[1].box == BBox{1, 2, 3, 4});
  CHECK(parse_predictions(serialize_predictions(preds)).size() == 2);

  auto a = sample("a", 1, 0);
  a.pnr_frame = 9;
  const auto d = dataset({a, sample("b", 0, 1)});
  auto reversed = preds;
  std::reverse(reversed.begin(), reversed.end());
  CHECK(evaluate(d, preds, EvalOptions{}).to_json() == evaluate(d, reversed, EvalOptions{}).to_json());
}

TEST_CASE("detection from semantic scores equals detection from OR-ed labels") {
  Rng rng(31);
  std::vector<MistakeSample> gold;
  std::vector<PredictionRecord> preds;
  std::vector<ScoredLabel> explicit_pairs;
  for (int i = 0; i < 500; ++i) {
    auto s = sample("s" + std::to_string(i), rng.below(2), rng.below(2));
    PredictionRecord p{s.sample_id, {{"Predicate", rng.unit()}, {"Object", rng.unit()}}, {}, {}};
    const bool ored = (p.role_scores["Predicate"] >= 0.5) || (p.role_scores["Object"] >= 0.5);
    explicit_pairs.push_back({ored ? 1.0 : 0.0, s.labels[0] || s.labels[1]});
    gold.push_back(s);
    preds.push_back(p);
  }
  EvalOptions o;
  o.tasks = {Task::kDetection};
  const auto rep = evaluate(dataset(gold), preds, o);
  const auto direct = binary_metrics(explicit_pairs, 0.5);
  CHECK(rep.detection->tp == direct.tp);
  CHECK(rep.detection->fp == direct.fp);
  CHECK(rep.detection->fn == direct.fn);
  CHECK(rep.detection->tn == direct.tn);
  CHECK(rep.detection->f1 == direct.f1);
}

TEST_CASE("predicted-positive-only narrows temporal scope") {
  auto a = sample("a", 1, 0);
  a.pnr_frame = 10;
  auto b = sample("b", 1, 1);
  b.pnr_frame = 10;
  const auto d = dataset({a, b});
  std::vector<PredictionRecord> preds{{"a", {{"Predicate", 0.9}, {"Object", 0.0}}, 12, {}},
                                      {"b", {{"Predicate", 0.1}, {"Object", 0.1}}, 50, {}}};
  EvalOptions o;
  o.tasks = {Task::kTemporal};
  CHECK(evaluate(d, preds, o).temporal->mae_frames == 21.0);
  o.predicted_positive_only = true;
  CHECK(evaluate(d, preds, o).temporal->mae_frames == 2.0);
}

TEST_CASE("baselines") {
  auto s = sample("a", 1, 0);
  s.clip_start_frame = 0;
  s.clip_end_frame = 240;
  s.frame_width = 640;
  s.frame_height = 480;
  s.mistake_box = BBox{10, 10, 64, 48};
  s.pnr_frame = 100;
  const auto d = dataset({s, sample("b", 0, 1)});

  const auto center = baseline(BaselineKind::kCenterPnr, d);
  CHECK(center[0].pnr_frame == 120);
  CHECK(center[0].role_scores.empty());

  const auto full = baseline(BaselineKind::kFullFrameBox, d);
  CHECK(std::abs(iou(*full[0].box, *s.mistake_box) - s.mistake_box->area() / (640.0 * 480.0)) <= 1e-12);

  const auto train = dataset({sample("t1", 1, 0), sample("t2", 0, 1), sample("t3", 1, 1), sample("t4", 0, 0)});
  const auto prior = baseline(BaselineKind::kPrior, d, &train);
  CHECK(prior[0].role_scores.at("Predicate") == 0.5);
  CHECK(prior[1].role_scores.at("Object") == 0.5);
  CHECK_THROWS_AS(baseline(BaselineKind::kPrior, d), Error);

  const auto r1 = baseline(BaselineKind::kRandom, d, nullptr, 4);
  const auto r2 = baseline(BaselineKind::kRandom, d, nullptr, 4);
  CHECK(serialize_predictions(r1) == serialize_predictions(r2));
  for (const auto& p : r1) {
    REQUIRE(p.pnr_frame);
    CHECK(*p.pnr_frame >= 0);
    CHECK(*p.pnr_frame <= 240);
    REQUIRE(p.box);
    CHECK(p.box->fits_in(640, 480));
  }
  CHECK(parse_baseline_kind("center_pnr") == BaselineKind::kCenterPnr);
  CHECK_THROWS_AS(parse_baseline_kind("oracle"), Error);
}
