#include <doctest.h>

#include "common/error.hpp"
#include "corpus/ingest.hpp"
#include "corpus/store.hpp"
#include "helpers.hpp"

using namespace misengine;

namespace {

const ColumnMapping kMapping = ColumnMapping::parse("id=id,video=video,start=start,end=end,description=text");

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

}  // namespace

TEST_CASE("table row passes through unchanged") {
  const auto res = ingest_table_text("id,video,start,end,text\nr1,v1,0,240,Pick up the sieve\n", kMapping);
  REQUIRE(res.records.size() == 1);
  const auto& r = res.records[0];
  CHECK(r.record_id == "r1");
  CHECK(r.video_id == "v1");
  CHECK(r.clip_start_frame == 0);
  CHECK(r.clip_end_frame == 240);
  CHECK(r.description == "Pick up the sieve");
  CHECK(r.fps == Rational{30, 1});
  CHECK(r.fps_defaulted);
}

TEST_CASE("row with end equal to start is malformed, with its line") {
  try {
    ingest_table_text("id,video,start,end,text\nr1,v1,0,240,a b\nr2,v1,5,5,c d\n", kMapping);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMalformedRow);
    CHECK(e.line() == 3);
  }
}

TEST_CASE("five valid rows give five records") {
  std::string text = "id,video,start,end,text\n";
  for (int i = 0; i < 5; ++i) text += "r" + std::to_string(i) + ",v,0,10,take cup\n";
  CHECK(ingest_table_text(text, kMapping).records.size() == 5);
}

TEST_CASE("table errors") {
  CHECK(code_of([] { ingest_table_text("id,video,start,text\nr1,v,0,x\n", kMapping); }) == ErrorCode::kMissingColumn);
  CHECK(code_of([] { ingest_table_text("id,video,start,end,text\nr1,v,0,5,a\nr1,v,0,5,b\n", kMapping); }) ==
        ErrorCode::kDuplicateRecordId);
  CHECK(code_of([] { ingest_table_text("id,video,start,end,text\nr1,v,zero,5,a\n", kMapping); }) ==
        ErrorCode::kMalformedRow);
}

TEST_CASE("quoted fields, delimiter choice, optional columns") {
  const auto m = ColumnMapping::parse(
      R"({"id":"id","video":"video","start":"start","end":"end","description":"text","fps":"fps","pnr":"pnr"})", '\t');
  const auto res = ingest_table_text("id\tvideo\tstart\tend\ttext\tfps\tpnr\n"
                                     "r1\tv\t0\t100\t\"stir the \"\"sauce\"\"\tslowly\"\t30000/1001\t50\n"
                                     "r2\tv\t0\t100\t\t30\t\n",
                                     m);
  REQUIRE(res.records.size() == 1);
  CHECK(res.dropped == 1);
  CHECK(res.records[0].description == "stir the \"sauce\"\tslowly");
  CHECK(res.records[0].fps == Rational{30000, 1001});
  CHECK_FALSE(res.records[0].fps_defaulted);
  CHECK(res.records[0].pnr_frame == 50);
}

TEST_CASE("rational parsing") {
  CHECK(Rational::parse("30") == Rational{30, 1});
  CHECK(Rational::parse("29.97").value() == doctest::Approx(29.97));
  CHECK(Rational::parse("30000/1001") == Rational{30000, 1001});
  CHECK_THROWS_AS(Rational::parse("0"), Error);
  CHECK_THROWS_AS(Rational::parse("abc"), Error);
}

TEST_CASE("structured clip with pnr and two hand boxes") {
  const auto res = ingest_structured_text(R"([{"id":"c1","video":"v","span":[0,240],"description":"cut the apple",
      "frame_size":[640,480],"pnr":17,"hands":[[0,0,10,10],[20,20,5,5]]}])");
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].pnr_frame == 17);
  REQUIRE(res.records[0].hand_boxes);
  CHECK(res.records[0].hand_boxes->size() == 2);
  CHECK_FALSE(res.records[0].object_boxes);
}

TEST_CASE("structured pnr_offset is relative to the span start") {
  const auto res = ingest_structured_text(
      R"({"fps":25,"clips":[{"id":"c1","video":"v","span":[1000,1240],"description":"cut the apple","pnr_offset":17}]})");
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].pnr_frame == 1017);
  CHECK(res.records[0].fps == Rational{25, 1});
}

TEST_CASE("structured clip without description is dropped and counted") {
  const auto res = ingest_structured_text(R"([{"id":"c1","video":"v","span":[0,10],"description":"cut the apple"},
                                              {"id":"c2","video":"v","span":[0,10]}])");
  CHECK(res.records.size() == 1);
  CHECK(res.dropped == 1);
}

TEST_CASE("structured errors") {
  CHECK(code_of([] {
          ingest_structured_text(R"([{"id":"c1","video":"v","span":[0,10],"description":"a b","frame_size":[100,100],
                                     "hands":[[95,0,10,10]]}])");
        }) == ErrorCode::kBoxOutOfBounds);
  CHECK(code_of([] { ingest_structured_text(R"({"clips": 3})"); }) == ErrorCode::kSchemaMismatch);
  CHECK(code_of([] { ingest_structured_text(R"([{"id":"c1","span":[0,10],"description":"a"}])"); }) ==
        ErrorCode::kSchemaMismatch);
  // boxes need a frame size to be checked against
  CHECK(code_of([] {
          ingest_structured_text(R"([{"id":"c1","video":"v","span":[0,10],"description":"a b","hands":[[0,0,1,1]]}])");
        }) == ErrorCode::kSchemaMismatch);
  CHECK(code_of([] {
          ingest_structured_text(R"([{"id":"c1","video":"v","span":[0,10],"description":"a b","pnr":11}])");
        }) == ErrorCode::kMalformedRow);
}

TEST_CASE("merge rejects ids duplicated across files") {
  std::vector<IngestResult> parts(2);
  parts[0].records.push_back(test::record("a", "take cup"));
  parts[1].records.push_back(test::record("a", "take mug"));
  CHECK(code_of([&] { merge_ingest(parts); }) == ErrorCode::kDuplicateRecordId);
}

TEST_CASE("store round trip") {
  RecordStore s;
  s.records.push_back(test::record("r1", "pick up the sieve", 3, 4));
  s.records.push_back(test::record("r2", "cut the apple"));
  auto r3 = test::record("r3", "wash the pan");
  r3.frame_width = 640;
  r3.frame_height = 480;
  r3.pnr_frame = r3.clip_start_frame + 5;
  r3.hand_boxes = std::vector<BBox>{{1, 2, 3, 4}};
  r3.object_boxes = std::vector<BBox>{};
  r3.fps = Rational{30000, 1001};
  r3.participant_id = "P1";
  s.records.push_back(r3);
  s.provenance = {{"note", "x"}};
  const auto back = parse_store(serialize_store(s));
  CHECK(back.records == s.records);
  CHECK(back.provenance == s.provenance);

  test::TempDir dir;
  save_store(s, dir.path / "s.jsonl");
  CHECK(load_store(dir.path / "s.jsonl").records == s.records);
}

TEST_CASE("empty store round trip") {
  const auto back = parse_store(serialize_store(RecordStore{}));
  CHECK(back.records.empty());
}

TEST_CASE("store version and record count are checked") {
  std::string text = serialize_store(RecordStore{{test::record("r1", "cut the apple")}, {}});
  auto bumped = text;
  bumped.replace(bumped.find("\"version\":1"), 11, "\"version\":9");
  CHECK(code_of([&] { parse_store(bumped); }) == ErrorCode::kVersionMismatch);
  CHECK(code_of([&] { parse_store(text.substr(0, text.find('\n') + 1)); }) == ErrorCode::kSchemaMismatch);
  CHECK(code_of([] { parse_store("{\"format\":\"other\"}\n"); }) == ErrorCode::kVersionMismatch);
}
