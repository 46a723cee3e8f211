#include "corpus/record.hpp"

#include <charconv>
#include <numeric>

#include "common/error.hpp"

namespace misengine {

Json bbox_to_json(const BBox& box) { return Json::array({box.x_min, box.y_min, box.dx, box.dy}); }

BBox bbox_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) {
    fail(ErrorCode::kSchemaMismatch, "box must be [x_min, y_min, dx, dy]");
  }
  for (const auto& v : j) {
    if (!v.is_number()) fail(ErrorCode::kSchemaMismatch, "box coordinates must be numbers");
  }
  return BBox{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

std::string Rational::to_string() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

namespace {

bool parse_int(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Rational Rational::parse(const std::string& text) {
  Rational r{0, 1};
  const auto slash = text.find('/');
  const auto dot = text.find('.');
  bool ok = false;
  if (slash != std::string::npos) {
    ok = parse_int(std::string_view(text).substr(0, slash), r.num) &&
         parse_int(std::string_view(text).substr(slash + 1), r.den);
  } else if (dot != std::string::npos) {
    const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    const std::size_t frac = text.size() - dot - 1;
    ok = frac <= 9 && parse_int(digits, r.num);
    r.den = 1;
    for (std::size_t i = 0; i < frac; ++i) r.den *= 10;
  } else {
    ok = parse_int(text, r.num);
  }
  if (!ok || r.num <= 0 || r.den <= 0) {
    fail(ErrorCode::kSchemaMismatch, "invalid fps '" + text + "'");
  }
  const std::int64_t g = std::gcd(r.num, r.den);
  r.num /= g;
  r.den /= g;
  return r;
}

void validate_record(const ActionRecord& r, std::optional<std::size_t> line) {
  auto malformed = [&](const std::string& what) {
    throw Error(ErrorCode::kMalformedRow, "record '" + r.record_id + "': " + what, line);
  };
  if (r.record_id.empty()) malformed("empty record id");
  if (r.clip_start_frame < 0) malformed("negative clip start");
  if (r.clip_end_frame <= r.clip_start_frame) malformed("clip end must exceed clip start");
  if (r.pnr_frame && (*r.pnr_frame < r.clip_start_frame || *r.pnr_frame > r.clip_end_frame)) {
    malformed("pnr frame outside clip");
  }
  if ((r.frame_width && *r.frame_width <= 0) || (r.frame_height && *r.frame_height <= 0)) {
    malformed("frame dimensions must be positive");
  }
  const bool has_boxes = r.hand_boxes || r.object_boxes;
  if (has_boxes && !(r.frame_width && r.frame_height)) {
    throw Error(ErrorCode::kSchemaMismatch, "record '" + r.record_id + "': boxes require frame size", line);
  }
  for (const auto* boxes : {&r.hand_boxes, &r.object_boxes}) {
    if (!*boxes) continue;
    for (const auto& b : **boxes) {
      if (!b.fits_in(*r.frame_width, *r.frame_height)) {
        throw Error(ErrorCode::kBoxOutOfBounds, "record '" + r.record_id + "': box outside frame", line);
      }
    }
  }
}

Json record_to_json(const ActionRecord& r) {
  Json j;
  j["id"] = r.record_id;
  j["video"] = r.video_id;
  j["start"] = r.clip_start_frame;
  j["end"] = r.clip_end_frame;
  j["fps"] = Json::array({r.fps.num, r.fps.den});
  j["fps_defaulted"] = r.fps_defaulted;
  j["description"] = r.description;
  if (r.taxonomy_verb) j["verb_class"] = *r.taxonomy_verb;
  if (r.taxonomy_noun) j["noun_class"] = *r.taxonomy_noun;
  if (r.pnr_frame) j["pnr"] = *r.pnr_frame;
  auto boxes = [](const std::vector<BBox>& list) {
    Json arr = Json::array();
    for (const auto& b : list) arr.push_back(bbox_to_json(b));
    return arr;
  };
  if (r.hand_boxes) j["hands"] = boxes(*r.hand_boxes);
  if (r.object_boxes) j["objects"] = boxes(*r.object_boxes);
  if (r.participant_id) j["participant"] = *r.participant_id;
  if (r.environment_id) j["environment"] = *r.environment_id;
  if (r.frame_width) j["width"] = *r.frame_width;
  if (r.frame_height) j["height"] = *r.frame_height;
  return j;
}

ActionRecord record_from_json(const Json& j) {
  try {
    ActionRecord r;
    r.record_id = j.at("id").get<std::string>();
    r.video_id = j.at("video").get<std::string>();
    r.clip_start_frame = j.at("start").get<std::int64_t>();
    r.clip_end_frame = j.at("end").get<std::int64_t>();
    const auto& fps = j.at("fps");
    r.fps = Rational{fps.at(0).get<std::int64_t>(), fps.at(1).get<std::int64_t>()};
    r.fps_defaulted = j.at("fps_defaulted").get<bool>();
    r.description = j.at("description").get<std::string>();
    if (j.contains("verb_class")) r.taxonomy_verb = j["verb_class"].get<std::int64_t>();
    if (j.contains("noun_class")) r.taxonomy_noun = j["noun_class"].get<std::int64_t>();
    if (j.contains("pnr")) r.pnr_frame = j["pnr"].get<std::int64_t>();
    auto boxes = [](const Json& arr) {
      std::vector<BBox> out;
      for (const auto& b : arr) out.push_back(bbox_from_json(b));
      return out;
    };
    if (j.contains("hands")) r.hand_boxes = boxes(j["hands"]);
    if (j.contains("objects")) r.object_boxes = boxes(j["objects"]);
    if (j.contains("participant")) r.participant_id = j["participant"].get<std::string>();
    if (j.contains("environment")) r.environment_id = j["environment"].get<std::string>();
    if (j.contains("width")) r.frame_width = j["width"].get<int>();
    if (j.contains("height")) r.frame_height = j["height"].get<int>();
    return r;
  } catch (const Json::exception& e) {
    fail(ErrorCode::kSchemaMismatch, std::string("record: ") + e.what());
  }
}

}  // namespace misengine
