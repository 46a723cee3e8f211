#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "common/io.hpp"

namespace misengine {

// Axis-aligned pixel box stored as (x_min, y_min, width, height).
struct BBox {
  double x_min = 0;
  double y_min = 0;
  double dx = 0;
  double dy = 0;

  double x_max() const { return x_min + dx; }
  double y_max() const { return y_min + dy; }
  double area() const { return dx * dy; }
  double center_x() const { return x_min + dx / 2; }
  double center_y() const { return y_min + dy / 2; }

  bool has_positive_size() const { return dx > 0 && dy > 0; }
  bool fits_in(int frame_width, int frame_height) const {
    return x_min >= 0 && y_min >= 0 && has_positive_size() && x_max() <= frame_width &&
           y_max() <= frame_height;
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

Json bbox_to_json(const BBox& box);
// Throws Error(kSchemaMismatch) unless `j` is a 4-number array.
BBox bbox_from_json(const Json& j);

// Frames per second as an exact fraction (e.g. 30000/1001).
struct Rational {
  std::int64_t num = 30;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;
  // Accepts "30", "29.97" or "30000/1001". Throws on non-positive or garbage.
  static Rational parse(const std::string& text);

  friend bool operator==(const Rational&, const Rational&) = default;
};

inline constexpr Rational kDefaultFps{30, 1};

struct ActionRecord {
  std::string record_id;
  std::string video_id;
  std::int64_t clip_start_frame = 0;
  std::int64_t clip_end_frame = 0;
  Rational fps = kDefaultFps;
  // True when the source did not carry an fps and the default was applied.
  bool fps_defaulted = true;
  std::string description;
  std::optional<std::int64_t> taxonomy_verb;
  std::optional<std::int64_t> taxonomy_noun;
  // Frame index on the video timeline, inside [clip_start_frame, clip_end_frame].
  std::optional<std::int64_t> pnr_frame;
  std::optional<std::vector<BBox>> hand_boxes;
  std::optional<std::vector<BBox>> object_boxes;
  std::optional<std::string> participant_id;
  std::optional<std::string> environment_id;
  std::optional<int> frame_width;
  std::optional<int> frame_height;

  friend bool operator==(const ActionRecord&, const ActionRecord&) = default;
};

// Checks the per-record invariants; throws kMalformedRow / kBoxOutOfBounds.
void validate_record(const ActionRecord& record, std::optional<std::size_t> line = std::nullopt);

Json record_to_json(const ActionRecord& record);
ActionRecord record_from_json(const Json& j);

}  // namespace misengine
