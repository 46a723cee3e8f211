#include "generator/spatial.hpp"

#include <algorithm>

#include "common/error.hpp"

namespace misengine {

BBox union_boxes(std::span<const BBox> boxes) {
  if (boxes.empty()) fail(ErrorCode::kEmptyInput, "union of zero boxes");
  double x0 = boxes[0].x_min, y0 = boxes[0].y_min, x1 = boxes[0].x_max(), y1 = boxes[0].y_max();
  for (const auto& b : boxes.subspan(1)) {
    x0 = std::min(x0, b.x_min);
    y0 = std::min(y0, b.y_min);
    x1 = std::max(x1, b.x_max());
    y1 = std::max(y1, b.y_max());
  }
  return BBox{x0, y0, x1 - x0, y1 - y0};
}

std::optional<BBox> spatial_annotation(const RoleSet& roles, MisalignmentCategory category,
                                       const std::optional<std::vector<BBox>>& hand_boxes,
                                       const std::optional<std::vector<BBox>>& object_boxes) {
  const auto p = roles.index_of(kPredicate);
  const auto o = roles.index_of(kObject);
  const bool predicate = p && category.contains(*p);
  const bool object = o && category.contains(*o);
  const bool have_hands = hand_boxes && !hand_boxes->empty();
  const bool have_objects = object_boxes && !object_boxes->empty();
  if (predicate && object) {
    if (!have_hands || !have_objects) return std::nullopt;
    std::vector<BBox> all = *hand_boxes;
    all.insert(all.end(), object_boxes->begin(), object_boxes->end());
    return union_boxes(all);
  }
  if (predicate) return have_hands ? std::optional(union_boxes(*hand_boxes)) : std::nullopt;
  if (object) return have_objects ? std::optional(union_boxes(*object_boxes)) : std::nullopt;
  return std::nullopt;
}

}  // namespace misengine
