#pragma once

#include <optional>
#include <span>

#include "corpus/record.hpp"
#include "matcher/matcher.hpp"

namespace misengine {

// Smallest axis-aligned box containing every input box. kEmptyInput on [].
BBox union_boxes(std::span<const BBox> boxes);

// Mistake grounding box for an attempt's PNR frame:
//   predicate only -> union of hand boxes
//   object only    -> union of object boxes
//   both           -> union of hands and objects (both lists required)
// Roles other than Predicate/Object do not change the rule. Absent for No
// Mistake, for categories touching neither role, or when a required list is
// missing or empty.
std::optional<BBox> spatial_annotation(const RoleSet& roles, MisalignmentCategory category,
                                       const std::optional<std::vector<BBox>>& hand_boxes,
                                       const std::optional<std::vector<BBox>>& object_boxes);

}  // namespace misengine
