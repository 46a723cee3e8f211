#include "eval/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace misengine {

BinaryMetrics metrics_from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, std::uint64_t tn) {
  BinaryMetrics m{tp, fp, fn, tn, 0, 0};
  const std::uint64_t errors = fp + fn;
  m.f1 = (tp == 0 && errors == 0) ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + errors);
  const std::uint64_t n = tp + fp + fn + tn;
  m.accuracy = n ? static_cast<double>(tp + tn) / static_cast<double>(n) : 0.0;
  return m;
}

BinaryMetrics binary_metrics(std::span<const ScoredLabel> pairs, double threshold) {
  if (pairs.empty()) fail(ErrorCode::kEmptyInput, "binary metrics over zero samples");
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (const auto& p : pairs) {
    const bool predicted = p.score >= threshold;
    if (predicted && p.gold) ++tp;
    else if (predicted) ++fp;
    else if (p.gold) ++fn;
    else ++tn;
  }
  return metrics_from_counts(tp, fp, fn, tn);
}

double iou(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.x_max(), b.x_max()) - std::max(a.x_min, b.x_min));
  const double iy = std::max(0.0, std::min(a.y_max(), b.y_max()) - std::max(a.y_min, b.y_min));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

double center_distance(const BBox& a, const BBox& b) {
  return std::hypot(a.center_x() - b.center_x(), a.center_y() - b.center_y());
}

bool detection_from_semantic(std::span<const double> role_scores, double threshold) {
  return std::any_of(role_scores.begin(), role_scores.end(), [&](double s) { return s >= threshold; });
}

}  // namespace misengine
