#pragma once

#include <cstdint>
#include <span>

#include "corpus/record.hpp"

namespace misengine {

struct ScoredLabel {
  double score = 0;
  bool gold = false;
};

struct BinaryMetrics {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  double f1 = 0;
  double accuracy = 0;
};

// Prediction is score >= threshold. F1 = 2TP / (2TP + FP + FN), taken as 1
// when TP = FP = FN = 0. kEmptyInput on no pairs.
BinaryMetrics binary_metrics(std::span<const ScoredLabel> pairs, double threshold = 0.5);
BinaryMetrics metrics_from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, std::uint64_t tn);

// Intersection over union; 0 for disjoint boxes.
double iou(const BBox& a, const BBox& b);

// Euclidean distance between box centres.
double center_distance(const BBox& a, const BBox& b);

// 1 iff any role score reaches the threshold.
bool detection_from_semantic(std::span<const double> role_scores, double threshold = 0.5);

}  // namespace misengine
