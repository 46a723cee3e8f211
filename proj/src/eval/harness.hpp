#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "eval/metrics.hpp"
#include "generator/dataset.hpp"

namespace misengine {

struct PredictionRecord {
  std::string sample_id;
  std::map<std::string, double> role_scores;
  std::optional<std::int64_t> pnr_frame;
  std::optional<BBox> box;
};

inline constexpr std::string_view kPredictionsFormat = "misengine-predictions";

// Line-delimited {"sample_id", "role_scores"?, "pnr_frame"?, "box"?}; unknown
// fields ignored; a first line with a "format" key is a header. Duplicate ids,
// scores outside [0, 1] and non-positive boxes raise kMalformedPrediction.
std::vector<PredictionRecord> parse_predictions(const std::string& text);
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);
std::string serialize_predictions(const std::vector<PredictionRecord>& predictions, const Json& header_extra = {});

enum class Task { kSemantic, kTemporal, kSpatial, kDetection };
std::string_view task_name(Task task);
std::set<Task> parse_tasks(const std::string& csv);  // "semantic,temporal" or "all"

struct EvalOptions {
  double threshold = 0.5;
  bool allow_partial = false;
  // Temporal/spatial: score only samples the prediction flags as a mistake
  // (in addition to the gold scope).
  bool predicted_positive_only = false;
  std::set<Task> tasks{Task::kSemantic, Task::kTemporal, Task::kSpatial, Task::kDetection};
  // Restrict the gold set (e.g. to one split); empty = whole manifest.
  std::optional<std::set<std::string>> only_ids;

  Json to_json() const;
};

struct Coverage {
  std::uint64_t in_scope = 0;
  std::uint64_t scored = 0;
  std::uint64_t missing = 0;  // in scope, no usable prediction (allow_partial only)
};

struct SemanticReport {
  std::vector<std::pair<std::string, BinaryMetrics>> per_role;
  double average_f1 = 0;
  double average_accuracy = 0;
};

struct TemporalReport {
  double mae_frames = 0;
  double mae_seconds = 0;
};

struct SpatialReport {
  double miou = 0;         // fraction in [0, 1]
  double cd_percent = 0;   // centre distance / frame diagonal * 100
  double bse_percent = 0;  // |area difference| / frame area * 100
  double cd_pixels = 0;
  double bse_pixels = 0;
};

struct EvalReport {
  std::optional<SemanticReport> semantic;
  std::optional<TemporalReport> temporal;
  std::optional<SpatialReport> spatial;
  std::optional<BinaryMetrics> detection;
  std::map<std::string, Coverage> coverage;
  std::uint64_t predictions = 0;
  std::uint64_t unused_predictions = 0;  // valid ids outside the evaluated subset

  Json to_json() const;
  std::string to_table() const;
};

using PredictionIndex = std::unordered_map<std::string, const PredictionRecord*>;

// Each report raises kMissingPrediction for an in-scope sample without the
// needed fields unless options.allow_partial is set.
SemanticReport semantic_report(std::span<const MistakeSample* const> gold, const PredictionIndex& preds,
                               const RoleSet& roles, const EvalOptions& options, Coverage& coverage);
std::optional<TemporalReport> temporal_report(std::span<const MistakeSample* const> gold, const PredictionIndex& preds,
                                              const RoleSet& roles, const EvalOptions& options, Coverage& coverage);
std::optional<SpatialReport> spatial_report(std::span<const MistakeSample* const> gold, const PredictionIndex& preds,
                                            const RoleSet& roles, const EvalOptions& options, Coverage& coverage);
std::optional<BinaryMetrics> detection_report(std::span<const MistakeSample* const> gold, const PredictionIndex& preds,
                                              const RoleSet& roles, const EvalOptions& options, Coverage& coverage);

// kUnknownSampleId for prediction ids absent from the manifest.
EvalReport evaluate(const MistakeDataset& gold, const std::vector<PredictionRecord>& predictions,
                    const EvalOptions& options);

enum class BaselineKind { kRandom, kPrior, kCenterPnr, kFullFrameBox };
BaselineKind parse_baseline_kind(std::string_view name);
std::string_view baseline_kind_name(BaselineKind kind);

// random: uniform role scores, uniform frame in the clip, random in-frame box
//         (per-sample stream keyed by sample id)
// prior:  every role scored with its positive rate in `train`
// center_pnr: clip midpoint frame; full_frame_box: the whole frame
std::vector<PredictionRecord> baseline(BaselineKind kind, const MistakeDataset& target,
                                       const MistakeDataset* train = nullptr, std::uint64_t seed = 0);

}  // namespace misengine
