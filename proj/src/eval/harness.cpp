#include "eval/harness.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_set>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace misengine {

std::vector<PredictionRecord> parse_predictions(const std::string& text) {
  std::vector<PredictionRecord> out;
  std::unordered_set<std::string> seen;
  const auto lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t line = li + 1;
    if (lines[li].find_first_not_of(" \t") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(lines[li]);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kMalformedPrediction, e.what(), line);
    }
    if (!j.is_object()) throw Error(ErrorCode::kMalformedPrediction, "prediction must be an object", line);
    if (li == 0 && j.contains("format")) continue;
    try {
      PredictionRecord p;
      p.sample_id = j.at("sample_id").get<std::string>();
      if (j.contains("role_scores") && !j["role_scores"].is_null()) {
        for (auto it = j["role_scores"].begin(); it != j["role_scores"].end(); ++it) {
          const double s = it.value().get<double>();
          if (!(s >= 0.0 && s <= 1.0)) {
            throw Error(ErrorCode::kMalformedPrediction, "score for " + it.key() + " outside [0, 1]", line);
          }
          p.role_scores[it.key()] = s;
        }
      }
      if (j.contains("pnr_frame") && !j["pnr_frame"].is_null()) p.pnr_frame = j["pnr_frame"].get<std::int64_t>();
      if (j.contains("box") && !j["box"].is_null()) {
        const auto& b = j["box"];
        if (!b.is_array() || b.size() != 4) throw Error(ErrorCode::kMalformedPrediction, "box must have 4 numbers", line);
        p.box = BBox{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
        if (!p.box->has_positive_size()) throw Error(ErrorCode::kMalformedPrediction, "box size must be positive", line);
      }
      if (!seen.insert(p.sample_id).second) {
        throw Error(ErrorCode::kMalformedPrediction, "duplicate sample id '" + p.sample_id + "'", line);
      }
      out.push_back(std::move(p));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kMalformedPrediction, e.what(), line);
    }
  }
  return out;
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_file(path));
}

std::string serialize_predictions(const std::vector<PredictionRecord>& predictions, const Json& header_extra) {
  Json header{{"format", kPredictionsFormat}, {"version", 1}, {"engine_version", kEngineVersion}};
  if (header_extra.is_object()) {
    for (auto it = header_extra.begin(); it != header_extra.end(); ++it) header[it.key()] = it.value();
  }
  std::string out = header.dump() + "\n";
  for (const auto& p : predictions) {
    Json j;
    j["sample_id"] = p.sample_id;
    if (!p.role_scores.empty()) j["role_scores"] = p.role_scores;
    if (p.pnr_frame) j["pnr_frame"] = *p.pnr_frame;
    if (p.box) j["box"] = bbox_to_json(*p.box);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string_view task_name(Task task) {
  switch (task) {
    case Task::kSemantic: return "semantic";
    case Task::kTemporal: return "temporal";
    case Task::kSpatial: return "spatial";
    case Task::kDetection: return "detection";
  }
  return "?";
}

std::set<Task> parse_tasks(const std::string& csv) {
  if (csv == "all" || csv.empty()) return {Task::kSemantic, Task::kTemporal, Task::kSpatial, Task::kDetection};
  std::set<Task> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "semantic") out.insert(Task::kSemantic);
    else if (item == "temporal") out.insert(Task::kTemporal);
    else if (item == "spatial") out.insert(Task::kSpatial);
    else if (item == "detection") out.insert(Task::kDetection);
    else fail(ErrorCode::kUsage, "unknown task '" + item + "'");
  }
  return out;
}

Json EvalOptions::to_json() const {
  Json t = Json::array();
  for (auto task : tasks) t.push_back(task_name(task));
  return {{"threshold", threshold},
          {"allow_partial", allow_partial},
          {"predicted_positive_only", predicted_positive_only},
          {"tasks", t},
          {"subset", only_ids ? Json(only_ids->size()) : Json(nullptr)}};
}

namespace {

const PredictionRecord* find(const PredictionIndex& preds, const std::string& id) {
  auto it = preds.find(id);
  return it == preds.end() ? nullptr : it->second;
}

// Role scores in RoleSet order, or nullopt if any role is missing.
std::optional<std::vector<double>> role_scores(const PredictionRecord* p, const RoleSet& roles) {
  if (!p) return std::nullopt;
  std::vector<double> out;
  out.reserve(roles.size());
  for (const auto& r : roles.names()) {
    auto it = p->role_scores.find(r);
    if (it == p->role_scores.end()) return std::nullopt;
    out.push_back(it->second);
  }
  return out;
}

void missing(const EvalOptions& options, Coverage& coverage, const std::string& id, std::string_view what) {
  if (!options.allow_partial) {
    fail(ErrorCode::kMissingPrediction, "no " + std::string(what) + " prediction for sample '" + id + "'");
  }
  ++coverage.missing;
}

bool predicted_positive(const PredictionRecord* p, const RoleSet& roles, double threshold) {
  auto scores = role_scores(p, roles);
  return scores && detection_from_semantic(*scores, threshold);
}

}  // namespace

SemanticReport semantic_report(std::span<const MistakeSample* const> gold, const PredictionIndex& preds,
                               const RoleSet& roles, const EvalOptions& options, Coverage& coverage) {
  std::vector<std::vector<ScoredLabel>> pairs(roles.size());
  for (const auto* s : gold) {
    ++coverage.in_scope;
    auto scores = role_scores(find(preds, s->sample_id), roles);
    if (!scores) {
      missing(options, coverage, s->sample_id, "semantic");
      continue;
    }
    ++coverage.scored;
    for (std::size_t r = 0; r < roles.size(); ++r) pairs[r].push_back({(*scores)[r], s->labels[r] == 1});
  }
  SemanticReport rep;
  for (std::size_t r = 0; r < roles.size(); ++r) {
    const auto m = binary_metrics(pairs[r], options.threshold);
    rep.per_role.emplace_back(roles[r], m);
    rep.average_f1 += m.f1;
    rep.average_accuracy += m.accuracy;
  }
  rep.average_f1 /= static_cast<double>(roles.size());
  rep.average_accuracy /= static_cast<double>(roles.size());
  return rep;
}

std::optional<TemporalReport> temporal_report(std::span<const MistakeSample* const> gold, const PredictionIndex& preds,
                                              const RoleSet& roles, const EvalOptions& options, Coverage& coverage) {
  double sum_frames = 0, sum_seconds = 0;
  for (const auto* s : gold) {
    if (!s->pnr_frame || !s->detection_label()) continue;
    const auto* p = find(preds, s->sample_id);
    if (options.predicted_positive_only && !predicted_positive(p, roles, options.threshold)) continue;
    ++coverage.in_scope;
    if (!p || !p->pnr_frame) {
      missing(options, coverage, s->sample_id, "temporal");
      continue;
    }
    ++coverage.scored;
    const double err = std::fabs(static_cast<double>(*p->pnr_frame - *s->pnr_frame));
    sum_frames += err;
    sum_seconds += err * static_cast<double>(s->fps.den) / static_cast<double>(s->fps.num);
  }
  if (coverage.scored == 0) return std::nullopt;
  const auto n = static_cast<double>(coverage.scored);
  return TemporalReport{sum_frames / n, sum_seconds / n};
}

std::optional<SpatialReport> spatial_report(std::span<const MistakeSample* const> gold, const PredictionIndex& preds,
                                            const RoleSet& roles, const EvalOptions& options, Coverage& coverage) {
  SpatialReport sum;
  for (const auto* s : gold) {
    if (!s->mistake_box) continue;
    const auto* p = find(preds, s->sample_id);
    if (options.predicted_positive_only && !predicted_positive(p, roles, options.threshold)) continue;
    ++coverage.in_scope;
    if (!p || !p->box) {
      missing(options, coverage, s->sample_id, "spatial");
      continue;
    }
    if (!s->frame_width || !s->frame_height) {
      fail(ErrorCode::kSchemaMismatch, "sample '" + s->sample_id + "' has a box but no frame size");
    }
    ++coverage.scored;
    const double w = *s->frame_width, h = *s->frame_height;
    const double cd = center_distance(*p->box, *s->mistake_box);
    const double bse = std::fabs(p->box->area() - s->mistake_box->area());
    sum.miou += iou(*p->box, *s->mistake_box);
    sum.cd_pixels += cd;
    sum.bse_pixels += bse;
    sum.cd_percent += 100.0 * cd / std::hypot(w, h);
    sum.bse_percent += 100.0 * bse / (w * h);
  }
  if (coverage.scored == 0) return std::nullopt;
  const auto n = static_cast<double>(coverage.scored);
  return SpatialReport{sum.miou / n, sum.cd_percent / n, sum.bse_percent / n, sum.cd_pixels / n, sum.bse_pixels / n};
}

std::optional<BinaryMetrics> detection_report(std::span<const MistakeSample* const> gold, const PredictionIndex& preds,
                                              const RoleSet& roles, const EvalOptions& options, Coverage& coverage) {
  std::vector<ScoredLabel> pairs;
  pairs.reserve(gold.size());
  for (const auto* s : gold) {
    ++coverage.in_scope;
    auto scores = role_scores(find(preds, s->sample_id), roles);
    if (!scores) {
      missing(options, coverage, s->sample_id, "detection");
      continue;
    }
    ++coverage.scored;
    const bool flagged = detection_from_semantic(*scores, options.threshold);
    pairs.push_back({flagged ? 1.0 : 0.0, s->detection_label()});
  }
  if (pairs.empty()) return std::nullopt;
  return binary_metrics(pairs, 0.5);
}

EvalReport evaluate(const MistakeDataset& gold, const std::vector<PredictionRecord>& predictions,
                    const EvalOptions& options) {
  std::unordered_set<std::string_view> gold_ids;
  gold_ids.reserve(gold.samples.size());
  for (const auto& s : gold.samples) gold_ids.insert(s.sample_id);

  EvalReport rep;
  rep.predictions = predictions.size();
  PredictionIndex index;
  index.reserve(predictions.size());
  for (const auto& p : predictions) {
    if (!gold_ids.count(p.sample_id)) fail(ErrorCode::kUnknownSampleId, "prediction for unknown sample '" + p.sample_id + "'");
    if (options.only_ids && !options.only_ids->count(p.sample_id)) {
      ++rep.unused_predictions;
      continue;
    }
    index.emplace(p.sample_id, &p);
  }
  std::vector<const MistakeSample*> subset;
  for (const auto& s : gold.samples) {
    if (!options.only_ids || options.only_ids->count(s.sample_id)) subset.push_back(&s);
  }
  if (options.only_ids && subset.size() != options.only_ids->size()) {
    fail(ErrorCode::kUnknownSampleId, "subset lists ids that are not in the manifest");
  }
  if (subset.empty()) fail(ErrorCode::kEmptyInput, "no gold samples to evaluate");

  const auto& roles = gold.roles();
  const auto has = [&](Task t) { return options.tasks.count(t) > 0; };
  if (has(Task::kSemantic)) {
    auto& cov = rep.coverage["semantic"];
    rep.semantic = semantic_report(subset, index, roles, options, cov);
    if (cov.scored == 0) rep.semantic.reset();
  }
  if (has(Task::kTemporal)) rep.temporal = temporal_report(subset, index, roles, options, rep.coverage["temporal"]);
  if (has(Task::kSpatial)) rep.spatial = spatial_report(subset, index, roles, options, rep.coverage["spatial"]);
  if (has(Task::kDetection)) rep.detection = detection_report(subset, index, roles, options, rep.coverage["detection"]);
  return rep;
}

namespace {

Json metrics_json(const BinaryMetrics& m) {
  return {{"f1", m.f1}, {"accuracy", m.accuracy}, {"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}, {"tn", m.tn}};
}

}  // namespace

Json EvalReport::to_json() const {
  Json j;
  if (semantic) {
    Json per = Json::object();
    for (const auto& [role, m] : semantic->per_role) per[role] = metrics_json(m);
    j["semantic"] = {{"average", {{"f1", semantic->average_f1}, {"accuracy", semantic->average_accuracy}}},
                     {"per_role", per}};
  } else {
    j["semantic"] = nullptr;
  }
  j["temporal"] = temporal ? Json{{"mae_frames", temporal->mae_frames}, {"mae_seconds", temporal->mae_seconds}}
                           : Json(nullptr);
  j["spatial"] = spatial ? Json{{"miou", spatial->miou},
                                {"miou_percent", 100.0 * spatial->miou},
                                {"cd_percent", spatial->cd_percent},
                                {"bse_percent", spatial->bse_percent},
                                {"cd_pixels", spatial->cd_pixels},
                                {"bse_pixels", spatial->bse_pixels}}
                         : Json(nullptr);
  j["detection"] = detection ? metrics_json(*detection) : Json(nullptr);
  Json cov = Json::object();
  for (const auto& [task, c] : coverage) cov[task] = {{"in_scope", c.in_scope}, {"scored", c.scored}, {"missing", c.missing}};
  j["coverage"] = cov;
  j["predictions"] = predictions;
  j["unused_predictions"] = unused_predictions;
  return j;
}

std::string EvalReport::to_table() const {
  std::vector<std::pair<std::string, std::string>> rows;
  auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
  };
  if (semantic) {
    rows.emplace_back("Semantic F1@0.5 (avg)", num(semantic->average_f1));
    rows.emplace_back("Semantic Acc (avg)", num(semantic->average_accuracy));
    for (const auto& [role, m] : semantic->per_role) {
      rows.emplace_back("  " + role + " F1 / Acc", num(m.f1) + " / " + num(m.accuracy));
    }
  }
  if (temporal) {
    rows.emplace_back("Temporal MAE (frames)", num(temporal->mae_frames));
    rows.emplace_back("Temporal MAE (s)", num(temporal->mae_seconds));
  }
  if (spatial) {
    rows.emplace_back("Spatial mIoU (%)", num(100.0 * spatial->miou));
    rows.emplace_back("Spatial CD (%)", num(spatial->cd_percent));
    rows.emplace_back("Spatial BSE (%)", num(spatial->bse_percent));
  }
  if (detection) {
    rows.emplace_back("Detection F1@0.5", num(detection->f1));
    rows.emplace_back("Detection Acc", num(detection->accuracy));
  }
  for (const auto& [task, c] : coverage) {
    rows.emplace_back("Coverage " + task,
                      std::to_string(c.scored) + "/" + std::to_string(c.in_scope) + " (missing " +
                          std::to_string(c.missing) + ")");
  }
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  std::string out;
  for (const auto& [k, v] : rows) {
    out += k;
    out.append(width - k.size() + 2, ' ');
    out += v;
    out += '\n';
  }
  return out;
}

BaselineKind parse_baseline_kind(std::string_view name) {
  if (name == "random") return BaselineKind::kRandom;
  if (name == "prior") return BaselineKind::kPrior;
  if (name == "center_pnr") return BaselineKind::kCenterPnr;
  if (name == "full_frame_box") return BaselineKind::kFullFrameBox;
  fail(ErrorCode::kUsage, "unknown baseline '" + std::string(name) + "'");
}

std::string_view baseline_kind_name(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kRandom: return "random";
    case BaselineKind::kPrior: return "prior";
    case BaselineKind::kCenterPnr: return "center_pnr";
    case BaselineKind::kFullFrameBox: return "full_frame_box";
  }
  return "?";
}

std::vector<PredictionRecord> baseline(BaselineKind kind, const MistakeDataset& target, const MistakeDataset* train,
                                       std::uint64_t seed) {
  const auto& roles = target.roles();
  std::vector<double> prior(roles.size(), 0.0);
  if (kind == BaselineKind::kPrior) {
    if (!train || train->samples.empty()) fail(ErrorCode::kEmptyInput, "prior baseline needs a non-empty train manifest");
    if (!(train->roles() == roles)) fail(ErrorCode::kInvalidArgument, "train manifest uses a different role set");
    for (const auto& s : train->samples) {
      for (std::size_t r = 0; r < roles.size(); ++r) prior[r] += s.labels[r];
    }
    for (auto& p : prior) p /= static_cast<double>(train->samples.size());
  }

  std::vector<PredictionRecord> out;
  out.reserve(target.samples.size());
  for (const auto& s : target.samples) {
    PredictionRecord p;
    p.sample_id = s.sample_id;
    switch (kind) {
      case BaselineKind::kRandom: {
        Rng rng = Rng::stream(seed, fnv1a64(s.sample_id));
        for (const auto& r : roles.names()) p.role_scores[r] = rng.unit();
        const auto span = static_cast<std::uint64_t>(s.clip_end_frame - s.clip_start_frame + 1);
        p.pnr_frame = s.clip_start_frame + static_cast<std::int64_t>(rng.below(span));
        if (s.frame_width && s.frame_height && *s.frame_width > 0 && *s.frame_height > 0) {
          const auto w = static_cast<std::uint64_t>(*s.frame_width);
          const auto h = static_cast<std::uint64_t>(*s.frame_height);
          const auto x = rng.below(w), y = rng.below(h);
          const auto dx = 1 + rng.below(w - x), dy = 1 + rng.below(h - y);
          p.box = BBox{static_cast<double>(x), static_cast<double>(y), static_cast<double>(dx), static_cast<double>(dy)};
        }
        break;
      }
      case BaselineKind::kPrior:
        for (std::size_t r = 0; r < roles.size(); ++r) p.role_scores[roles[r]] = prior[r];
        break;
      case BaselineKind::kCenterPnr:
        p.pnr_frame = s.clip_start_frame + (s.clip_end_frame - s.clip_start_frame) / 2;
        break;
      case BaselineKind::kFullFrameBox:
        if (s.frame_width && s.frame_height) {
          p.box = BBox{0, 0, static_cast<double>(*s.frame_width), static_cast<double>(*s.frame_height)};
        }
        break;
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace misengine
