#include "splitstats/splitstats.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace misengine {

std::array<double, 3> SplitSpec::parse_ratios(const std::string& text) {
  std::array<double, 3> out{};
  std::size_t pos = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto colon = text.find(':', pos);
    if ((k < 2) == (colon == std::string::npos)) fail(ErrorCode::kUsage, "ratios must look like 8:1:1");
    const std::string part = text.substr(pos, k < 2 ? colon - pos : std::string::npos);
    try {
      std::size_t used = 0;
      out[k] = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      fail(ErrorCode::kUsage, "bad ratio '" + part + "'");
    }
    pos = colon + 1;
  }
  return out;
}

void SplitSpec::validate() const {
  double sum = 0;
  for (double r : ratios) {
    if (!(r >= 0)) fail(ErrorCode::kInvalidArgument, "ratios must be non-negative");
    sum += r;
  }
  if (!(sum > 0)) fail(ErrorCode::kInvalidArgument, "ratios must not all be zero");
}

Json SplitSpec::to_json() const {
  return {{"ratios", ratios}, {"unit", unit == SplitUnit::kInstruction ? "instruction" : "sample"}, {"seed", seed}};
}

namespace {

constexpr std::uint64_t kSplitStreamKey = 0x73706c6974ULL;  // "split"

// Gives every non-zero part at least one unit by taking from the fullest part.
void ensure_nonempty(std::array<std::size_t, 3>& counts, const std::array<double, 3>& ratios) {
  for (std::size_t k = 0; k < 3; ++k) {
    if (ratios[k] <= 0 || counts[k] > 0) continue;
    const auto donor = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    if (counts[donor] <= 1) fail(ErrorCode::kRatioInfeasible, "too few units for the requested ratios");
    --counts[donor];
    ++counts[k];
  }
}

}  // namespace

SplitResult split(const MistakeDataset& dataset, const SplitSpec& spec) {
  spec.validate();
  if (dataset.samples.empty()) fail(ErrorCode::kEmptyInput, "cannot split an empty dataset");
  const auto& ratios = spec.ratios;
  const long double ratio_sum = static_cast<long double>(ratios[0]) + ratios[1] + ratios[2];
  const std::size_t nonzero = std::count_if(ratios.begin(), ratios.end(), [](double r) { return r > 0; });

  // Units in dataset order; each unit owns a list of sample positions.
  std::vector<std::vector<std::size_t>> units;
  if (spec.unit == SplitUnit::kInstruction) {
    std::map<GroupId, std::size_t> unit_of;
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
      auto [it, fresh] = unit_of.emplace(dataset.samples[i].instruction_group_id, units.size());
      if (fresh) units.emplace_back();
      units[it->second].push_back(i);
    }
  } else {
    units.reserve(dataset.samples.size());
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) units.push_back({i});
  }
  if (units.size() < nonzero) {
    fail(ErrorCode::kRatioInfeasible, std::to_string(units.size()) + " units for " + std::to_string(nonzero) +
                                          " non-empty parts");
  }

  std::vector<std::size_t> order(units.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng::stream(spec.seed, kSplitStreamKey);
  shuffle(order, rng);

  std::array<std::size_t, 3> counts{};
  if (spec.unit == SplitUnit::kInstruction) {
    const auto total = static_cast<long double>(dataset.samples.size());
    const std::array<long double, 3> bound{total * ratios[0] / ratio_sum, total * (ratios[0] + ratios[1]) / ratio_sum,
                                           total};
    std::size_t placed = 0;
    for (std::size_t u : order) {
      std::size_t k = 0;
      while (k < 2 && !(static_cast<long double>(placed) < bound[k])) ++k;
      ++counts[k];
      placed += units[u].size();
    }
  } else {
    const std::size_t n = units.size();
    std::array<long double, 3> frac{};
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      const long double quota = static_cast<long double>(n) * ratios[k] / ratio_sum;
      counts[k] = static_cast<std::size_t>(quota);
      frac[k] = quota - counts[k];
      assigned += counts[k];
    }
    std::array<std::size_t, 3> by_frac{0, 1, 2};
    std::stable_sort(by_frac.begin(), by_frac.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[by_frac[i % 3]];
  }
  ensure_nonempty(counts, ratios);

  SplitResult result;
  std::vector<std::uint8_t> part_of(dataset.samples.size());
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t c = 0; c < counts[k]; ++c, ++cursor) {
      for (std::size_t pos : units[order[cursor]]) part_of[pos] = static_cast<std::uint8_t>(k);
    }
    result.instructions[k] = 0;
  }
  std::array<std::set<GroupId>, 3> instr;
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    result.sample_ids[part_of[i]].push_back(dataset.samples[i].sample_id);
    instr[part_of[i]].insert(dataset.samples[i].instruction_group_id);
  }
  for (std::size_t k = 0; k < 3; ++k) result.instructions[k] = instr[k].size();
  return result;
}

void write_split_files(const SplitResult& result, const SplitSpec& spec, const MistakeDataset& dataset,
                       const std::filesystem::path& dir) {
  const std::string manifest_hash =
      config_hash(Json{{"config", dataset.config.to_json()}, {"parser", dataset.parser_info}});
  for (std::size_t k = 0; k < 3; ++k) {
    Json header{{"format", "misengine-split"},
                {"version", 1},
                {"engine_version", kEngineVersion},
                {"rng", kRngAlgorithm},
                {"part", kSplitNames[k]},
                {"spec", spec.to_json()},
                {"manifest_config_hash", manifest_hash},
                {"samples", result.sample_ids[k].size()},
                {"instructions", result.instructions[k]}};
    std::string out = "# " + header.dump() + "\n";
    for (const auto& id : result.sample_ids[k]) {
      out += id;
      out += '\n';
    }
    write_file_atomic(dir / (std::string(kSplitNames[k]) + ".txt"), out);
  }
}

std::vector<std::string> read_split_file(const std::filesystem::path& path) {
  std::vector<std::string> ids;
  for (auto& line : split_lines(read_file(path))) {
    if (line.empty() || line.front() == '#') continue;
    ids.push_back(std::move(line));
  }
  return ids;
}

Json StatsReport::to_json() const {
  Json j;
  j["total_samples"] = total_samples;
  j["activities"] = activities;
  j["samples_per_activity"] = samples_per_activity;
  j["participants"] = participants ? Json(*participants) : Json(nullptr);
  j["environments"] = environments ? Json(*environments) : Json(nullptr);
  Json cats = Json::object();
  for (const auto& [name, n] : per_category) cats[name] = n;
  j["per_category"] = std::move(cats);
  j["temporal_percent"] = temporal_percent;
  j["spatial_percent"] = spatial_percent;
  return j;
}

std::string StatsReport::to_table() const {
  std::vector<std::pair<std::string, std::string>> rows;
  auto fmt = [](double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return std::string(buf);
  };
  auto opt = [](const std::optional<std::uint64_t>& v) { return v ? std::to_string(*v) : std::string("n/a"); };
  rows.emplace_back("Samples", std::to_string(total_samples));
  rows.emplace_back("By activity", fmt(samples_per_activity, 1));
  rows.emplace_back("Activities", std::to_string(activities));
  rows.emplace_back("Participants", opt(participants));
  rows.emplace_back("Environments", opt(environments));
  for (const auto& [name, n] : per_category) rows.emplace_back("Category " + name, std::to_string(n));
  rows.emplace_back("Temporal annotated %", fmt(temporal_percent, 2));
  rows.emplace_back("Spatial annotated %", fmt(spatial_percent, 2));
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

StatsReport stats(const MistakeDataset& dataset, std::span<const ActionRecord> records) {
  StatsReport rep;
  rep.total_samples = dataset.samples.size();
  rep.activities = dataset.instruction_count();
  rep.samples_per_activity = rep.activities ? static_cast<double>(rep.total_samples) / rep.activities : 0.0;
  const std::size_t n_cats = std::size_t{1} << dataset.roles().size();
  std::vector<std::uint64_t> per(n_cats, 0);
  std::uint64_t with_pnr = 0, with_box = 0;
  for (const auto& s : dataset.samples) {
    ++per[s.category.mask];
    if (s.pnr_frame) ++with_pnr;
    if (s.mistake_box) ++with_box;
  }
  for (std::size_t m = 0; m < n_cats; ++m) {
    rep.per_category.emplace_back(MisalignmentCategory{static_cast<std::uint32_t>(m)}.name(dataset.roles()), per[m]);
  }
  if (rep.total_samples) {
    rep.temporal_percent = 100.0 * static_cast<double>(with_pnr) / rep.total_samples;
    rep.spatial_percent = 100.0 * static_cast<double>(with_box) / rep.total_samples;
  }
  if (!records.empty()) {
    std::unordered_map<std::string_view, const ActionRecord*> by_id;
    for (const auto& r : records) by_id.emplace(r.record_id, &r);
    std::unordered_set<std::string> participants, environments;
    for (const auto& s : dataset.samples) {
      auto it = by_id.find(s.attempt_record_id);
      if (it == by_id.end()) continue;
      if (it->second->participant_id) participants.insert(*it->second->participant_id);
      if (it->second->environment_id) environments.insert(*it->second->environment_id);
    }
    if (!participants.empty()) rep.participants = participants.size();
    if (!environments.empty()) rep.environments = environments.size();
  }
  return rep;
}

}  // namespace misengine
