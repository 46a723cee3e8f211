#include "generator/generator.hpp"

#include <algorithm>
#include <set>

#include "common/error.hpp"
#include "generator/spatial.hpp"

namespace misengine {

CandidatePools::CandidatePools(const RoleIndex& index, std::span<const ActionRecord> records,
                               const SamplerConfig& config)
    : index_(index) {
  std::unordered_map<std::string_view, std::uint32_t> row_of;
  row_of.reserve(records.size());
  for (std::uint32_t i = 0; i < records.size(); ++i) row_of.emplace(records[i].record_id, i);

  const auto groups = index.groups();
  rows_.resize(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto& rows = rows_[g];
    rows.reserve(groups[g].source_record_ids.size());
    for (const auto& id : groups[g].source_record_ids) {
      auto it = row_of.find(id);
      if (it == row_of.end()) fail(ErrorCode::kSchemaMismatch, "group references unknown record '" + id + "'");
      rows.push_back(it->second);
    }
  }
  for (const auto& c : config.counts) {
    if (universe_.count(c.videos)) continue;
    std::vector<GroupId> u;
    for (GroupId g = 0; g < rows_.size(); ++g) {
      if (rows_[g].size() >= c.videos) u.push_back(g);
    }
    universe_.emplace(c.videos, std::move(u));
  }
}

std::span<const GroupId> CandidatePools::universe(std::uint32_t min_videos) const {
  auto it = universe_.find(min_videos);
  if (it == universe_.end()) fail(ErrorCode::kInvalidArgument, "video threshold not configured");
  return it->second;
}

std::vector<GroupId> CandidatePools::shared_with(GroupId g) const {
  std::vector<GroupId> shared;
  for (std::size_t r = 0; r < index_.roles().size(); ++r) {
    auto p = index_.postings(g, r);
    std::vector<GroupId> merged;
    merged.reserve(shared.size() + p.size());
    std::set_union(shared.begin(), shared.end(), p.begin(), p.end(), std::back_inserter(merged));
    shared = std::move(merged);
  }
  return shared;
}

namespace {

std::uint32_t full_mask(const RoleSet& roles) { return (1u << roles.size()) - 1; }

// Shortest posting list among roles that must match, or empty optional if
// every role is mistaken.
std::optional<std::span<const GroupId>> anchor_postings(const RoleIndex& index, GroupId g, MisalignmentCategory cat) {
  std::optional<std::span<const GroupId>> best;
  for (std::size_t r = 0; r < index.roles().size(); ++r) {
    if (cat.contains(r)) continue;
    auto p = index.postings(g, r);
    if (!best || p.size() < best->size()) best = p;
  }
  return best;
}

}  // namespace

std::vector<GroupId> CandidatePools::pool_members(GroupId g, MisalignmentCategory cat, std::uint32_t min_videos) const {
  std::vector<GroupId> out;
  if (auto anchor = anchor_postings(index_, g, cat)) {
    for (GroupId j : *anchor) {
      if (rows_[j].size() >= min_videos && index_.category(g, j) == cat) out.push_back(j);
    }
    return out;
  }
  const auto u = universe(min_videos);
  const auto shared = shared_with(g);
  std::set_difference(u.begin(), u.end(), shared.begin(), shared.end(), std::back_inserter(out));
  return out;
}

std::size_t CandidatePools::pool_size(GroupId g, MisalignmentCategory cat, std::uint32_t min_videos) const {
  if (auto anchor = anchor_postings(index_, g, cat)) {
    std::size_t n = 0;
    for (GroupId j : *anchor) {
      if (rows_[j].size() >= min_videos && index_.category(g, j) == cat) ++n;
    }
    return n;
  }
  const auto u = universe(min_videos);
  std::size_t shared_in_u = 0;
  for (GroupId j : shared_with(g)) {
    if (rows_[j].size() >= min_videos) ++shared_in_u;
  }
  return u.size() - shared_in_u;
}

std::optional<MisalignmentCategory> first_unfillable(const CandidatePools& pools, GroupId g,
                                                     const SamplerConfig& config) {
  for (const auto cat : all_categories(config.roles)) {
    const auto& c = config.counts[cat.mask];
    if (pools.pool_size(g, cat, c.videos) < c.descriptions) return cat;
  }
  return std::nullopt;
}

bool eligible(const CandidatePools& pools, GroupId g, const SamplerConfig& config) {
  return !first_unfillable(pools, g, config);
}

std::uint64_t instruction_stream_key(const SemanticGroups& g) { return fnv1a64(g.tuple_key()); }

std::vector<Assignment> sample_for_instruction(const CandidatePools& pools, GroupId g, const SamplerConfig& config) {
  const auto& index = pools.index();
  if (auto bad = first_unfillable(pools, g, config)) {
    fail(ErrorCode::kInsufficientCandidates,
         "instruction " + std::to_string(g) + " cannot fill category " + bad->name(config.roles));
  }
  Rng rng = Rng::stream(config.seed, instruction_stream_key(index.groups()[g]));
  const std::uint32_t all = full_mask(config.roles);

  std::vector<Assignment> out;
  out.reserve(config.gamma());
  for (const auto cat : all_categories(config.roles)) {
    const auto& counts = config.counts[cat.mask];
    std::vector<GroupId> chosen;
    const std::size_t size = pools.pool_size(g, cat, counts.videos);
    const auto u = pools.universe(counts.videos);
    if (cat.mask == all && size * 2 >= u.size()) {
      // Dense complement: rejection-sample from the universe.
      std::set<GroupId> taken;
      while (chosen.size() < counts.descriptions) {
        const GroupId j = u[rng.below(u.size())];
        if (index.category(g, j).mask != all || !taken.insert(j).second) continue;
        chosen.push_back(j);
      }
    } else {
      auto members = pools.pool_members(g, cat, counts.videos);
      partial_shuffle(members, counts.descriptions, rng);
      chosen.assign(members.begin(), members.begin() + counts.descriptions);
    }

    std::uint32_t ordinal = 0;
    for (GroupId d : chosen) {
      auto rows = pools.rows(d);
      std::vector<std::uint32_t> videos(rows.begin(), rows.end());
      partial_shuffle(videos, counts.videos, rng);
      for (std::uint32_t v = 0; v < counts.videos; ++v) out.push_back(Assignment{cat, d, videos[v], ordinal++});
    }
  }
  return out;
}

namespace {

MistakeSample make_sample(const RoleIndex& index, std::span<const ActionRecord> records, GroupId g,
                          const Assignment& a) {
  const auto& roles = index.roles();
  const auto& instr = index.groups()[g];
  const auto& rec = records[a.record_row];
  MistakeSample s;
  s.sample_id = "g" + std::to_string(g) + "-c" + std::to_string(a.category.mask) + "-" + std::to_string(a.ordinal);
  s.instruction_text = instr.description;
  s.instruction_group_id = g;
  s.instruction_record_ids = instr.source_record_ids;
  s.attempt_record_id = rec.record_id;
  s.attempt_group_id = a.description;
  s.attempt_description = rec.description;
  s.category = a.category;
  s.labels.resize(roles.size());
  for (std::size_t r = 0; r < roles.size(); ++r) s.labels[r] = a.category.contains(r) ? 1 : 0;
  s.ordinal = a.ordinal;
  s.pnr_frame = rec.pnr_frame;
  if (rec.pnr_frame) s.mistake_box = spatial_annotation(roles, a.category, rec.hand_boxes, rec.object_boxes);
  s.video_id = rec.video_id;
  s.clip_start_frame = rec.clip_start_frame;
  s.clip_end_frame = rec.clip_end_frame;
  s.fps = rec.fps;
  s.frame_width = rec.frame_width;
  s.frame_height = rec.frame_height;
  return s;
}

}  // namespace

MistakeDataset generate(std::span<const ActionRecord> records, const RoleIndex& index, const SamplerConfig& config,
                        unsigned threads) {
  config.validate();
  if (!(index.roles() == config.roles)) fail(ErrorCode::kInvalidArgument, "index and config role sets differ");
  if (!(index.comparator().to_json() == config.comparator.to_json())) {
    fail(ErrorCode::kInvalidArgument, "index was built with a different comparator");
  }
  const CandidatePools pools(index, records, config);
  const std::size_t n = index.group_count();
  const std::size_t n_cats = std::size_t{1} << config.roles.size();

  std::vector<std::optional<MisalignmentCategory>> unfillable(n);
  std::vector<std::vector<MistakeSample>> per_group(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto g = static_cast<GroupId>(i);
    unfillable[i] = first_unfillable(pools, g, config);
    if (unfillable[i]) return;
    const auto assignments = sample_for_instruction(pools, g, config);
    auto& out = per_group[i];
    out.reserve(assignments.size());
    for (const auto& a : assignments) out.push_back(make_sample(index, records, g, a));
  });

  MistakeDataset d;
  d.config = config;
  d.counters.groups = n;
  d.counters.per_category.assign(n_cats, 0);
  d.counters.filtered_by_category.assign(n_cats, 0);
  std::size_t total = 0;
  for (const auto& v : per_group) total += v.size();
  d.samples.reserve(total);
  for (std::size_t i = 0; i < n; ++i) {
    if (unfillable[i]) {
      ++d.counters.filtered_instructions;
      ++d.counters.filtered_by_category[unfillable[i]->mask];
      continue;
    }
    ++d.counters.eligible_instructions;
    for (auto& s : per_group[i]) {
      ++d.counters.per_category[s.category.mask];
      if (!s.pnr_frame) ++d.counters.missing_pnr;
      if (!s.category.empty() && !s.mistake_box) ++d.counters.missing_box;
      d.samples.push_back(std::move(s));
    }
  }
  d.counters.samples = d.samples.size();
  if (d.counters.samples != dataset_size(d.counters.eligible_instructions, config.gamma())) {
    fail(ErrorCode::kInvariantViolation, "sample count does not equal instructions * gamma");
  }
  return d;
}

MistakeDataset generate_from_records(std::span<const ActionRecord> records, const GroupingOptions& grouping,
                                     const SamplerConfig& config, unsigned threads) {
  GroupingOptions opts = grouping;
  opts.roles = config.roles;
  opts.threads = threads;
  const auto grouped = group_corpus(records, opts);
  const auto index = build_index(grouped.groups, config.roles, config.comparator);
  auto d = generate(records, index, config, threads);
  d.parser_info = grouped.parser_info;
  d.parser_info["counters"] = grouped.counters();
  return d;
}

}  // namespace misengine
