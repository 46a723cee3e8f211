#include "oracle/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include "roles/canonical.hpp"
#include "roles/parser.hpp"

namespace misengine::oracle {

void Check::expect(bool good, const std::string& what) {
  ++checked;
  if (good) return;
  ++mismatches;
  if (examples.size() < 5) examples.push_back(what);
}

void Check::merge(const Check& other) {
  checked += other.checked;
  mismatches += other.mismatches;
  for (const auto& e : other.examples) {
    if (examples.size() < 5) examples.push_back(e);
  }
}

Json Check::to_json() const {
  return {{"name", name}, {"checked", checked}, {"mismatches", mismatches}, {"examples", examples}, {"ok", ok()}};
}

namespace {

bool same_role(const Comparator& cmp, const std::string& role, const RoleGroup& a, const RoleGroup& b) {
  if (cmp.mode_for(role) == CompareMode::kTaxonomy) return a.taxonomy == b.taxonomy;
  return a.key == b.key;
}

std::uint32_t brute_mask(const RoleIndex& index, const SemanticGroups& a, const SemanticGroups& b) {
  std::uint32_t mask = 0;
  const auto& roles = index.roles();
  for (std::size_t r = 0; r < roles.size(); ++r) {
    if (!same_role(index.comparator(), roles[r], a.roles[r], b.roles[r])) mask |= 1u << r;
  }
  return mask;
}

template <typename T>
std::string join_ids(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size() && i < 8; ++i) out += (i ? "," : "") + std::to_string(v[i]);
  if (v.size() > 8) out += ",...";
  return out;
}

}  // namespace

std::vector<GroupId> brute_candidates(const RoleIndex& index, GroupId g, MisalignmentCategory cat) {
  const auto groups = index.groups();
  std::vector<GroupId> out;
  for (GroupId j = 0; j < groups.size(); ++j) {
    if (j != g && brute_mask(index, groups[g], groups[j]) == cat.mask) out.push_back(j);
  }
  return out;
}

Check check_candidates(const RoleIndex& index) {
  Check c{"candidates"};
  const auto n = static_cast<GroupId>(index.group_count());
  const auto cats = all_categories(index.roles());
  std::vector<std::uint8_t> seen(n);
  for (GroupId g = 0; g < n; ++g) {
    std::fill(seen.begin(), seen.end(), 0);
    std::size_t covered = 0;
    bool disjoint = true;
    for (const auto cat : cats) {
      const auto fast = candidates(index, g, cat);
      const auto slow = brute_candidates(index, g, cat);
      c.expect(fast == slow, "group " + std::to_string(g) + " category " + cat.name(index.roles()) + ": index [" +
                                 join_ids(fast) + "] brute [" + join_ids(slow) + "]");
      for (GroupId j : fast) {
        if (j >= n || seen[j]++) disjoint = false;
        ++covered;
      }
    }
    c.expect(disjoint && covered == n - 1 && !seen[g],
             "categories of group " + std::to_string(g) + " do not partition the other groups");
  }
  return c;
}

Check check_labels_truth(const MistakeDataset& dataset, const std::unordered_map<std::string, SynthTruth>& truth) {
  Check c{"labels-vs-truth"};
  const auto& roles = dataset.roles();
  const auto& cmp = dataset.config.comparator;
  for (const auto& s : dataset.samples) {
    auto ti = truth.find(s.instruction_record_ids.empty() ? std::string() : s.instruction_record_ids.front());
    auto ta = truth.find(s.attempt_record_id);
    if (ti == truth.end() || ta == truth.end()) {
      c.expect(false, s.sample_id + ": no truth for its records");
      continue;
    }
    std::uint32_t mask = 0;
    for (std::size_t r = 0; r < roles.size(); ++r) {
      const bool tax = cmp.mode_for(roles[r]) == CompareMode::kTaxonomy;
      bool differs;
      if (roles[r] == kPredicate) {
        differs = tax ? ti->second.verb_class != ta->second.verb_class : ti->second.verb != ta->second.verb;
      } else if (roles[r] == kObject) {
        differs = tax ? ti->second.noun_class != ta->second.noun_class : ti->second.noun != ta->second.noun;
      } else {
        differs = s.labels[r] != 0;  // no truth for other roles
      }
      if (differs) mask |= 1u << r;
      c.expect((s.labels[r] != 0) == differs, s.sample_id + ": role " + roles[r] + " label " +
                                                  std::to_string(s.labels[r]) + " truth " + std::to_string(differs));
    }
    c.expect(s.category.mask == mask, s.sample_id + ": category does not match truth");
  }
  return c;
}

Check check_labels_reparse(const MistakeDataset& dataset, std::span<const ActionRecord> records,
                           const VerbLexicon& lexicon) {
  Check c{"labels-vs-reparse"};
  const auto& roles = dataset.roles();
  const auto& cmp = dataset.config.comparator;

  auto keys_of = [&](const std::string& text) -> std::optional<std::vector<std::string>> {
    auto parsed = parse_description(text, roles, lexicon);
    const auto* g = std::get_if<SemanticGroups>(&parsed);
    if (!g) return std::nullopt;
    std::vector<std::string> keys;
    for (const auto& rg : g->roles) keys.push_back(canonicalize(rg.surface));
    return keys;
  };

  std::unordered_map<std::string, const ActionRecord*> by_id;
  for (const auto& r : records) by_id.emplace(r.record_id, &r);

  // Majority class id per (role tuple, role) over the records that parse to it.
  std::map<std::vector<std::string>, std::vector<std::map<std::int64_t, std::size_t>>> votes;
  for (const auto& r : records) {
    auto keys = keys_of(r.description);
    if (!keys) continue;
    auto& v = votes[*keys];
    v.resize(roles.size());
    for (std::size_t i = 0; i < roles.size(); ++i) {
      std::optional<std::int64_t> cls;
      if (roles[i] == kPredicate) cls = r.taxonomy_verb;
      if (roles[i] == kObject) cls = r.taxonomy_noun;
      if (cls) ++v[i][*cls];
    }
  }
  auto majority = [&](const std::vector<std::string>& keys, std::size_t role) -> std::optional<std::int64_t> {
    auto it = votes.find(keys);
    if (it == votes.end() || it->second[role].empty()) return std::nullopt;
    std::optional<std::int64_t> best;
    std::size_t best_n = 0;
    for (const auto& [cls, n] : it->second[role]) {
      if (n > best_n) best = cls, best_n = n;  // map order: ties keep the smaller id
    }
    return best;
  };

  for (const auto& s : dataset.samples) {
    auto rec = by_id.find(s.attempt_record_id);
    if (rec == by_id.end()) {
      c.expect(false, s.sample_id + ": attempt record not in the store");
      continue;
    }
    const auto ki = keys_of(s.instruction_text);
    const auto ka = keys_of(rec->second->description);
    if (!ki || !ka) {
      c.expect(false, s.sample_id + ": description no longer parses");
      continue;
    }
    std::uint32_t mask = 0;
    for (std::size_t r = 0; r < roles.size(); ++r) {
      const bool differs = cmp.mode_for(roles[r]) == CompareMode::kTaxonomy ? majority(*ki, r) != majority(*ka, r)
                                                                              : (*ki)[r] != (*ka)[r];
      if (differs) mask |= 1u << r;
      c.expect((s.labels[r] != 0) == differs, s.sample_id + ": role " + roles[r] + " '" + (*ki)[r] + "' vs '" +
                                                  (*ka)[r] + "' label " + std::to_string(s.labels[r]));
    }
    c.expect(s.category.mask == mask, s.sample_id + ": category does not match re-derived labels");
  }
  return c;
}

Check check_dataset_shape(const MistakeDataset& dataset, const RoleIndex& index) {
  Check c{"dataset-shape"};
  const auto& config = dataset.config;
  const auto& roles = index.roles();
  const auto groups = index.groups();
  const std::size_t n = groups.size();
  const std::size_t n_cats = std::size_t{1} << roles.size();

  // Own interning of the comparison value per role.
  std::vector<std::vector<std::uint32_t>> key(n, std::vector<std::uint32_t>(roles.size()));
  for (std::size_t r = 0; r < roles.size(); ++r) {
    std::map<std::string, std::uint32_t> ids;
    const bool tax = config.comparator.mode_for(roles[r]) == CompareMode::kTaxonomy;
    for (std::size_t g = 0; g < n; ++g) {
      const auto& rg = groups[g].roles[r];
      const std::string v = tax ? (rg.taxonomy ? std::to_string(*rg.taxonomy) : std::string("?")) : "=" + rg.key;
      key[g][r] = ids.emplace(v, static_cast<std::uint32_t>(ids.size())).first->second;
    }
  }
  auto mask_of = [&](std::size_t a, std::size_t b) {
    std::uint32_t m = 0;
    for (std::size_t r = 0; r < roles.size(); ++r) {
      if (key[a][r] != key[b][r]) m |= 1u << r;
    }
    return m;
  };

  std::set<GroupId> expected;
  for (std::size_t g = 0; g < n; ++g) {
    std::vector<std::uint64_t> pool(n_cats, 0);
    for (std::size_t j = 0; j < n; ++j) {
      const auto m = mask_of(g, j);
      if (m != 0 && j == g) continue;
      if (groups[j].source_record_ids.size() >= config.counts[m].videos) ++pool[m];
    }
    bool ok = true;
    for (std::size_t m = 0; m < n_cats; ++m) ok = ok && pool[m] >= config.counts[m].descriptions;
    if (ok) expected.insert(static_cast<GroupId>(g));
  }

  std::map<GroupId, std::vector<const MistakeSample*>> by_instr;
  std::unordered_set<std::string> ids;
  for (const auto& s : dataset.samples) {
    by_instr[s.instruction_group_id].push_back(&s);
    c.expect(ids.insert(s.sample_id).second, "duplicate sample id " + s.sample_id);
    bool any = false;
    std::uint32_t m = 0;
    for (std::size_t r = 0; r < s.labels.size(); ++r) {
      any = any || s.labels[r];
      if (s.labels[r]) m |= 1u << r;
    }
    c.expect(s.detection_label() == any, s.sample_id + ": detection label is not the OR of role labels");
    c.expect(s.category.mask == m, s.sample_id + ": category mask differs from labels");
    if (s.instruction_group_id >= n || s.attempt_group_id >= n) {
      c.expect(false, s.sample_id + ": group id out of range");
      continue;
    }
    c.expect(mask_of(s.instruction_group_id, s.attempt_group_id) == s.category.mask,
             s.sample_id + ": category differs from brute-force comparison");
    const auto& src = groups[s.attempt_group_id].source_record_ids;
    c.expect(std::find(src.begin(), src.end(), s.attempt_record_id) != src.end(),
             s.sample_id + ": attempt record is not in the attempt group");
    c.expect(s.category.mask != 0 || s.attempt_group_id == s.instruction_group_id ||
                 mask_of(s.instruction_group_id, s.attempt_group_id) == 0,
             s.sample_id + ": no-mistake attempt from a different tuple");
  }

  std::set<GroupId> got;
  for (const auto& [g, _] : by_instr) got.insert(g);
  c.expect(got == expected, "retained instructions: " + std::to_string(got.size()) + " vs brute-force eligible " +
                                std::to_string(expected.size()));
  c.expect(dataset.counters.eligible_instructions == expected.size(), "eligible counter disagrees");
  c.expect(dataset.samples.size() == expected.size() * config.gamma(), "size law violated");

  for (const auto& [g, samples] : by_instr) {
    c.expect(samples.size() == config.gamma(), "instruction " + std::to_string(g) + " has " +
                                                   std::to_string(samples.size()) + " samples");
    std::vector<std::map<GroupId, std::set<std::string>>> per_cat(n_cats);
    std::vector<std::size_t> count(n_cats, 0);
    for (const auto* s : samples) {
      ++count[s->category.mask];
      c.expect(per_cat[s->category.mask][s->attempt_group_id].insert(s->attempt_record_id).second,
               s->sample_id + ": attempt record drawn twice");
    }
    for (std::size_t m = 0; m < n_cats; ++m) {
      const auto& want = config.counts[m];
      c.expect(count[m] == std::size_t{want.descriptions} * want.videos,
               "instruction " + std::to_string(g) + " category " + std::to_string(m) + " count");
      c.expect(per_cat[m].size() == want.descriptions,
               "instruction " + std::to_string(g) + " category " + std::to_string(m) + " distinct descriptions");
      for (const auto& [d, recs] : per_cat[m]) {
        c.expect(recs.size() == want.videos, "instruction " + std::to_string(g) + " description " +
                                                 std::to_string(d) + " video count");
      }
    }
  }
  return c;
}

BinaryMetrics brute_confusion(std::span<const ScoredLabel> pairs, double threshold) {
  BinaryMetrics m;
  for (bool pred : {false, true}) {
    for (bool gold : {false, true}) {
      std::uint64_t cell = 0;
      for (const auto& p : pairs) cell += ((p.score >= threshold) == pred && p.gold == gold) ? 1 : 0;
      if (pred && gold) m.tp = cell;
      if (pred && !gold) m.fp = cell;
      if (!pred && gold) m.fn = cell;
      if (!pred && !gold) m.tn = cell;
    }
  }
  if (m.tp + m.fp + m.fn == 0) {
    m.f1 = 1.0;
  } else if (m.tp == 0) {
    m.f1 = 0.0;
  } else {
    const double precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
    const double recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    m.f1 = 2 * precision * recall / (precision + recall);
  }
  const auto total = static_cast<double>(pairs.size());
  m.accuracy = pairs.empty() ? 0.0 : static_cast<double>(m.tp + m.tn) / total;
  return m;
}

}  // namespace misengine::oracle
