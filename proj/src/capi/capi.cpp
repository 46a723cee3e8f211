#include "misengine/misengine.h"

#include <cstdlib>
#include <cstring>
#include <initializer_list>
#include <new>
#include <string>

#include "common/error.hpp"
#include "corpus/ingest.hpp"
#include "corpus/store.hpp"
#include "eval/harness.hpp"
#include "generator/generator.hpp"
#include "roles/grouping.hpp"
#include "selftest/selftest.hpp"
#include "splitstats/splitstats.hpp"
#include "synth/synth.hpp"

using namespace misengine;

struct me_corpus {
  RecordStore store;
};

struct me_groups {
  GroupingResult result;
};

struct me_dataset {
  MistakeDataset dataset;
};

struct me_predictions {
  std::vector<PredictionRecord> records;
  Json header = Json::object();
};

namespace {

thread_local std::string t_error;
thread_local std::size_t t_line = 0;

template <typename F>
me_status guarded(F&& body) {
  try {
    body();
    t_error.clear();
    t_line = 0;
    return ME_OK;
  } catch (const Error& e) {
    t_error = e.what();
    t_line = e.line().value_or(0);
    return static_cast<me_status>(e.code());
  } catch (const Json::exception& e) {
    t_error = std::string("schema: ") + e.what();
    t_line = 0;
    return ME_E_SCHEMA_MISMATCH;
  } catch (const std::bad_alloc&) {
    t_error = "out of memory";
    t_line = 0;
    return ME_E_INVARIANT;
  } catch (const std::exception& e) {
    t_error = std::string("internal: ") + e.what();
    t_line = 0;
    return ME_E_INVARIANT;
  }
}

void require(const void* p, const char* what) {
  if (!p) fail(ErrorCode::kUsage, std::string(what) + " must not be NULL");
}

Json options_of(const char* text, std::initializer_list<std::string_view> allowed) {
  if (!text || !*text) return Json::object();
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kUsage, std::string("options are not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::kUsage, "options must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (auto a : allowed) known = known || it.key() == a;
    if (!known) fail(ErrorCode::kUsage, "unknown option '" + it.key() + "'");
  }
  return j;
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void put(char** out, const std::string& s) {
  if (out) *out = dup(s);
}

Comparator comparator_of(const Json& j) {
  if (j.is_string()) return Comparator{parse_compare_mode(j.get<std::string>()), {}};
  if (j.is_object()) return Comparator::from_json(j);
  fail(ErrorCode::kUsage, "comparator must be a mode name or an object");
}

SamplerConfig config_of(const Json& j, const RoleSet& roles) {
  SamplerConfig c;
  if (j.contains("preset")) {
    c = SamplerConfig::from_preset(j["preset"].get<std::string>());
  } else {
    c = SamplerConfig::uniform(roles, 1, 1);
  }
  if (j.contains("roles")) {
    const RoleSet wanted = j["roles"].is_string() ? RoleSet::parse(j["roles"].get<std::string>())
                                                  : RoleSet(j["roles"].get<std::vector<std::string>>());
    if (!(wanted == roles)) fail(ErrorCode::kInvalidArgument, "config roles differ from the parsed groups");
  }
  if (!(c.roles == roles)) {
    fail(ErrorCode::kInvalidArgument, "preset roles " + c.roles.to_string() + " differ from the parsed groups " +
                                          roles.to_string());
  }
  if (j.contains("comparator")) c.comparator = comparator_of(j["comparator"]);
  if (j.contains("counts")) {
    c.counts.clear();
    for (const auto& e : j["counts"]) {
      if (e.is_array() && e.size() == 2) {
        c.counts.push_back({e[0].get<std::uint32_t>(), e[1].get<std::uint32_t>()});
      } else {
        c.counts.push_back({e.at("descriptions").get<std::uint32_t>(), e.at("videos").get<std::uint32_t>()});
      }
    }
    if (!c.preset.empty()) c.preset += "+counts";
  }
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  c.validate();
  return c;
}

}  // namespace

extern "C" {

const char* me_version(void) { return kEngineVersion.data(); }

const char* me_status_name(me_status status) {
  return error_code_name(static_cast<ErrorCode>(status)).data();
}

int me_status_exit_code(me_status status) {
  switch (status) {
    case ME_OK: return 0;
    case ME_E_USAGE: return 1;
    case ME_E_INVARIANT: return 3;
    default: return 2;
  }
}

const char* me_last_error(void) { return t_error.c_str(); }
size_t me_last_error_line(void) { return t_line; }
void me_string_free(char* text) { std::free(text); }

/* corpus */

me_status me_corpus_ingest(const char* options_json, me_corpus** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    const Json opt = options_of(options_json, {"tables", "structured"});
    std::vector<IngestResult> parts;
    Json prov{{"tables", Json::array()}, {"structured", Json::array()}};
    for (const auto& t : opt.value("tables", Json::array())) {
      const std::string delim = t.value("delimiter", ",");
      if (delim.size() != 1) fail(ErrorCode::kUsage, "delimiter must be one character");
      const auto mapping = ColumnMapping::parse(t.at("mapping").get<std::string>(), delim[0]);
      parts.push_back(ingest_table(t.at("path").get<std::string>(), mapping));
      prov["tables"].push_back({{"path", t.at("path")}, {"mapping", mapping.to_json()}});
    }
    for (const auto& p : opt.value("structured", Json::array())) {
      parts.push_back(ingest_structured(p.get<std::string>()));
      prov["structured"].push_back(p);
    }
    if (parts.empty()) fail(ErrorCode::kUsage, "no input tables or structured files given");
    auto merged = merge_ingest(std::move(parts));
    prov["rows_in"] = merged.rows_in;
    prov["dropped"] = merged.dropped;
    prov["records"] = merged.records.size();
    prov["warnings"] = merged.warnings;
    auto* c = new me_corpus{RecordStore{std::move(merged.records), std::move(prov)}};
    *out = c;
  });
}

me_status me_corpus_synthesize(const char* options_json, me_corpus** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    const Json opt = options_of(options_json, {"kind", "verbs", "nouns", "records_per_group", "noise_groups", "groups",
                                               "max_records_per_group", "seed"});
    const std::string kind = opt.value("kind", "grid");
    SynthCorpus corpus;
    if (kind == "grid") {
      GridSpec s;
      s.verbs = opt.value("verbs", s.verbs);
      s.nouns = opt.value("nouns", s.nouns);
      s.records_per_group = opt.value("records_per_group", s.records_per_group);
      s.noise_groups = opt.value("noise_groups", s.noise_groups);
      s.seed = opt.value("seed", s.seed);
      corpus = synth_grid(s);
    } else if (kind == "random") {
      RandomSpec s;
      s.groups = opt.value("groups", s.groups);
      s.max_records_per_group = opt.value("max_records_per_group", s.max_records_per_group);
      s.seed = opt.value("seed", s.seed);
      corpus = synth_random(s);
    } else {
      fail(ErrorCode::kUsage, "unknown synthetic corpus kind '" + kind + "'");
    }
    Json prov{{"synthetic", opt}, {"records", corpus.records.size()}};
    *out = new me_corpus{RecordStore{std::move(corpus.records), std::move(prov)}};
  });
}

me_status me_corpus_load(const char* path, me_corpus** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new me_corpus{load_store(path)};
  });
}

me_status me_corpus_save(const me_corpus* corpus, const char* path) {
  return guarded([&] {
    require(corpus, "corpus");
    require(path, "path");
    save_store(corpus->store, path);
  });
}

me_status me_corpus_info(const me_corpus* corpus, char** json_out) {
  return guarded([&] {
    require(corpus, "corpus");
    Json j{{"records", corpus->store.records.size()}, {"provenance", corpus->store.provenance}};
    put(json_out, j.dump());
  });
}

size_t me_corpus_size(const me_corpus* corpus) { return corpus ? corpus->store.records.size() : 0; }
void me_corpus_free(me_corpus* corpus) { delete corpus; }

/* groups */

me_status me_groups_build(const me_corpus* corpus, const char* options_json, me_groups** out) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out, "out");
    *out = nullptr;
    const Json opt = options_of(options_json, {"roles", "lexicon", "srl", "srl_labels", "threads"});
    GroupingOptions g;
    if (opt.contains("roles")) g.roles = RoleSet::parse(opt["roles"].get<std::string>());
    g.threads = resolve_threads(opt.value("threads", 1u));
    std::optional<VerbLexicon> lexicon;
    if (opt.contains("lexicon")) {
      lexicon = VerbLexicon::from_file(opt["lexicon"].get<std::string>());
      g.lexicon = &*lexicon;
    }
    SrlTable table;
    if (opt.contains("srl")) {
      const auto labels = opt.contains("srl_labels") ? SrlLabelMap::parse(opt["srl_labels"].get<std::string>())
                                                     : SrlLabelMap{};
      table = make_srl_table(import_external_srl(opt["srl"].get<std::string>(), g.roles, labels));
      g.srl = &table;
    }
    *out = new me_groups{group_corpus(corpus->store.records, g)};
  });
}

me_status me_groups_load(const char* path, me_groups** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new me_groups{load_groups(path)};
  });
}

me_status me_groups_save(const me_groups* groups, const char* path) {
  return guarded([&] {
    require(groups, "groups");
    require(path, "path");
    save_groups(groups->result, path);
  });
}

me_status me_groups_info(const me_groups* groups, char** json_out) {
  return guarded([&] {
    require(groups, "groups");
    Json j{{"roles", groups->result.roles.names()},
           {"groups", groups->result.groups.size()},
           {"counters", groups->result.counters()},
           {"parser", groups->result.parser_info}};
    put(json_out, j.dump());
  });
}

size_t me_groups_count(const me_groups* groups) { return groups ? groups->result.groups.size() : 0; }
void me_groups_free(me_groups* groups) { delete groups; }

me_status me_index_histogram(const me_groups* groups, const char* options_json, char** json_out) {
  return guarded([&] {
    require(groups, "groups");
    const Json opt = options_of(options_json, {"comparator"});
    const Comparator cmp = opt.contains("comparator") ? comparator_of(opt["comparator"]) : Comparator{};
    const auto index = build_index(groups->result.groups, groups->result.roles, cmp);
    Json j{{"comparator", cmp.to_json()}, {"groups", index.group_count()}, {"roles", index.histogram()}};
    put(json_out, j.dump());
  });
}

/* generation */

me_status me_dataset_generate(const me_corpus* corpus, const me_groups* groups, const char* config_json,
                              unsigned threads, me_dataset** out) {
  return guarded([&] {
    require(corpus, "corpus");
    require(groups, "groups");
    require(out, "out");
    *out = nullptr;
    const Json opt = options_of(config_json, {"preset", "seed", "comparator", "counts", "roles"});
    const auto& g = groups->result;
    const SamplerConfig config = config_of(opt, g.roles);
    const auto index = build_index(g.groups, g.roles, config.comparator);
    auto d = generate(corpus->store.records, index, config, resolve_threads(threads));
    d.parser_info = g.parser_info;
    d.parser_info["counters"] = g.counters();
    *out = new me_dataset{std::move(d)};
  });
}

me_status me_dataset_load(const char* path, me_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new me_dataset{load_manifest(path)};
  });
}

me_status me_dataset_save(const me_dataset* dataset, const char* path) {
  return guarded([&] {
    require(dataset, "dataset");
    require(path, "path");
    save_manifest(dataset->dataset, path);
  });
}

me_status me_dataset_serialize(const me_dataset* dataset, char** text_out) {
  return guarded([&] {
    require(dataset, "dataset");
    put(text_out, serialize_manifest(dataset->dataset));
  });
}

me_status me_dataset_info(const me_dataset* dataset, char** json_out) {
  return guarded([&] {
    require(dataset, "dataset");
    const auto& d = dataset->dataset;
    Json j{{"engine_version", kEngineVersion},
           {"seed", d.config.seed},
           {"config", d.config.to_json()},
           {"config_hash", config_hash(Json{{"config", d.config.to_json()}, {"parser", d.parser_info}})},
           {"counters", d.counters.to_json(d.roles())},
           {"instructions", d.instruction_count()},
           {"samples", d.samples.size()}};
    put(json_out, j.dump());
  });
}

size_t me_dataset_size(const me_dataset* dataset) { return dataset ? dataset->dataset.samples.size() : 0; }
void me_dataset_free(me_dataset* dataset) { delete dataset; }

me_status me_preset_gamma(const char* preset, uint64_t* gamma_out) {
  return guarded([&] {
    require(preset, "preset");
    require(gamma_out, "gamma_out");
    *gamma_out = SamplerConfig::from_preset(preset).gamma();
  });
}

me_status me_size_law(uint64_t instructions, uint64_t gamma, uint64_t* size_out) {
  return guarded([&] {
    require(size_out, "size_out");
    *size_out = dataset_size(instructions, gamma);
  });
}

/* split and stats */

me_status me_split(const me_dataset* dataset, const char* options_json, const char* out_dir, char** summary_json) {
  return guarded([&] {
    require(dataset, "dataset");
    require(out_dir, "out_dir");
    const Json opt = options_of(options_json, {"ratios", "unit", "seed"});
    SplitSpec spec;
    if (opt.contains("ratios")) spec.ratios = SplitSpec::parse_ratios(opt["ratios"].get<std::string>());
    const std::string unit = opt.value("unit", "instruction");
    if (unit == "instruction") spec.unit = SplitUnit::kInstruction;
    else if (unit == "sample") spec.unit = SplitUnit::kSample;
    else fail(ErrorCode::kUsage, "unit must be instruction or sample");
    spec.seed = opt.value("seed", std::uint64_t{0});
    const auto result = split(dataset->dataset, spec);
    std::filesystem::create_directories(out_dir);
    write_split_files(result, spec, dataset->dataset, out_dir);
    Json parts = Json::object();
    for (std::size_t k = 0; k < 3; ++k) {
      parts[std::string(kSplitNames[k])] = {{"samples", result.sample_ids[k].size()},
                                            {"instructions", result.instructions[k]}};
    }
    put(summary_json, Json{{"spec", spec.to_json()}, {"parts", parts}}.dump());
  });
}

me_status me_stats(const me_dataset* dataset, const me_corpus* corpus, int as_table, char** out) {
  return guarded([&] {
    require(dataset, "dataset");
    const auto rep = corpus ? stats(dataset->dataset, corpus->store.records) : stats(dataset->dataset);
    put(out, as_table ? rep.to_table() : rep.to_json().dump());
  });
}

/* evaluation */

me_status me_predictions_load(const char* path, me_predictions** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new me_predictions{load_predictions(path), Json::object()};
  });
}

me_status me_predictions_save(const me_predictions* predictions, const char* path) {
  return guarded([&] {
    require(predictions, "predictions");
    require(path, "path");
    write_file_atomic(path, serialize_predictions(predictions->records, predictions->header));
  });
}

size_t me_predictions_size(const me_predictions* predictions) {
  return predictions ? predictions->records.size() : 0;
}
void me_predictions_free(me_predictions* predictions) { delete predictions; }

me_status me_baseline(const me_dataset* target, const me_dataset* train, const char* kind, uint64_t seed,
                      me_predictions** out) {
  return guarded([&] {
    require(target, "target");
    require(kind, "kind");
    require(out, "out");
    *out = nullptr;
    const auto k = parse_baseline_kind(kind);
    auto preds = baseline(k, target->dataset, train ? &train->dataset : nullptr, seed);
    const auto& d = target->dataset;
    Json header{{"baseline", baseline_kind_name(k)},
                {"seed", seed},
                {"rng", kRngAlgorithm},
                {"manifest_config_hash", config_hash(Json{{"config", d.config.to_json()}, {"parser", d.parser_info}})}};
    *out = new me_predictions{std::move(preds), std::move(header)};
  });
}

me_status me_evaluate(const me_dataset* dataset, const me_predictions* predictions, const char* options_json,
                      char** report_json, char** report_table) {
  return guarded([&] {
    require(dataset, "dataset");
    require(predictions, "predictions");
    const Json opt = options_of(options_json, {"threshold", "allow_partial", "predicted_positive_only", "tasks",
                                               "split_file"});
    EvalOptions o;
    o.threshold = opt.value("threshold", o.threshold);
    o.allow_partial = opt.value("allow_partial", o.allow_partial);
    o.predicted_positive_only = opt.value("predicted_positive_only", o.predicted_positive_only);
    o.tasks = parse_tasks(opt.value("tasks", std::string("all")));
    if (opt.contains("split_file")) {
      const auto ids = read_split_file(opt["split_file"].get<std::string>());
      o.only_ids = std::set<std::string>(ids.begin(), ids.end());
    }
    const auto rep = evaluate(dataset->dataset, predictions->records, o);
    Json j = rep.to_json();
    j["options"] = o.to_json();
    put(report_json, j.dump());
    put(report_table, rep.to_table());
  });
}

/* self test */

me_status me_selftest(const char* options_json, char** summary_json, char** summary_text) {
  bool ok = false;
  const me_status st = guarded([&] {
    const Json opt = options_of(options_json, {"seed", "random_corpora", "groups", "threads"});
    SelftestOptions o;
    o.seed = opt.value("seed", o.seed);
    o.random_corpora = opt.value("random_corpora", o.random_corpora);
    o.groups = opt.value("groups", o.groups);
    o.threads = resolve_threads(opt.value("threads", o.threads));
    const auto rep = run_selftest(o);
    put(summary_json, rep.to_json().dump());
    put(summary_text, rep.summary());
    ok = rep.ok();
  });
  if (st != ME_OK) return st;
  if (!ok) {
    t_error = "oracle mismatches";
    return ME_E_INVARIANT;
  }
  return ME_OK;
}

}  // extern "C"
