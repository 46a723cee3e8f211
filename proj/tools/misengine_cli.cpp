// Command-line front end. Talks to the engine only through the C API.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "misengine/misengine.h"

namespace {

using Json = nlohmann::json;

// Thrown on a failed C API call; carries the status for the exit code.
struct ApiFailure {
  me_status status;
};

void check(me_status st, const char* what) {
  if (st == ME_OK) return;
  const std::string name = me_status_name(st);
  const std::string msg = me_last_error();
  // Library messages usually lead with the status name already.
  if (msg.rfind(name, 0) == 0) {
    std::fprintf(stderr, "misengine: %s failed: %s\n", what, msg.c_str());
  } else {
    std::fprintf(stderr, "misengine: %s failed: %s: %s\n", what, name.c_str(), msg.c_str());
  }
  throw ApiFailure{st};
}

struct StringDeleter {
  void operator()(char* p) const { me_string_free(p); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

template <typename T, void (*Free)(T*)>
struct HandleDeleter {
  void operator()(T* p) const { Free(p); }
};
using Corpus = std::unique_ptr<me_corpus, HandleDeleter<me_corpus, me_corpus_free>>;
using Groups = std::unique_ptr<me_groups, HandleDeleter<me_groups, me_groups_free>>;
using Dataset = std::unique_ptr<me_dataset, HandleDeleter<me_dataset, me_dataset_free>>;
using Predictions = std::unique_ptr<me_predictions, HandleDeleter<me_predictions, me_predictions_free>>;

std::string take(char* p) {
  OwnedString owned(p);
  return p ? std::string(p) : std::string();
}

void log_line(const std::string& stage, const Json& counters) {
  std::string line = stage + ":";
  for (auto it = counters.begin(); it != counters.end(); ++it) {
    if (it.value().is_primitive()) line += " " + it.key() + "=" + it.value().dump();
  }
  std::fprintf(stderr, "%s\n", line.c_str());
}

// ---- shared option blocks ---------------------------------------------

struct InputOptions {
  std::vector<std::string> tables;
  std::vector<std::string> mappings;
  std::string delimiter = ",";
  std::vector<std::string> structured;
  std::string synthetic;

  void attach(CLI::App* cmd) {
    cmd->add_option("--table", tables, "Delimited annotation table (repeatable)");
    cmd->add_option("--mapping", mappings,
                    "Column mapping per table, field=column,... (one for all tables or one per table)");
    cmd->add_option("--delimiter", delimiter, "Table delimiter")->capture_default_str();
    cmd->add_option("--structured", structured, "Structured clip export, JSON (repeatable)");
    cmd->add_option("--synthetic", synthetic, "Synthetic corpus spec as JSON instead of files");
  }

  bool given() const { return !tables.empty() || !structured.empty() || !synthetic.empty(); }

  Corpus load() const {
    me_corpus* c = nullptr;
    if (!synthetic.empty()) {
      if (!tables.empty() || !structured.empty()) throw CLI::ValidationError("--synthetic excludes file inputs");
      check(me_corpus_synthesize(synthetic.c_str(), &c), "synthesize");
      return Corpus(c);
    }
    if (!tables.empty() && mappings.size() != 1 && mappings.size() != tables.size()) {
      throw CLI::ValidationError("give one --mapping, or one per --table");
    }
    Json opt{{"tables", Json::array()}, {"structured", structured}};
    for (std::size_t i = 0; i < tables.size(); ++i) {
      opt["tables"].push_back(
          {{"path", tables[i]}, {"mapping", mappings[mappings.size() == 1 ? 0 : i]}, {"delimiter", delimiter}});
    }
    check(me_corpus_ingest(opt.dump().c_str(), &c), "ingest");
    return Corpus(c);
  }
};

struct ParseOptions {
  std::string roles = "Predicate,Object";
  std::string lexicon;
  std::string srl;
  std::string srl_labels;

  void attach(CLI::App* cmd) {
    cmd->add_option("--roles", roles, "Comma separated role set")->capture_default_str();
    cmd->add_option("--lexicon", lexicon, "Verb lexicon file replacing the built-in one");
    cmd->add_option("--srl", srl, "Precomputed SRL output to use instead of the built-in parser");
    cmd->add_option("--srl-labels", srl_labels, "SRL label map, LABEL=Role,...");
  }

  Groups build(const me_corpus* corpus, unsigned threads) const {
    Json opt{{"roles", roles}, {"threads", threads}};
    if (!lexicon.empty()) opt["lexicon"] = lexicon;
    if (!srl.empty()) opt["srl"] = srl;
    if (!srl_labels.empty()) opt["srl_labels"] = srl_labels;
    me_groups* g = nullptr;
    check(me_groups_build(corpus, opt.dump().c_str(), &g), "parse");
    return Groups(g);
  }
};

Json parse_counts(const std::string& text) {
  // "1x4,2x2,2x2,2x2" in category-mask order
  Json out = Json::array();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto x = item.find('x');
    if (x == std::string::npos) throw CLI::ValidationError("--counts", "entries look like 2x3");
    try {
      out.push_back({std::stoul(item.substr(0, x)), std::stoul(item.substr(x + 1))});
    } catch (const std::exception&) {
      throw CLI::ValidationError("--counts", "bad entry '" + item + "'");
    }
  }
  return out;
}

Corpus load_corpus(const std::string& path) {
  me_corpus* c = nullptr;
  check(me_corpus_load(path.c_str(), &c), "load store");
  return Corpus(c);
}

Dataset load_dataset(const std::string& path) {
  me_dataset* d = nullptr;
  check(me_dataset_load(path.c_str(), &d), "load manifest");
  return Dataset(d);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mistake-attribution dataset engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(me_version()));
  app.set_config("--config", "", "INI config file; [section] per subcommand, flags override it");
  app.allow_config_extras(false);

  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::string out;

  // ingest
  InputOptions ingest_in;
  auto* ingest = app.add_subcommand("ingest", "Normalise annotation tables and clip exports into a record store");
  ingest_in.attach(ingest);
  ingest->add_option("-o,--out", out, "Record store to write")->required();

  // parse
  std::string store_path;
  ParseOptions parse_opt;
  auto* parse = app.add_subcommand("parse", "Parse descriptions into semantic groups");
  parse->add_option("--store", store_path, "Record store")->required()->check(CLI::ExistingFile);
  parse_opt.attach(parse);
  parse->add_option("--threads", threads, "Worker threads")->capture_default_str();
  parse->add_option("-o,--out", out, "Groups file to write")->required();

  // index
  std::string groups_path;
  std::string comparator = "character";
  auto* index = app.add_subcommand("index", "Build the role index and print per-role key histograms");
  index->add_option("--groups", groups_path, "Groups file")->required()->check(CLI::ExistingFile);
  index->add_option("--comparator", comparator, "character or taxonomy")->capture_default_str();
  index->add_option("-o,--out", out, "Write the histogram here instead of stdout");

  // generate
  InputOptions gen_in;
  ParseOptions gen_parse;
  std::string preset;
  std::optional<std::string> gen_comparator;
  std::string counts;
  auto* generate = app.add_subcommand("generate", "Sample the mistake dataset");
  generate->add_option("--store", store_path, "Record store (with --groups)");
  generate->add_option("--groups", groups_path, "Groups file (with --store)");
  gen_in.attach(generate);
  gen_parse.attach(generate);
  generate->add_option("--preset", preset, "Sampling preset: ego4d-paper or epic-paper");
  generate->add_option("--comparator", gen_comparator, "Override the comparator: character or taxonomy");
  generate->add_option("--counts", counts, "Per-category DxV in category order, e.g. 1x4,2x2,2x2,2x2");
  generate->add_option("--seed", seed, "Sampling seed")->capture_default_str();
  generate->add_option("--threads", threads, "Worker threads")->capture_default_str();
  generate->add_option("-o,--out", out, "Manifest to write")->required();

  // split
  std::string manifest_path;
  std::string ratios = "8:1:1";
  std::string unit = "instruction";
  std::string out_dir;
  auto* split = app.add_subcommand("split", "Partition a manifest into train/val/test");
  split->add_option("--manifest", manifest_path, "Manifest")->required()->check(CLI::ExistingFile);
  split->add_option("--ratios", ratios, "train:val:test")->capture_default_str();
  split->add_option("--unit", unit, "instruction or sample")->capture_default_str();
  split->add_option("--seed", seed, "Shuffle seed")->capture_default_str();
  split->add_option("--out-dir", out_dir, "Directory for train.txt, val.txt, test.txt")->required();

  // stats
  bool as_json = false;
  auto* stats = app.add_subcommand("stats", "Dataset statistics");
  stats->add_option("--manifest", manifest_path, "Manifest")->required()->check(CLI::ExistingFile);
  stats->add_option("--store", store_path, "Record store, for participant and environment counts");
  stats->add_flag("--json", as_json, "Print JSON instead of a table");

  // evaluate
  std::string predictions_path;
  double threshold = 0.5;
  bool allow_partial = false;
  bool predicted_positive_only = false;
  std::string tasks = "all";
  std::string split_file;
  std::string report_path;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against a manifest");
  evaluate->add_option("--manifest", manifest_path, "Gold manifest")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--predictions", predictions_path, "Prediction file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--threshold", threshold, "Decision threshold (inclusive)")->capture_default_str();
  evaluate->add_flag("--allow-partial", allow_partial, "Skip in-scope samples without predictions");
  evaluate->add_flag("--predicted-positive-only", predicted_positive_only,
                     "Temporal and spatial scores only on samples flagged as mistakes");
  evaluate->add_option("--tasks", tasks, "semantic,temporal,spatial,detection or all")->capture_default_str();
  evaluate->add_option("--split-file", split_file, "Restrict to the ids listed in a split file");
  evaluate->add_option("--report", report_path, "Write the JSON report here");

  // baseline
  std::string kind;
  std::string train_path;
  auto* baseline = app.add_subcommand("baseline", "Write baseline predictions for a manifest");
  baseline->add_option("--manifest", manifest_path, "Target manifest")->required()->check(CLI::ExistingFile);
  baseline->add_option("--kind", kind, "random, prior, center_pnr or full_frame_box")->required();
  baseline->add_option("--train", train_path, "Train manifest (prior)");
  baseline->add_option("--seed", seed, "Seed (random)")->capture_default_str();
  baseline->add_option("-o,--out", out, "Prediction file to write")->required();

  // selftest
  std::uint32_t corpora = 4;
  std::uint32_t groups = 120;
  auto* selftest = app.add_subcommand("selftest", "Run the brute-force oracle suite on bundled toy corpora");
  selftest->add_option("--seed", seed, "Seed for the random corpora");
  selftest->add_option("--corpora", corpora, "Random corpora to check")->capture_default_str();
  selftest->add_option("--groups", groups, "Groups per random corpus")->capture_default_str();
  selftest->add_option("--threads", threads, "Worker threads")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*ingest) {
      if (!ingest_in.given()) throw CLI::ValidationError("ingest needs --table, --structured or --synthetic");
      auto corpus = ingest_in.load();
      check(me_corpus_save(corpus.get(), out.c_str()), "save store");
      char* info = nullptr;
      check(me_corpus_info(corpus.get(), &info), "info");
      log_line("ingest", Json::parse(take(info))["provenance"]);
    } else if (*parse) {
      auto corpus = load_corpus(store_path);
      auto g = parse_opt.build(corpus.get(), threads);
      check(me_groups_save(g.get(), out.c_str()), "save groups");
      char* info = nullptr;
      check(me_groups_info(g.get(), &info), "info");
      log_line("parse", Json::parse(take(info))["counters"]);
    } else if (*index) {
      me_groups* raw = nullptr;
      check(me_groups_load(groups_path.c_str(), &raw), "load groups");
      Groups g(raw);
      char* hist = nullptr;
      check(me_index_histogram(g.get(), Json{{"comparator", comparator}}.dump().c_str(), &hist), "index");
      const std::string text = Json::parse(take(hist)).dump(2) + "\n";
      if (out.empty()) {
        std::fputs(text.c_str(), stdout);
      } else {
        std::FILE* f = std::fopen(out.c_str(), "wb");
        if (!f || std::fwrite(text.data(), 1, text.size(), f) != text.size()) {
          std::fprintf(stderr, "misengine: cannot write %s\n", out.c_str());
          if (f) std::fclose(f);
          return 2;
        }
        std::fclose(f);
      }
    } else if (*generate) {
      const bool from_files = !store_path.empty() || !groups_path.empty();
      if (from_files == gen_in.given()) {
        throw CLI::ValidationError("generate takes either --store and --groups, or raw inputs");
      }
      Corpus corpus;
      Groups g;
      if (from_files) {
        if (store_path.empty() || groups_path.empty()) throw CLI::ValidationError("--store and --groups go together");
        corpus = load_corpus(store_path);
        me_groups* raw = nullptr;
        check(me_groups_load(groups_path.c_str(), &raw), "load groups");
        g.reset(raw);
      } else {
        corpus = gen_in.load();
        g = gen_parse.build(corpus.get(), threads);
      }
      Json config{{"seed", seed}};
      if (!preset.empty()) config["preset"] = preset;
      if (gen_comparator) config["comparator"] = *gen_comparator;
      if (!counts.empty()) config["counts"] = parse_counts(counts);
      me_dataset* raw = nullptr;
      check(me_dataset_generate(corpus.get(), g.get(), config.dump().c_str(), threads, &raw), "generate");
      Dataset d(raw);
      check(me_dataset_save(d.get(), out.c_str()), "save manifest");
      char* info = nullptr;
      check(me_dataset_info(d.get(), &info), "info");
      const Json j = Json::parse(take(info));
      Json line = j["counters"];
      line["gamma"] = j["config"]["gamma"];
      line["config_hash"] = j["config_hash"];
      log_line("generate", line);
    } else if (*split) {
      auto d = load_dataset(manifest_path);
      const Json opt{{"ratios", ratios}, {"unit", unit}, {"seed", seed}};
      char* summary = nullptr;
      check(me_split(d.get(), opt.dump().c_str(), out_dir.c_str(), &summary), "split");
      const Json s = Json::parse(take(summary));
      Json line;
      for (const auto& [name, part] : s["parts"].items()) {
        line[name + "_samples"] = part["samples"];
        line[name + "_instructions"] = part["instructions"];
      }
      log_line("split", line);
    } else if (*stats) {
      auto d = load_dataset(manifest_path);
      Corpus corpus;
      if (!store_path.empty()) corpus = load_corpus(store_path);
      char* text = nullptr;
      check(me_stats(d.get(), corpus.get(), as_json ? 0 : 1, &text), "stats");
      std::string s = take(text);
      if (as_json) s = Json::parse(s).dump(2) + "\n";
      std::fputs(s.c_str(), stdout);
    } else if (*evaluate) {
      auto d = load_dataset(manifest_path);
      me_predictions* raw = nullptr;
      check(me_predictions_load(predictions_path.c_str(), &raw), "load predictions");
      Predictions p(raw);
      Json opt{{"threshold", threshold},
               {"allow_partial", allow_partial},
               {"predicted_positive_only", predicted_positive_only},
               {"tasks", tasks}};
      if (!split_file.empty()) opt["split_file"] = split_file;
      char* report = nullptr;
      char* table = nullptr;
      check(me_evaluate(d.get(), p.get(), opt.dump().c_str(), &report, &table), "evaluate");
      const std::string report_text = Json::parse(take(report)).dump(2) + "\n";
      std::fputs(take(table).c_str(), stdout);
      if (!report_path.empty()) {
        std::FILE* f = std::fopen(report_path.c_str(), "wb");
        if (!f || std::fwrite(report_text.data(), 1, report_text.size(), f) != report_text.size()) {
          std::fprintf(stderr, "misengine: cannot write %s\n", report_path.c_str());
          if (f) std::fclose(f);
          return 2;
        }
        std::fclose(f);
      }
    } else if (*baseline) {
      auto d = load_dataset(manifest_path);
      Dataset train;
      if (!train_path.empty()) train = load_dataset(train_path);
      me_predictions* raw = nullptr;
      check(me_baseline(d.get(), train.get(), kind.c_str(), seed, &raw), "baseline");
      Predictions p(raw);
      check(me_predictions_save(p.get(), out.c_str()), "save predictions");
      log_line("baseline", Json{{"kind", kind}, {"predictions", me_predictions_size(p.get())}});
    } else if (*selftest) {
      const Json opt{{"seed", seed}, {"random_corpora", corpora}, {"groups", groups}, {"threads", threads}};
      char* js = nullptr;
      char* text = nullptr;
      const me_status st = me_selftest(opt.dump().c_str(), &js, &text);
      me_string_free(js);
      std::fputs(take(text).c_str(), stdout);
      check(st, "selftest");
    }
  } catch (const ApiFailure& f) {
    return me_status_exit_code(f.status);
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "misengine: %s\n", e.what());
    return 1;
  }
  return 0;
}
