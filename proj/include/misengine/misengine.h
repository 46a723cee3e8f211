#ifndef MISENGINE_MISENGINE_H
#define MISENGINE_MISENGINE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MISENGINE_BUILDING)
#    define ME_API __declspec(dllexport)
#  else
#    define ME_API __declspec(dllimport)
#  endif
#else
#  define ME_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Values are stable. */
typedef enum me_status {
  ME_OK = 0,
  ME_E_USAGE = 1,
  ME_E_IO = 2,
  ME_E_MISSING_COLUMN = 3,
  ME_E_MALFORMED_ROW = 4,
  ME_E_DUPLICATE_RECORD_ID = 5,
  ME_E_SCHEMA_MISMATCH = 6,
  ME_E_BOX_OUT_OF_BOUNDS = 7,
  ME_E_VERSION_MISMATCH = 8,
  ME_E_SPAN_OUT_OF_RANGE = 9,
  ME_E_UNKNOWN_ROLE_LABEL = 10,
  ME_E_MISSING_TAXONOMY = 11,
  ME_E_INSUFFICIENT_CANDIDATES = 12,
  ME_E_EMPTY_INPUT = 13,
  ME_E_MISSING_PREDICTION = 14,
  ME_E_UNKNOWN_SAMPLE_ID = 15,
  ME_E_MALFORMED_PREDICTION = 16,
  ME_E_RATIO_INFEASIBLE = 17,
  ME_E_INVALID_ARGUMENT = 18,
  ME_E_INVARIANT = 19
} me_status;

/* Opaque handles. Each is released with its *_free function (NULL is a
 * no-op). Handles are not shared across threads while being modified; read
 * only use from several threads is fine. */
typedef struct me_corpus me_corpus;           /* ingested action records */
typedef struct me_groups me_groups;           /* parsed, merged semantic groups */
typedef struct me_dataset me_dataset;         /* generated mistake samples */
typedef struct me_predictions me_predictions; /* model or baseline outputs */

ME_API const char* me_version(void);
ME_API const char* me_status_name(me_status status);
/* Process exit code for a status: 0 ok, 1 usage, 3 internal invariant,
 * 2 for every input or schema error. */
ME_API int me_status_exit_code(me_status status);

/* Message of the last failed call on this thread ("" if none) and its
 * 1-based input line (0 if not line specific). */
ME_API const char* me_last_error(void);
ME_API size_t me_last_error_line(void);

/* Strings returned through char** out parameters are owned by the caller. */
ME_API void me_string_free(char* text);

/* ---- corpus ---------------------------------------------------------- */

/* options JSON:
 *   {"tables": [{"path": "...", "mapping": "id=col,...", "delimiter": ","}],
 *    "structured": ["clips.json", ...]}
 * At least one input is required. */
ME_API me_status me_corpus_ingest(const char* options_json, me_corpus** out);
/* Synthetic corpus. {"kind": "grid", "verbs", "nouns", "records_per_group",
 * "noise_groups", "seed"} or {"kind": "random", "groups",
 * "max_records_per_group", "seed"}. */
ME_API me_status me_corpus_synthesize(const char* options_json, me_corpus** out);
ME_API me_status me_corpus_load(const char* path, me_corpus** out);
ME_API me_status me_corpus_save(const me_corpus* corpus, const char* path);
/* {"records", "rows_in", "dropped", "warnings", "provenance"} */
ME_API me_status me_corpus_info(const me_corpus* corpus, char** json_out);
ME_API size_t me_corpus_size(const me_corpus* corpus);
ME_API void me_corpus_free(me_corpus* corpus);

/* ---- semantic groups ------------------------------------------------- */

/* options JSON: {"roles": "Predicate,Object", "lexicon": path?,
 *   "srl": path?, "srl_labels": "V=Predicate,..."?, "threads": n} */
ME_API me_status me_groups_build(const me_corpus* corpus, const char* options_json, me_groups** out);
ME_API me_status me_groups_load(const char* path, me_groups** out);
ME_API me_status me_groups_save(const me_groups* groups, const char* path);
/* Grouping counters and parser description. */
ME_API me_status me_groups_info(const me_groups* groups, char** json_out);
ME_API size_t me_groups_count(const me_groups* groups);
ME_API void me_groups_free(me_groups* groups);

/* Per-role key -> posting count for a comparator ({"comparator":
 * "character" | "taxonomy"}). */
ME_API me_status me_index_histogram(const me_groups* groups, const char* options_json, char** json_out);

/* ---- generation ------------------------------------------------------ */

/* config JSON: {"preset": name?, "seed": n?, "comparator": mode?,
 *   "counts": [[descriptions, videos], ...]?, "roles"?}. Keys left out come
 * from the preset (or a 1x1 uniform config without one). Unknown keys are
 * rejected. The effective config is written into the manifest header. */
ME_API me_status me_dataset_generate(const me_corpus* corpus, const me_groups* groups, const char* config_json,
                                     unsigned threads, me_dataset** out);
ME_API me_status me_dataset_load(const char* path, me_dataset** out);
ME_API me_status me_dataset_save(const me_dataset* dataset, const char* path);
ME_API me_status me_dataset_serialize(const me_dataset* dataset, char** text_out);
/* Header fields: config, counters, seed, config hash. */
ME_API me_status me_dataset_info(const me_dataset* dataset, char** json_out);
ME_API size_t me_dataset_size(const me_dataset* dataset);
ME_API void me_dataset_free(me_dataset* dataset);

/* Gamma of a preset, and the size law with overflow check. */
ME_API me_status me_preset_gamma(const char* preset, uint64_t* gamma_out);
ME_API me_status me_size_law(uint64_t instructions, uint64_t gamma, uint64_t* size_out);

/* ---- split and stats ------------------------------------------------- */

/* options JSON: {"ratios": "8:1:1", "unit": "instruction" | "sample",
 * "seed": n}. Writes train.txt, val.txt, test.txt under out_dir and returns
 * a summary. */
ME_API me_status me_split(const me_dataset* dataset, const char* options_json, const char* out_dir,
                          char** summary_json);
/* corpus may be NULL. as_table != 0 returns the aligned text table. */
ME_API me_status me_stats(const me_dataset* dataset, const me_corpus* corpus, int as_table, char** out);

/* ---- evaluation ------------------------------------------------------ */

ME_API me_status me_predictions_load(const char* path, me_predictions** out);
ME_API me_status me_predictions_save(const me_predictions* predictions, const char* path);
ME_API size_t me_predictions_size(const me_predictions* predictions);
ME_API void me_predictions_free(me_predictions* predictions);

/* kind: random | prior | center_pnr | full_frame_box. train is required for
 * prior and ignored otherwise. */
ME_API me_status me_baseline(const me_dataset* target, const me_dataset* train, const char* kind, uint64_t seed,
                             me_predictions** out);

/* options JSON: {"threshold": 0.5, "allow_partial": false,
 *   "predicted_positive_only": false, "tasks": "all", "split_file": path?}
 * Either output pointer may be NULL. */
ME_API me_status me_evaluate(const me_dataset* dataset, const me_predictions* predictions, const char* options_json,
                             char** report_json, char** report_table);

/* ---- self test ------------------------------------------------------- */

/* options JSON: {"seed", "random_corpora", "groups", "threads"}. Returns
 * ME_OK when every oracle matches, ME_E_INVARIANT otherwise; outputs are
 * filled either way. */
ME_API me_status me_selftest(const char* options_json, char** summary_json, char** summary_text);

#ifdef __cplusplus
}
#endif

#endif /* MISENGINE_MISENGINE_H */
