/*
 * nlx: fuzzy search over noisy OCR output.
 *
 * C interface to the search engine. Objects are opaque handles created by
 * nlx_*_create / _build / _load / _train functions and released with the
 * matching nlx_*_free. Every fallible call returns an nlx_status; on failure
 * nlx_last_error() describes the problem. Strings returned through char**
 * out-parameters are owned by the caller and released with nlx_string_free.
 *
 * Handles are immutable after creation and may be shared between threads.
 */
#ifndef NLX_NLX_H_
#define NLX_NLX_H_

#include <stddef.h>
#include <stdint.h>

#if defined(NLX_BUILDING_LIBRARY)
#define NLX_API __attribute__((visibility("default")))
#else
#define NLX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nlx_status {
  NLX_OK = 0,
  NLX_ERR_INVALID_ARGUMENT = 1,
  NLX_ERR_PARSE = 2,
  NLX_ERR_ENCODING = 3,
  NLX_ERR_IO = 4,
  NLX_ERR_NUMERIC = 5,
  NLX_ERR_CHECKSUM = 6,
  NLX_ERR_TRUNCATED = 7,
  NLX_ERR_VERSION = 8,
  NLX_ERR_INTERNAL = 9
} nlx_status;

typedef enum nlx_metric {
  NLX_METRIC_COSINE = 0,
  NLX_METRIC_CSLS = 1,
  NLX_METRIC_EDIT = 2
} nlx_metric;

typedef struct nlx_phoc_config nlx_phoc_config;
typedef struct nlx_model nlx_model;
typedef struct nlx_index nlx_index;
typedef struct nlx_results nlx_results;
typedef struct nlx_eval_report nlx_eval_report;

typedef struct nlx_occurrence {
  const char* page_id; /* valid while the results handle lives */
  uint64_t word_id;
  int32_t x0, y0, x1, y1;
  int has_confidence;
  double confidence;
} nlx_occurrence;

typedef struct nlx_eval_options {
  const char* methods; /* comma separated: edit,cca+csls,csls,cca+cosine,cosine,wedit or all */
  size_t folds;
  uint64_t seed;
  double lambda;
  size_t projection_dim; /* 0: min(d, pairs - 1) */
  size_t k;
  int occurrence_relevance;
} nlx_eval_options;

/* Library */
NLX_API const char* nlx_version(void);
NLX_API const char* nlx_status_string(nlx_status status);
/* Message for the last failed call on this thread; "" when none. */
NLX_API const char* nlx_last_error(void);
/* Worker threads for internal parallel loops; 0 = all cores. Results never depend on it. */
NLX_API void nlx_set_threads(unsigned threads);
NLX_API void nlx_string_free(char* s);

/* PHOC configuration */
NLX_API nlx_status nlx_phoc_config_standard(nlx_phoc_config** out);
NLX_API nlx_status nlx_phoc_config_create(const char* charset_utf8, const int* levels, size_t level_count,
                                          int case_sensitive, nlx_phoc_config** out);
NLX_API nlx_status nlx_phoc_config_from_text(const char* text, nlx_phoc_config** out);
NLX_API nlx_status nlx_phoc_config_to_text(const nlx_phoc_config* config, char** out);
NLX_API size_t nlx_phoc_config_dimension(const nlx_phoc_config* config);
NLX_API void nlx_phoc_config_free(nlx_phoc_config* config);
/* Writes (dimension + 7) / 8 packed bytes, bit i in byte i/8 at position i%8. */
NLX_API nlx_status nlx_phoc_encode(const nlx_phoc_config* config, const char* word, uint8_t* out,
                                   size_t out_len);

NLX_API nlx_status nlx_levenshtein(const char* a, const char* b, size_t* out);

/* Models. config may be NULL for the standard configuration. A nonzero projection_dim is
 * clamped to min(d, pairs - 1); 0 selects that maximum. Alignment records that
 * reference no token, or disagree with the token text, fail with NLX_ERR_PARSE. */
NLX_API nlx_status nlx_model_train(const char* tokens_path, const char* alignments_path,
                                   const nlx_phoc_config* config, double lambda, size_t projection_dim,
                                   nlx_model** out);
NLX_API nlx_status nlx_model_save(const nlx_model* model, const char* path);
NLX_API nlx_status nlx_model_load(const char* path, nlx_model** out);
NLX_API size_t nlx_model_dimension(const nlx_model* model);
NLX_API size_t nlx_model_projection_dim(const nlx_model* model);
/* Copies up to capacity canonical correlations; returns the total count. */
NLX_API size_t nlx_model_correlations(const nlx_model* model, double* out, size_t capacity);
/* Human-readable summary: pair count, lambda, p, leading correlations, warnings. */
NLX_API nlx_status nlx_model_summary(const nlx_model* model, char** out);
NLX_API void nlx_model_free(nlx_model* model);

/* Indexes. With a model, the model's PHOC configuration is used and config must be NULL
 * or equal to it; without one the identity projection is used. When the token file has
 * malformed lines the call fails with NLX_ERR_PARSE and, if error_report_path is not NULL,
 * writes one line per problem there. */
NLX_API nlx_status nlx_index_build(const char* tokens_path, const nlx_phoc_config* config,
                                   const nlx_model* model, size_t k, const char* error_report_path,
                                   nlx_index** out);
NLX_API nlx_status nlx_index_save(const nlx_index* index, const char* path);
NLX_API nlx_status nlx_index_load(const char* path, nlx_index** out);
NLX_API size_t nlx_index_size(const nlx_index* index);
NLX_API const char* nlx_index_token(const nlx_index* index, size_t i);
NLX_API void nlx_index_free(nlx_index* index);

/* Queries. Cosine and CSLS rank by descending similarity; edit ranks by ascending
 * Levenshtein distance. top_n == 0 returns everything. */
NLX_API nlx_status nlx_metric_from_name(const char* name, nlx_metric* out);
NLX_API nlx_status nlx_index_query(const nlx_index* index, const char* query, nlx_metric metric,
                                   size_t top_n, nlx_results** out);
NLX_API size_t nlx_results_count(const nlx_results* results);
NLX_API const char* nlx_results_token(const nlx_results* results, size_t i);
NLX_API double nlx_results_score(const nlx_results* results, size_t i);
NLX_API size_t nlx_results_occurrence_count(const nlx_results* results, size_t i);
NLX_API nlx_status nlx_results_occurrence(const nlx_results* results, size_t i, size_t j,
                                          nlx_occurrence* out);
/* One JSON object per result line: rank, token, score, metric, occurrences. */
NLX_API nlx_status nlx_results_to_jsonl(const nlx_results* results, char** out);
NLX_API void nlx_results_free(nlx_results* results);

/* Synthetic corpora. lexicon_path may be NULL for the built-in lexicon. Noise profiles:
 * none, light, default, heavy. */
NLX_API nlx_status nlx_generate_corpus(const char* lexicon_path, size_t pages, size_t words_per_page,
                                       const char* noise_profile, uint64_t seed, const char* tokens_path,
                                       const char* alignments_path);

/* Evaluation */
NLX_API void nlx_eval_options_init(nlx_eval_options* options);
NLX_API nlx_status nlx_eval_run(const char* tokens_path, const char* alignments_path,
                                const nlx_phoc_config* config, const nlx_eval_options* options,
                                nlx_eval_report** out);
NLX_API size_t nlx_eval_report_method_count(const nlx_eval_report* report);
NLX_API nlx_status nlx_eval_report_method(const nlx_eval_report* report, size_t i, const char** name,
                                          double* mean_map, double* sd_map);
NLX_API nlx_status nlx_eval_report_table(const nlx_eval_report* report, char** out);
NLX_API nlx_status nlx_eval_report_records(const nlx_eval_report* report, char** out);
NLX_API nlx_status nlx_eval_report_timing(const nlx_eval_report* report, char** out);
NLX_API nlx_status nlx_eval_report_plot_data(const nlx_eval_report* report, char** out);
NLX_API void nlx_eval_report_free(nlx_eval_report* report);

#ifdef __cplusplus
}
#endif

#endif /* NLX_NLX_H_ */
