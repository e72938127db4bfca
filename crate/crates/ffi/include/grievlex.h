#ifndef GRIEVLEX_H
#define GRIEVLEX_H

/* Generated by cbindgen. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum GlxStatus {
  GLX_STATUS_OK = 0,
  GLX_STATUS_NULL_POINTER = 1,
  GLX_STATUS_INVALID_UTF8 = 2,
  GLX_STATUS_IO = 3,
  GLX_STATUS_PARSE = 4,
  GLX_STATUS_VALIDATION = 5,
  GLX_STATUS_ARGUMENT = 6,
  GLX_STATUS_UNDEFINED_ALPHA = 7,
  GLX_STATUS_DEGENERATE = 8,
  GLX_STATUS_NUMERICAL = 9,
  GLX_STATUS_TRAINING = 10,
  GLX_STATUS_BUILD = 11,
  GLX_STATUS_PANIC = 12,
} GlxStatus;

typedef enum GlxScoreMode {
  GLX_SCORE_MODE_PROPORTIONAL = 0,
  GLX_SCORE_MODE_WEIGHTED = 1,
} GlxScoreMode;

/**
 * A validated lexicon.
 */
typedef struct GlxLexicon GlxLexicon;

/**
 * A compiled matcher over its own copy of a lexicon.
 */
typedef struct GlxScorer GlxScorer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *glx_last_error(void);

/**
 * Library version as a static string.
 */
const char *glx_version(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library.
 */
void glx_string_free(char *s);

/**
 * # Safety
 * `path` must be a nul-terminated string; `out` must be writable.
 */
enum GlxStatus glx_lexicon_load(const char *path, struct GlxLexicon **out);

/**
 * # Safety
 * `lex` must be NULL or a handle from this library, not yet freed.
 */
void glx_lexicon_free(struct GlxLexicon *lex);

/**
 * # Safety
 * `lex` must be a live handle; `path` a nul-terminated string.
 */
enum GlxStatus glx_lexicon_save(const struct GlxLexicon *lex, const char *path);

/**
 * Number of entries, or 0 for NULL.
 *
 * # Safety
 * `lex` must be NULL or a live handle.
 */
size_t glx_lexicon_len(const struct GlxLexicon *lex);

/**
 * Number of categories, or 0 for NULL.
 *
 * # Safety
 * `lex` must be NULL or a live handle.
 */
size_t glx_lexicon_category_count(const struct GlxLexicon *lex);

/**
 * Name of category `index`; free it with `glx_string_free`.
 *
 * # Safety
 * `lex` must be a live handle; `out` must be writable.
 */
enum GlxStatus glx_lexicon_category_name(const struct GlxLexicon *lex, size_t index, char **out);

/**
 * New lexicon holding the entries rated at or above `theta`.
 *
 * # Safety
 * `lex` must be a live handle; `out` must be writable.
 */
enum GlxStatus glx_lexicon_filter(const struct GlxLexicon *lex,
                                  double theta,
                                  bool prune_categories,
                                  struct GlxLexicon **out);

/**
 * Compiles a matcher over a copy of `lex`; the lexicon handle stays owned
 * by the caller.
 *
 * # Safety
 * `lex` must be a live handle; `out` must be writable.
 */
enum GlxStatus glx_scorer_new(const struct GlxLexicon *lex, struct GlxScorer **out);

/**
 * # Safety
 * `scorer` must be NULL or a handle from this library, not yet freed.
 */
void glx_scorer_free(struct GlxScorer *scorer);

/**
 * Scores one text. `scores` receives one value per category in lexicon
 * order and `len` must equal the category count. `token_count` may be NULL.
 *
 * # Safety
 * `scorer` must be a live handle, `text` nul-terminated, `scores` writable
 * for `len` doubles.
 */
enum GlxStatus glx_score_text(const struct GlxScorer *scorer,
                              const char *text,
                              enum GlxScoreMode mode,
                              double *scores,
                              size_t len,
                              size_t *token_count);

/**
 * Cronbach's alpha over a row-major `rows` x `cols` matrix.
 *
 * # Safety
 * `values` must be readable for `rows * cols` doubles; `alpha` writable.
 */
enum GlxStatus glx_cronbach_alpha(const double *values, size_t rows, size_t cols, double *alpha);

/**
 * Welch's t-test from summary statistics. Any output pointer may be NULL.
 *
 * # Safety
 * Non-NULL output pointers must be writable.
 */
enum GlxStatus glx_welch_t(size_t n_a,
                           double mean_a,
                           double sd_a,
                           size_t n_b,
                           double mean_b,
                           double sd_b,
                           double *t,
                           double *df,
                           double *p);

/**
 * Cohen's d with a 95% interval. Any output pointer may be NULL.
 *
 * # Safety
 * Non-NULL output pointers must be writable.
 */
enum GlxStatus glx_cohen_d(size_t n_a,
                           double mean_a,
                           double sd_a,
                           size_t n_b,
                           double mean_b,
                           double sd_b,
                           double *d,
                           double *ci_low,
                           double *ci_high);

/**
 * JZS Bayes factor for a t statistic. `n_b == 0` selects the one-sample
 * design with `n_a` observations. Either output pointer may be NULL.
 *
 * # Safety
 * Non-NULL output pointers must be writable.
 */
enum GlxStatus glx_jzs_bf(double t,
                          size_t n_a,
                          size_t n_b,
                          double scale,
                          double *bf10,
                          double *ln_bf10);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRIEVLEX_H */
