#ifndef QCSP_H
#define QCSP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Decision procedure used by [`qcsp_solve`].
 */
typedef enum QcspMethod {
  /**
   * Game-tree search over the original prefix.
   */
  QCSP_METHOD_ORACLE = 0,
  /**
   * Conjunction of CSP instances, one per ω index set.
   */
  QCSP_METHOD_PGP_CSP = 1,
  /**
   * Single ∀*∃* sentence, then universal removal and CSP search.
   */
  QCSP_METHOD_PI2 = 2,
  /**
   * Single ∀*∃* sentence, then CSP over the power language.
   */
  QCSP_METHOD_POWER_CSP = 3,
} QcspMethod;

/**
 * Outcome of a call; anything but `Ok` leaves a message for [`qcsp_last_error`].
 */
typedef enum QcspStatus {
  QCSP_STATUS_OK = 0,
  QCSP_STATUS_NULL_POINTER = 1,
  QCSP_STATUS_INVALID_UTF8 = 2,
  QCSP_STATUS_PARSE = 3,
  QCSP_STATUS_INVALID_SENTENCE = 4,
  QCSP_STATUS_MODEL = 5,
  QCSP_STATUS_DOMAIN_MISMATCH = 6,
  QCSP_STATUS_INVALID_ARGUMENT = 7,
  QCSP_STATUS_MISSING_WITNESS = 8,
  QCSP_STATUS_BUDGET = 9,
  QCSP_STATUS_IO = 10,
  QCSP_STATUS_PANIC = 11,
} QcspStatus;

typedef struct QcspLanguage QcspLanguage;

typedef struct QcspSentence QcspSentence;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a success.
 *
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *qcsp_last_error(void);

/**
 * Nul-terminated version string with static lifetime.
 */
const char *qcsp_version(void);

/**
 * Parses a language in the text format.
 *
 * # Safety
 * `source` must be a nul-terminated string and `out` a writable location.
 */
enum QcspStatus qcsp_language_parse(const char *source, struct QcspLanguage **out);

/**
 * # Safety
 * `lang` must be null or a handle from [`qcsp_language_parse`] not yet freed.
 */
void qcsp_language_free(struct QcspLanguage *lang);

/**
 * Parses a sentence in the text format over `lang`. The sentence keeps its own reference to the language.
 *
 * # Safety
 * `lang` must be a live handle, `source` nul-terminated and `out` writable.
 */
enum QcspStatus qcsp_sentence_parse(const struct QcspLanguage *lang,
                                    const char *source,
                                    struct QcspSentence **out);

/**
 * # Safety
 * `sentence` must be null or a handle from [`qcsp_sentence_parse`] not yet freed.
 */
void qcsp_sentence_free(struct QcspSentence *sentence);

/**
 * Decides `sentence` with `method`, writing the truth value to `out_truth`.
 *
 * The reduction methods compute a switchability witness for bound `r`
 * (polymorphism arity up to 3, powers up to 4) unless `override_witness` is
 * set, in which case `out_conditional` reports that the answer is conditional.
 * `out_conditional` may be null.
 *
 * # Safety
 * `sentence` must be a live handle; `out_truth` writable; `out_conditional` null or writable.
 */
enum QcspStatus qcsp_solve(const struct QcspSentence *sentence,
                           enum QcspMethod method,
                           size_t r,
                           bool override_witness,
                           bool *out_truth,
                           bool *out_conditional);

/**
 * Switchability witness for `lang` as a JSON document with keys `r`, `powers` and `verdict`.
 *
 * # Safety
 * `lang` must be a live handle and `out` writable.
 */
enum QcspStatus qcsp_witness_json(const struct QcspLanguage *lang,
                                  size_t r,
                                  size_t max_arity,
                                  size_t max_power,
                                  char **out);

/**
 * Complexity classification of `lang` as a JSON document with `verdict` and `caveat`.
 *
 * # Safety
 * `lang` must be a live handle and `out` writable.
 */
enum QcspStatus qcsp_classify_json(const struct QcspLanguage *lang,
                                   size_t r,
                                   size_t wnu_arity,
                                   bool override_witness,
                                   char **out);

/**
 * Number of positions `i >= 1` with `values[i] != values[i - 1]`.
 *
 * # Safety
 * `values` must point to `len` readable elements (or be null with `len == 0`).
 */
size_t qcsp_switch_count(const uint32_t *values, size_t len);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void qcsp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCSP_H */
