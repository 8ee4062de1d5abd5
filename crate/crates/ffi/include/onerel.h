#ifndef ONEREL_H
#define ONEREL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  ONEREL_REASON_GT_COLLAPSE = 0,
  ONEREL_REASON_EXPONENT_SUM = 1,
  ONEREL_REASON_MAIN_THEOREM = 2,
  ONEREL_REASON_QUOTIENT_CERTIFICATE = 3,
} OnerelReason;

typedef enum {
  ONEREL_STATUS_OK = 0,
  ONEREL_STATUS_NULL_POINTER = 1,
  ONEREL_STATUS_INVALID_UTF8 = 2,
  ONEREL_STATUS_INVALID_INPUT = 3,
  ONEREL_STATUS_CONTRACT_VIOLATION = 4,
  ONEREL_STATUS_PANIC = 5,
} OnerelStatus;

typedef enum {
  ONEREL_SURJECTIVITY_SURJECTIVE = 0,
  ONEREL_SURJECTIVITY_NOT_SURJECTIVE = 1,
  ONEREL_SURJECTIVITY_UNDETERMINED = 2,
} OnerelSurjectivity;

/**
 * A labelled sphere complex.
 */
typedef struct OnerelComplex OnerelComplex;

/**
 * A freely reduced word in `G * <t>` together with the rank of `G`.
 */
typedef struct OnerelWord OnerelWord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *onerel_last_error(void);

void onerel_clear_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void onerel_string_free(char *s);

/**
 * Parses a word such as `"aTbt"` over the free group of rank `rank`; a rank
 * of 0 picks the smallest rank covering the word.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
OnerelStatus onerel_word_parse(const char *text, size_t rank, OnerelWord **out);

/**
 * # Safety
 * `word` must be NULL or a live handle from this library.
 */
void onerel_word_free(OnerelWord *word);

/**
 * The reduced word as text, or NULL on failure.
 *
 * # Safety
 * `word` must be a live handle.
 */
char *onerel_word_to_string(const OnerelWord *word);

/**
 * # Safety
 * `word` must be a live handle.
 */
size_t onerel_word_length(const OnerelWord *word);

/**
 * # Safety
 * `word` must be a live handle and `out` a valid pointer.
 */
OnerelStatus onerel_word_exponent_sum(const OnerelWord *word, int64_t *out);

/**
 * A cyclically reduced conjugate of `word` as a new handle.
 *
 * # Safety
 * `word` must be a live handle and `out` a valid pointer.
 */
OnerelStatus onerel_word_cyclic_reduce(const OnerelWord *word, OnerelWord **out);

/**
 * The canonical representative of the conjugacy class of `word`.
 *
 * # Safety
 * `word` must be a live handle and `out` a valid pointer.
 */
OnerelStatus onerel_word_conjugacy_canonical(const OnerelWord *word, OnerelWord **out);

/**
 * Surjectivity of `G -> G * <t> / <<word>>`.
 *
 * # Safety
 * `word` must be a live handle; `status` and `reason` valid pointers.
 */
OnerelStatus onerel_analyze(const OnerelWord *word,
                            OnerelSurjectivity *status,
                            OnerelReason *reason);

/**
 * The full verdict with its evidence as JSON, or NULL on failure.
 *
 * # Safety
 * `word` must be a live handle.
 */
char *onerel_analyze_json(const OnerelWord *word);

/**
 * Block decomposition of an exponent-one word as JSON, or NULL on failure.
 *
 * # Safety
 * `word` must be a live handle.
 */
char *onerel_decompose_json(const OnerelWord *word);

/**
 * Parses and validates a complex in the JSON file format.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
OnerelStatus onerel_complex_from_json(const char *json, OnerelComplex **out);

/**
 * A seeded random sphere complex with roughly `size` vertices.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
OnerelStatus onerel_complex_generate(uint64_t seed, size_t size, OnerelComplex **out);

/**
 * # Safety
 * `complex` must be NULL or a live handle from this library.
 */
void onerel_complex_free(OnerelComplex *complex);

/**
 * # Safety
 * `complex` must be a live handle.
 */
char *onerel_complex_to_json(const OnerelComplex *complex);

/**
 * The word read around `face` starting at corner `start`.
 *
 * # Safety
 * `complex` must be a live handle, `face` a NUL-terminated string and `out`
 * a valid pointer.
 */
OnerelStatus onerel_complex_read_face(const OnerelComplex *complex,
                                      const char *face,
                                      size_t start,
                                      OnerelWord **out);

/**
 * Runs the default car flow for two common periods and reports whether at
 * least two complete crashes happen within one period.
 *
 * # Safety
 * `complex` must be a live handle; `at_least_two` and `complete` valid
 * pointers.
 */
OnerelStatus onerel_complex_verify_crashes(const OnerelComplex *complex,
                                           uint64_t seed,
                                           bool *at_least_two,
                                           size_t *complete);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ONEREL_H */
