#ifndef SYNTOMIC_H
#define SYNTOMIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SynStatus {
  SYN_STATUS_OK = 0,
  SYN_STATUS_NULL_POINTER = 1,
  SYN_STATUS_INVALID_UTF8 = 2,
  SYN_STATUS_PARSE = 3,
  SYN_STATUS_MISMATCH = 4,
  SYN_STATUS_ENGINE = 5,
  SYN_STATUS_PANIC = 6,
} SynStatus;

// A Steenrod algebra for one prime and base.
typedef struct SynAlgebra SynAlgebra;

// An element in admissible normal form.
typedef struct SynElement SynElement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Valid until the next call.
const char *syn_last_error(void);

// Static description of a status code.
const char *syn_status_name(enum SynStatus s);

// `base` is "k" or "O".
//
// # Safety
// `base` must be a NUL-terminated string and `out` writable.
enum SynStatus syn_algebra_new(uint32_t p, const char *base, struct SynAlgebra **out);

// # Safety
// `a` must come from `syn_algebra_new` and not be used afterwards. NULL is ignored.
void syn_algebra_free(struct SynAlgebra *a);

// Number of admissible monomials in bidegree (deg, wt).
//
// # Safety
// Pointers must be valid.
enum SynStatus syn_algebra_basis_count(const struct SynAlgebra *a,
                                       int64_t deg,
                                       int64_t wt,
                                       size_t *out);

// Reads "Sq2 Sq2 + tau Sq3 Sq1" style text or element JSON, reduced to normal form.
//
// # Safety
// Pointers must be valid; `src` NUL-terminated.
enum SynStatus syn_element_parse(const struct SynAlgebra *a,
                                 const char *src,
                                 struct SynElement **out);

// # Safety
// Pointers must be valid.
enum SynStatus syn_element_multiply(const struct SynAlgebra *a,
                                    const struct SynElement *x,
                                    const struct SynElement *y,
                                    struct SynElement **out);

// # Safety
// Pointers must be valid.
enum SynStatus syn_element_antipode(const struct SynAlgebra *a,
                                    const struct SynElement *x,
                                    struct SynElement **out);

// # Safety
// Pointers must be valid.
enum SynStatus syn_element_is_zero(const struct SynElement *x, bool *out);

// # Safety
// Pointers must be valid.
enum SynStatus syn_element_equal(const struct SynElement *x, const struct SynElement *y, bool *out);

// Text form; release with `syn_string_free`.
//
// # Safety
// Pointers must be valid.
enum SynStatus syn_element_to_text(const struct SynElement *x, char **out);

// JSON form; release with `syn_string_free`.
//
// # Safety
// Pointers must be valid.
enum SynStatus syn_element_to_json(const struct SynElement *x, char **out);

// # Safety
// `x` must come from this library and not be used afterwards. NULL is ignored.
void syn_element_free(struct SynElement *x);

// # Safety
// `s` must be a string returned by this library. NULL is ignored.
void syn_string_free(char *s);

// Checks Sq(v) = w on a model named like "P3" or "P1xP2".
//
// # Safety
// Pointers must be valid; `model` NUL-terminated.
enum SynStatus syn_verify_wu(const char *model, bool *passed);

// dim H⁰ and H¹ of gauge cohomology of the twisted structure gauge O{twist} over F_{p^f}, mod p.
//
// # Safety
// Out pointers must be valid.
enum SynStatus syn_gauge_sections(uint64_t p, size_t f, int64_t twist, size_t *h0, size_t *h1);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYNTOMIC_H */
