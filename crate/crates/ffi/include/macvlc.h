#ifndef MACVLC_H
#define MACVLC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MacvlcStatus {
  MACVLC_STATUS_OK = 0,
  MACVLC_STATUS_NULL_POINTER = 1,
  MACVLC_STATUS_INVALID_UTF8 = 2,
  MACVLC_STATUS_INVALID_ARGUMENT = 3,
  MACVLC_STATUS_PARSE = 4,
  MACVLC_STATUS_CHANNEL = 5,
  MACVLC_STATUS_COMPUTATION = 6,
  MACVLC_STATUS_SIMULATION = 7,
  MACVLC_STATUS_PANIC = 8,
} MacvlcStatus;

/**
 * Wrong-hypothesis walk kinds with a Chernoff root.
 */
typedef enum MacvlcWalkKind {
  MACVLC_WALK_KIND_JOINT_BOTH_WRONG = 0,
  MACVLC_WALK_KIND_JOINT_W1_WRONG = 1,
  MACVLC_WALK_KIND_JOINT_W2_WRONG = 2,
  MACVLC_WALK_KIND_COND_WRONG_GIVEN_X2 = 3,
  MACVLC_WALK_KIND_COND_WRONG_GIVEN_X1 = 4,
  MACVLC_WALK_KIND_SINGLE_WRONG_USER1 = 5,
  MACVLC_WALK_KIND_SINGLE_WRONG_USER2 = 6,
} MacvlcWalkKind;

typedef enum MacvlcRegionKind {
  MACVLC_REGION_KIND_RMAC = 0,
  MACVLC_REGION_KIND_OUTER = 1,
  MACVLC_REGION_KIND_FEEDBACK = 2,
  MACVLC_REGION_KIND_RECT = 3,
} MacvlcRegionKind;

/**
 * Opaque channel handle.
 */
typedef struct MacvlcChannel MacvlcChannel;

typedef struct MacvlcCapacities {
  double c1_nats;
  double c2_nats;
} MacvlcCapacities;

typedef struct MacvlcInfoTriple {
  /**
   * I(X1;Y|X2), nats
   */
  double i1;
  /**
   * I(X2;Y|X1), nats
   */
  double i2;
  /**
   * I(X1,X2;Y), nats
   */
  double i12;
} MacvlcInfoTriple;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Loads a channel from its JSON description.
 *
 * # Safety
 * `json` must be a valid C string and `out` a valid pointer.
 */
enum MacvlcStatus macvlc_channel_from_json(const char *json, struct MacvlcChannel **out);

/**
 * Built-in channel by name, e.g. `"adder"` or `"noisy_adder(0.1)"`.
 *
 * # Safety
 * `name` must be a valid C string and `out` a valid pointer.
 */
enum MacvlcStatus macvlc_channel_builtin(const char *name, struct MacvlcChannel **out);

/**
 * Releases a channel; null is ignored.
 *
 * # Safety
 * `ch` must come from this library and not be used afterwards.
 */
void macvlc_channel_free(struct MacvlcChannel *ch);

/**
 * # Safety
 * `ch` must be a live handle; the outputs must be valid pointers.
 */
enum MacvlcStatus macvlc_channel_dims(const struct MacvlcChannel *ch,
                                      size_t *x1_size,
                                      size_t *x2_size,
                                      size_t *y_size);

/**
 * Single-user capacities `C1`, `C2` in nats per use.
 *
 * # Safety
 * `ch` must be a live handle and `out` a valid pointer.
 */
enum MacvlcStatus macvlc_channel_capacities(const struct MacvlcChannel *ch,
                                            struct MacvlcCapacities *out);

/**
 * Information triple at the product input `(p1, p2)`; a null pmf means uniform.
 *
 * # Safety
 * `ch` must be a live handle; non-null pmfs must point to `n1`/`n2`
 * doubles; `out` must be a valid pointer.
 */
enum MacvlcStatus macvlc_info_triple(const struct MacvlcChannel *ch,
                                     const double *p1,
                                     size_t n1,
                                     const double *p2,
                                     size_t n2,
                                     struct MacvlcInfoTriple *out);

/**
 * Positive root of the log-MGF of a wrong-hypothesis increment.
 *
 * # Safety
 * As for `macvlc_info_triple`.
 */
enum MacvlcStatus macvlc_chernoff_root(const struct MacvlcChannel *ch,
                                       const double *p1,
                                       size_t n1,
                                       const double *p2,
                                       size_t n2,
                                       enum MacvlcWalkKind kind,
                                       double *out);

/**
 * Region vertices as CSV in bits. `r1`, `r2`, `s` are read for the outer
 * and feedback kinds only; `grid` 0 picks the default.
 *
 * # Safety
 * `ch` must be a live handle and `out` a valid pointer.
 */
enum MacvlcStatus macvlc_region_csv(const struct MacvlcChannel *ch,
                                    enum MacvlcRegionKind kind,
                                    double r1,
                                    double r2,
                                    double s,
                                    size_t grid,
                                    char **out);

/**
 * Runs an experiment and returns the summary JSON.
 *
 * `config_json` holds `scheme`, `decoder`, `trials`, `master_seed` and an
 * optional `workers` (default 1).
 *
 * # Safety
 * `ch` must be a live handle, `config_json` a valid C string and `out` a
 * valid pointer.
 */
enum MacvlcStatus macvlc_simulate_json(const struct MacvlcChannel *ch,
                                       const char *config_json,
                                       char **out);

/**
 * Message of the last failed call on this thread (empty after a success).
 * Valid until the next call into the library on the same thread.
 */
const char *macvlc_last_error_message(void);

/**
 * Releases a string returned by the library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void macvlc_string_free(char *s);

/**
 * Null-terminated version string.
 */
const char *macvlc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MACVLC_H */
