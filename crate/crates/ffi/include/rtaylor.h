#ifndef RTAYLOR_H
#define RTAYLOR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RtStatus {
  RT_STATUS_OK = 0,
  RT_STATUS_NULL_POINTER = 1,
  RT_STATUS_INVALID_UTF8 = 2,
  RT_STATUS_PARSE = 3,
  RT_STATUS_DOMAIN = 4,
  RT_STATUS_OUT_OF_RANGE = 5,
  RT_STATUS_PANIC = 6,
} RtStatus;

/*
 An exact rational.
 */
typedef struct RtRat RtRat;

/*
 A pipeline report.
 */
typedef struct RtReport RtReport;

/*
 The record of one Round Taylor run.
 */
typedef struct RtRun RtRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or null. Valid until the
 next failing call on the same thread.
 */
const char *rt_last_error(void);

/*
 Releases a string returned by this library.

 # Safety
 `s` must come from this library and not be freed twice.
 */
void rt_string_free(char *s);

/*
 Parses `p/q` or an integer.

 # Safety
 `text` must be a NUL-terminated string; `out` must be writable.
 */
enum RtStatus rt_rat_parse(const char *text, struct RtRat **out);

/*
 # Safety
 `r` must come from this library and not be freed twice.
 */
void rt_rat_free(struct RtRat *r);

/*
 Canonical `p/q` text; free with `rt_string_free`.

 # Safety
 `r` must be a live handle; `out` must be writable.
 */
enum RtStatus rt_rat_to_string(const struct RtRat *r, char **out);

/*
 Nearest double, for display only.

 # Safety
 `r` must be a live handle or null (giving NaN).
 */
double rt_rat_to_f64(const struct RtRat *r);

/*
 Largest multiple of `10^-grid_exp` not above `x`.

 # Safety
 `x` must be a live handle; `out` must be writable.
 */
enum RtStatus rt_floor_to_grid(const struct RtRat *x, uint32_t grid_exp, struct RtRat **out);

/*
 Global error bound H~ of an order-2 run of `field` with the published
 hypothesis constants, step `h`, grid `10^-grid_exp` and `k` steps.

 # Safety
 `field` must be a NUL-terminated string, `h` a live handle, `out` writable.
 */
enum RtStatus rt_error_bound(const char *field,
                             const struct RtRat *h,
                             uint32_t grid_exp,
                             uint32_t k,
                             struct RtRat **out);

/*
 `Z_F(t, b, a, k)` on the grid `10^-grid_exp`.

 # Safety
 `field` must be a NUL-terminated string, `t`, `a`, `b` live handles and
 `out` writable.
 */
enum RtStatus rt_run(const char *field,
                     const struct RtRat *t,
                     const struct RtRat *a,
                     const struct RtRat *b,
                     uint32_t k,
                     uint32_t grid_exp,
                     struct RtRun **out);

/*
 # Safety
 `r` must come from this library and not be freed twice.
 */
void rt_run_free(struct RtRun *r);

/*
 1 if the run is certified, 0 if not or if `r` is null.

 # Safety
 `r` must be a live handle or null.
 */
int32_t rt_run_certified(const struct RtRun *r);

/*
 Dimension of the state, or 0 for null.

 # Safety
 `r` must be a live handle or null.
 */
uintptr_t rt_run_dim(const struct RtRun *r);

/*
 Component `i` of the final state.

 # Safety
 `r` must be a live handle; `out` must be writable.
 */
enum RtStatus rt_run_final(const struct RtRun *r, uintptr_t i, struct RtRat **out);

/*
 The run's H~; fails with `Domain` when the run has no error bound.

 # Safety
 `r` must be a live handle; `out` must be writable.
 */
enum RtStatus rt_run_h_tilde(const struct RtRun *r, struct RtRat **out);

/*
 # Safety
 `r` must be a live handle; `out` must be writable.
 */
enum RtStatus rt_run_to_json(const struct RtRun *r, char **out);

/*
 Reproduces the introductory table.

 # Safety
 `out` must be writable.
 */
enum RtStatus rt_repro_intro(struct RtReport **out);

/*
 Runs the proof up to `target` (`lemma1`..`lemma4`, `theta`, `full`).
 `config` is key=value text or null for the published settings.

 # Safety
 `target` must be a NUL-terminated string, `config` one or null, `out`
 writable.
 */
enum RtStatus rt_verify(const char *target,
                        const char *config,
                        int32_t parallel,
                        struct RtReport **out);

/*
 # Safety
 `r` must come from this library and not be freed twice.
 */
void rt_report_free(struct RtReport *r);

/*
 0 pass, 1 fail, 2 inconclusive; -1 for null.

 # Safety
 `r` must be a live handle or null.
 */
int32_t rt_report_verdict(const struct RtReport *r);

/*
 Report as JSON without timings; free with `rt_string_free`.

 # Safety
 `r` must be a live handle; `out` must be writable.
 */
enum RtStatus rt_report_to_json(const struct RtReport *r, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RTAYLOR_H */
