#ifndef NETKERNEL_H
#define NETKERNEL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NkStatus {
  NK_STATUS_OK = 0,
  NK_STATUS_NULL_POINTER = 1,
  NK_STATUS_INVALID_UTF8 = 2,
  NK_STATUS_PARSE = 3,
  NK_STATUS_INVALID_ARGUMENT = 4,
  NK_STATUS_NOT_POSITIVE_DEFINITE = 5,
  NK_STATUS_IO = 6,
  NK_STATUS_PANIC = 7,
} NkStatus;

typedef enum NkVerdict {
  NK_VERDICT_VALID = 0,
  NK_VERDICT_INVALID = 1,
  NK_VERDICT_UNKNOWN = 2,
} NkVerdict;

typedef enum NkPointKind {
  NK_POINT_KIND_VERTEX = 0,
  NK_POINT_KIND_EDGE = 1,
} NkPointKind;

typedef enum NkMetric {
  NK_METRIC_GEODESIC = 0,
  NK_METRIC_RESISTANCE = 1,
  NK_METRIC_EUCLIDEAN = 2,
} NkMetric;

/*
 Opaque kernel handle.
 */
typedef struct NkKernel NkKernel;

/*
 Opaque network handle.
 */
typedef struct NkNetwork NkNetwork;

/*
 A location on a network. `offset` is ignored for vertices.
 */
typedef struct NkPoint {
  enum NkPointKind kind;
  uint64_t ref_id;
  double offset;
} NkPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *nk_version(void);

/*
 Message of the last failing call on this thread, or null. The pointer is
 valid until the next failing call on this thread.
 */
const char *nk_last_error(void);

/*
 Parses a network from JSON text.

 # Safety
 `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum NkStatus nk_network_from_json(const char *json, struct NkNetwork **out);

/*
 Reads a network JSON file.

 # Safety
 `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum NkStatus nk_network_read(const char *path, struct NkNetwork **out);

/*
 # Safety
 `net` must be null or a handle from this library not yet freed.
 */
void nk_network_free(struct NkNetwork *net);

/*
 Vertex and edge counts.

 # Safety
 `net` must be a live handle; the outputs must be writable.
 */
enum NkStatus nk_network_size(const struct NkNetwork *net, size_t *vertices, size_t *edges);

/*
 Largest geodesic distance between two vertices.

 # Safety
 `net` must be a live handle; `out` must be writable.
 */
enum NkStatus nk_network_diameter(const struct NkNetwork *net, double *out);

/*
 Writes 1 if every edge is a shortest path between its endpoints, else 0.

 # Safety
 `net` must be a live handle; `out` must be writable.
 */
enum NkStatus nk_network_is_distance_consistent(const struct NkNetwork *net, int32_t *out);

/*
 Parses a kernel config (`{"model": ...}`) and checks its parameters.

 # Safety
 `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum NkStatus nk_kernel_from_json(const char *json, struct NkKernel **out);

/*
 # Safety
 `k` must be null or a handle from this library not yet freed.
 */
void nk_kernel_free(struct NkKernel *k);

/*
 Covariance at spatial distance `d` and time lag `u`.

 # Safety
 `k` must be a live handle; `out` must be writable.
 */
enum NkStatus nk_kernel_eval(const struct NkKernel *k, double d, double u, double *out);

/*
 Validity verdict of `k` on the topology of `net`. The verdict's rule or
 reason is left in [`nk_last_error`].

 # Safety
 `k` and `net` must be live handles; `out` must be writable.
 */
enum NkStatus nk_kernel_validity(const struct NkKernel *k,
                                 const struct NkNetwork *net,
                                 enum NkVerdict *out);

/*
 Fills `out` (row-major, `n * n`) with pairwise distances.

 # Safety
 `points` must hold `n` entries and `out` room for `n * n` doubles.
 */
enum NkStatus nk_distance_matrix(const struct NkNetwork *net,
                                 const struct NkPoint *points,
                                 size_t n,
                                 enum NkMetric metric,
                                 double *out);

/*
 Zero-mean Gaussian log-likelihood of `y` under `k` plus `nugget` on the
 diagonal, observed at `points` and `times`.

 # Safety
 `points`, `times` and `y` must each hold `n` entries.
 */
enum NkStatus nk_loglik(const struct NkNetwork *net,
                        const struct NkKernel *k,
                        const struct NkPoint *points,
                        const double *times,
                        const double *y,
                        size_t n,
                        double nugget,
                        double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NETKERNEL_H */
