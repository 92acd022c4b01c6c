#ifndef QMKDV_H
#define QMKDV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes.
typedef enum QmkdvStatus {
  QMKDV_STATUS_OK = 0,
  QMKDV_STATUS_NULL_POINTER = 1,
  QMKDV_STATUS_INVALID_ARGUMENT = 2,
  QMKDV_STATUS_BUFFER_TOO_SMALL = 3,
  QMKDV_STATUS_NOT_REAL = 4,
  QMKDV_STATUS_OVERFLOW = 5,
  QMKDV_STATUS_OUT_OF_RANGE = 6,
  QMKDV_STATUS_SIZE_CAP = 7,
  QMKDV_STATUS_NON_FINITE = 8,
  QMKDV_STATUS_BLOW_UP = 9,
  QMKDV_STATUS_IO = 10,
  QMKDV_STATUS_PANIC = 11,
} QmkdvStatus;

// Opaque spectral field.
typedef struct QmkdvField QmkdvField;

// Opaque trajectory.
typedef struct QmkdvTrajectory QmkdvTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last error on this thread; valid until the next failing
// call on the same thread. Never null.
const char *qmkdv_last_error_message(void);

// Analyzes `len` real samples on the `2 pi lambda` torus into a new field.
//
// # Safety
// `samples` must point to `len` readable doubles and `out` to a writable
// handle slot.
enum QmkdvStatus qmkdv_field_from_samples(const double *samples,
                                          size_t len,
                                          double lambda,
                                          struct QmkdvField **out);

// Releases a field; null is ignored.
//
// # Safety
// `field` must be null or a handle from this library not freed before.
void qmkdv_field_free(struct QmkdvField *field);

// `||u||_{H^s}`.
//
// # Safety
// Pointers must be valid.
enum QmkdvStatus qmkdv_field_sobolev_norm(const struct QmkdvField *field, double s, double *out);

// Number of stored coefficients, `M - 1`.
//
// # Safety
// Pointers must be valid.
enum QmkdvStatus qmkdv_field_num_coeffs(const struct QmkdvField *field, size_t *out);

// Copies the coefficients, from the most negative frequency up, as
// interleaved `(re, im)` pairs into `buf` of `len` doubles.
//
// # Safety
// `buf` must point to `len` writable doubles.
enum QmkdvStatus qmkdv_field_coeffs(const struct QmkdvField *field, double *buf, size_t len);

// Samples the field on the `factor * M` point grid into `buf`.
//
// # Safety
// `buf` must point to `len` writable doubles.
enum QmkdvStatus qmkdv_field_synthesize(const struct QmkdvField *field,
                                        size_t factor,
                                        double *buf,
                                        size_t len);

// `H(n1, n2, n3) = n^5 - n1^5 - n2^5 - n3^5` with `n = n1 + n2 + n3`.
//
// # Safety
// `out` must be valid.
enum QmkdvStatus qmkdv_resonance_cubic(int64_t n1, int64_t n2, int64_t n3, int64_t *out);

// Writes 1 to `out` when the factored form of `H` matches, else 0.
//
// # Safety
// `out` must be valid.
enum QmkdvStatus qmkdv_verify_factorization(int64_t n1, int64_t n2, int64_t n3, int32_t *out);

// Evolves `u0` under the physical flow with coefficients `coeffs[0..4]`.
// On blow-up the partial trajectory is still returned through `out`
// together with [`QmkdvStatus::BlowUp`].
//
// # Safety
// `coeffs` must point to 4 doubles; other pointers must be valid.
enum QmkdvStatus qmkdv_simulate(const struct QmkdvField *u0,
                                const double *coeffs,
                                double dt,
                                double t_end,
                                double epsilon,
                                size_t record_stride,
                                struct QmkdvTrajectory **out);

// Number of snapshots.
//
// # Safety
// Pointers must be valid.
enum QmkdvStatus qmkdv_trajectory_len(const struct QmkdvTrajectory *traj, size_t *out);

// Time of snapshot `index`.
//
// # Safety
// Pointers must be valid.
enum QmkdvStatus qmkdv_trajectory_time(const struct QmkdvTrajectory *traj,
                                       size_t index,
                                       double *out);

// Phase integral of snapshot `index`, NaN if unknown.
//
// # Safety
// Pointers must be valid.
enum QmkdvStatus qmkdv_trajectory_phase(const struct QmkdvTrajectory *traj,
                                        size_t index,
                                        double *out);

// Copy of the field of snapshot `index` as a new handle.
//
// # Safety
// Pointers must be valid.
enum QmkdvStatus qmkdv_trajectory_field(const struct QmkdvTrajectory *traj,
                                        size_t index,
                                        struct QmkdvField **out);

// Writes the trajectory to `path` (binary, or text for `.txt`/`.csv`).
//
// # Safety
// `path` must be a NUL-terminated string.
enum QmkdvStatus qmkdv_trajectory_write(const struct QmkdvTrajectory *traj, const char *path);

// Releases a trajectory; null is ignored.
//
// # Safety
// `traj` must be null or a handle from this library not freed before.
void qmkdv_trajectory_free(struct QmkdvTrajectory *traj);

// Applies the gauge rotation to every snapshot, returning a new handle.
//
// # Safety
// Pointers must be valid.
enum QmkdvStatus qmkdv_gauge_forward(const struct QmkdvTrajectory *traj,
                                     struct QmkdvTrajectory **out);

// Trilinear counterexample ratio at high frequency `n`; `variant` is 1 or 2.
//
// # Safety
// `out` must be valid.
enum QmkdvStatus qmkdv_xsb_ratio(int64_t n, double s, double b, int32_t variant, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QMKDV_H */
