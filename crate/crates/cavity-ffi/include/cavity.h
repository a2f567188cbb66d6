#ifndef CAVITY_H
#define CAVITY_H

/* Generated by cbindgen from the cavity-ffi sources; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CavityInitKind {
  CAVITY_INIT_KIND_VACUUM = 0,
  // `a` is the inverse temperature.
  CAVITY_INIT_KIND_GIBBS = 1,
  // `a` is the modulus and `b` the phase (radians) of `⟨b⟩`.
  CAVITY_INIT_KIND_COHERENT = 2,
} CavityInitKind;

typedef enum CavityStatus {
  CAVITY_STATUS_OK = 0,
  CAVITY_STATUS_NULL_POINTER = 1,
  CAVITY_STATUS_INVALID_PARAMETER = 2,
  // The quantity needs `sigma_minus > sigma_plus`.
  CAVITY_STATUS_STRICT_DAMPING = 3,
  // The truncation guard tripped; raise the cutoff.
  CAVITY_STATUS_TRUNCATION = 4,
  // A numerical routine failed (non-finite values, invalid state, ...).
  CAVITY_STATUS_NUMERIC = 5,
  // Output buffer too small.
  CAVITY_STATUS_BUFFER_TOO_SMALL = 6,
  CAVITY_STATUS_PANIC = 7,
} CavityStatus;

// Opaque parameter set.
typedef struct CavityParamsHandle CavityParamsHandle;

// Opaque running simulation.
typedef struct CavitySimulation CavitySimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a parameter set (atom energy 1).
//
// # Safety
// `out` must be valid for writing one pointer. On success `*out` owns a
// handle that must be released with [`cavity_params_free`].
enum CavityStatus cavity_params_new(double eps,
                                    double lambda,
                                    double tau,
                                    double p,
                                    double sigma_minus,
                                    double sigma_plus,
                                    struct CavityParamsHandle **out);

// # Safety
// `h` must be a live handle from [`cavity_params_new`].
enum CavityStatus cavity_params_set_atom_energy(struct CavityParamsHandle *h, double energy);

// Releases a parameter handle; null is ignored.
//
// # Safety
// `h` must be null or a handle from [`cavity_params_new`] not yet freed.
void cavity_params_free(struct CavityParamsHandle *h);

// Mean photon number of the ideal cavity after `n` atoms, gauge-invariant start with `n0` photons.
//
// # Safety
// `h` must be a live parameter handle and `out` valid for one write.
enum CavityStatus cavity_mean_photons_ideal(const struct CavityParamsHandle *h,
                                            double n0,
                                            uint64_t n,
                                            double *out);

// Mean photon number of the open cavity at time `t`, gauge-invariant start.
//
// # Safety
// `h` must be a live parameter handle and `out` valid for one write.
enum CavityStatus cavity_mean_photons_open(const struct CavityParamsHandle *h,
                                           double n0,
                                           double t,
                                           double *out);

// Long-time open photon number; needs `sigma_minus > sigma_plus`.
//
// # Safety
// `h` must be a live parameter handle and `out` valid for one write.
enum CavityStatus cavity_mean_photons_open_limit(const struct CavityParamsHandle *h, double *out);

// Lower and upper estimates of the long-time photon number.
//
// # Safety
// `h` must be a live parameter handle; `lower` and `upper` valid for one write each.
enum CavityStatus cavity_limit_bounds(const struct CavityParamsHandle *h,
                                      double *lower,
                                      double *upper);

// Per-atom energy transfer of the ideal cavity.
//
// # Safety
// `h` must be a live parameter handle and `out` valid for one write.
enum CavityStatus cavity_energy_step_ideal(const struct CavityParamsHandle *h, double *out);

// `⟨b⟩` after `n` atoms from a gauge-invariant start (ideal or open).
//
// # Safety
// `h` must be a live parameter handle; `re` and `im` valid for one write each.
enum CavityStatus cavity_first_moment(const struct CavityParamsHandle *h,
                                      uint64_t n,
                                      double *re,
                                      double *im);

// Long-time Weyl functional at `zeta = zeta_re + i zeta_im` to relative accuracy `tol`.
//
// # Safety
// `h` must be a live parameter handle; `re` and `im` valid for one write each.
enum CavityStatus cavity_weyl_char_limit(const struct CavityParamsHandle *h,
                                         double zeta_re,
                                         double zeta_im,
                                         double tol,
                                         double *re,
                                         double *im);

// Starts a simulation at Fock cutoff `cutoff` from the given initial state.
//
// # Safety
// `h` must be a live parameter handle (it is copied, not retained) and
// `out` valid for writing one pointer. On success `*out` must be released
// with [`cavity_simulation_free`].
enum CavityStatus cavity_simulation_new(const struct CavityParamsHandle *h,
                                        enum CavityInitKind kind,
                                        double a,
                                        double b,
                                        uintptr_t cutoff,
                                        struct CavitySimulation **out);

// Advances by `n` atoms. On a truncation error the state of the last valid step is kept.
//
// # Safety
// `sim` must be a live simulation handle.
enum CavityStatus cavity_simulation_step(struct CavitySimulation *sim, uint64_t n);

// # Safety
// `sim` must be a live simulation handle and `out` valid for one write.
enum CavityStatus cavity_simulation_steps_done(const struct CavitySimulation *sim, uint64_t *out);

// # Safety
// `sim` must be a live simulation handle and `out` valid for one write.
enum CavityStatus cavity_simulation_mean_photons(const struct CavitySimulation *sim, double *out);

// # Safety
// `sim` must be a live simulation handle; `re` and `im` valid for one write each.
enum CavityStatus cavity_simulation_first_moment(const struct CavitySimulation *sim,
                                                 double *re,
                                                 double *im);

// Probability mass in the top levels of the truncated state.
//
// # Safety
// `sim` must be a live simulation handle and `out` valid for one write.
enum CavityStatus cavity_simulation_tail_mass(const struct CavitySimulation *sim, double *out);

// Copies the photon-number distribution (`cutoff + 1` values) into `buf`.
// `*written` receives the required length even when the buffer is too small.
//
// # Safety
// `sim` must be a live simulation handle, `buf` valid for `len` writes of
// `f64` (may be null when `len` is 0) and `written` valid for one write.
enum CavityStatus cavity_simulation_populations(const struct CavitySimulation *sim,
                                                double *buf,
                                                uintptr_t len,
                                                uintptr_t *written);

// Releases a simulation; null is ignored.
//
// # Safety
// `sim` must be null or a handle from [`cavity_simulation_new`] not yet freed.
void cavity_simulation_free(struct CavitySimulation *sim);

// Copies the calling thread's last error message, NUL-terminated and
// truncated to fit, into `buf`. Returns the full message length without the
// terminator (0 when the last call succeeded).
//
// # Safety
// `buf` must be null or valid for `len` bytes of writes.
uintptr_t cavity_last_error_message(char *buf, uintptr_t len);

// Static description of a status code.
const char *cavity_status_string(enum CavityStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAVITY_H */
