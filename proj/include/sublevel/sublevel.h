// Copyright 2026 The sublevel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the sublevel library. All handles are opaque; every
 * fallible call returns an sl_status and, on failure, sets a thread-local
 * message readable through sl_last_error(). Strings returned through char**
 * are owned by the caller and released with sl_string_free(). Matrices are
 * passed row-major. */
#ifndef SUBLEVEL_SUBLEVEL_H_
#define SUBLEVEL_SUBLEVEL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(SUBLEVEL_BUILDING_LIBRARY)
#define SL_API __attribute__((visibility("default")))
#else
#define SL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sl_status {
  SL_OK = 0,
  SL_ERR_INVALID_ARGUMENT = 1,
  SL_ERR_DIMENSION_MISMATCH = 2,
  SL_ERR_PRECONDITION = 3,
  SL_ERR_INFEASIBLE = 4,
  SL_ERR_RANK_NOT_RESTORED = 5,
  SL_ERR_NO_DEPENDENT_COLUMN = 6,
  SL_ERR_HOMOTOPY_FAILED = 7,
  SL_ERR_DIVERGED = 8,
  SL_ERR_DEGENERATE_DETERMINANT = 9,
  SL_ERR_IO = 10,
  SL_ERR_INTERNAL = 11
} sl_status;

typedef struct sl_network sl_network;
typedef struct sl_dataset sl_dataset;
typedef struct sl_params sl_params;
typedef struct sl_path sl_path;
typedef struct sl_report sl_report;
typedef struct sl_certificate sl_certificate;

SL_API const char* sl_version(void);
/* Machine-readable name, e.g. "precondition". */
SL_API const char* sl_status_name(sl_status status);
/* Message of the last failed call on this thread; "" if none. */
SL_API const char* sl_last_error(void);
SL_API void sl_string_free(char* s);

/* ---- networks ---------------------------------------------------------- */

/* Leaky ReLU network; loss is "square" or "cross_entropy". */
SL_API sl_status sl_network_create(const int64_t* widths, size_t n_widths,
                                   double slope, const char* loss,
                                   sl_network** out);
SL_API sl_status sl_network_load(const char* file, sl_network** out);
SL_API sl_status sl_network_save(const sl_network* net, const char* file);
SL_API size_t sl_network_depth(const sl_network* net);
/* Width n_layer; 0 if out of range. */
SL_API int64_t sl_network_width(const sl_network* net, size_t layer);
SL_API void sl_network_free(sl_network* net);

/* ---- data -------------------------------------------------------------- */

SL_API sl_status sl_dataset_create(const double* x, int64_t rows,
                                   int64_t x_cols, const double* y,
                                   int64_t y_cols, sl_dataset** out);
/* Gaussian inputs; targets suited to the network's loss. */
SL_API sl_status sl_dataset_generate(const sl_network* net, int64_t samples,
                                     uint64_t seed, sl_dataset** out);
SL_API sl_status sl_dataset_load(const char* file, sl_dataset** out);
SL_API sl_status sl_dataset_save(const sl_dataset* data, const char* file);
SL_API int64_t sl_dataset_samples(const sl_dataset* data);
SL_API void sl_dataset_free(sl_dataset* data);

/* ---- parameters -------------------------------------------------------- */

SL_API sl_status sl_params_random(const sl_network* net, uint64_t seed,
                                  sl_params** out);
SL_API sl_status sl_params_load(const char* file, sl_params** out);
SL_API sl_status sl_params_save(const sl_params* params, const char* file);
SL_API sl_status sl_params_to_json(const sl_params* params, char** out);
/* Exchanges first-layer neurons j < k (0-based). */
SL_API sl_status sl_params_swap_neurons(const sl_params* params, int64_t j,
                                        int64_t k, sl_params** out);
/* Adds a first-layer neuron with random incoming and zero outgoing
 * weights. Writes the widened network and the padded parameters. */
SL_API sl_status sl_params_pad(const sl_network* net, const sl_params* params,
                               uint64_t seed, sl_network** out_net,
                               sl_params** out);
/* Pads `params` with the extra neuron found in `reference`. */
SL_API sl_status sl_params_pad_like(const sl_params* params,
                                    const sl_params* reference,
                                    sl_params** out);
SL_API void sl_params_free(sl_params* params);

SL_API sl_status sl_loss(const sl_network* net, const sl_dataset* data,
                         const sl_params* params, double* out);

typedef struct sl_train_options {
  int steps;
  double learning_rate;
} sl_train_options;

SL_API sl_train_options sl_train_options_default(void);
/* Full-batch gradient descent; SL_ERR_DIVERGED on a non-finite loss. */
SL_API sl_status sl_train(const sl_network* net, const sl_dataset* data,
                          const sl_params* init,
                          const sl_train_options* options, sl_params** out,
                          double* final_loss);

/* ---- paths ------------------------------------------------------------- */

typedef struct sl_connect_options {
  uint64_t seed;
  int max_retries;
  double rank_tol_rel;
  double feas_tol;
  double inv_tol;
  double verify_tol;
  int verify_samples;
} sl_connect_options;

SL_API sl_connect_options sl_connect_options_default(void);
/* Path from a to b inside the alpha-sublevel set. Requires n_1 >= N + 1,
 * strictly narrowing widths above the first hidden layer and both endpoint
 * losses <= alpha. */
SL_API sl_status sl_connect(const sl_network* net, const sl_dataset* data,
                            const sl_params* a, const sl_params* b,
                            double alpha, const sl_connect_options* options,
                            sl_path** out);
SL_API size_t sl_path_segments(const sl_path* path);
/* Regime used above the first layer; "" for loaded paths. */
SL_API const char* sl_path_regime(const sl_path* path);
SL_API sl_status sl_path_endpoint(const sl_path* path, int which_end,
                                  sl_params** out);
SL_API sl_status sl_path_save(const sl_path* path, const char* file);
SL_API sl_status sl_path_load(const char* file, sl_path** out);
/* CSV: segment_index,lambda,loss,param_l2_norm,output_drift. */
SL_API sl_status sl_path_write_trace(const sl_network* net,
                                     const sl_dataset* data,
                                     const sl_path* path, int samples,
                                     const char* file);
SL_API void sl_path_free(sl_path* path);

typedef struct sl_verify_options {
  int samples_per_segment;
  double verify_tol;
  double inv_tol;
  double endpoint_tol;
} sl_verify_options;

SL_API sl_verify_options sl_verify_options_default(void);
/* a and b may be NULL, in which case the path's own ends are used. */
SL_API sl_status sl_verify(const sl_network* net, const sl_dataset* data,
                           const sl_path* path, const sl_params* a,
                           const sl_params* b, double alpha,
                           const sl_verify_options* options, sl_report** out);
SL_API int sl_report_passed(const sl_report* report);
SL_API double sl_report_max_loss(const sl_report* report);
SL_API sl_status sl_report_to_json(const sl_report* report, char** out);
SL_API void sl_report_free(sl_report* report);

/* ---- disconnection certificates --------------------------------------- */

typedef struct sl_certify_options {
  int64_t samples;    /* N, also the hidden width */
  int64_t input_dim;  /* n_0 */
  uint64_t seed;
  double slope;
  /* Seeds seed, seed + 1, ... are tried until a certificate is valid. */
  int max_seed_retries;
  int barrier_samples;
} sl_certify_options;

SL_API sl_certify_options sl_certify_options_default(void);
/* Builds a width-N instance, swaps two neurons, certifies and scans the
 * barrier. SL_ERR_DEGENERATE_DETERMINANT if every seed fails. */
SL_API sl_status sl_certify(const sl_certify_options* options,
                            sl_certificate** out);
SL_API int sl_certificate_valid(const sl_certificate* cert);
SL_API double sl_certificate_barrier(const sl_certificate* cert);
SL_API double sl_certificate_straight_barrier(const sl_certificate* cert);
SL_API uint64_t sl_certificate_seed(const sl_certificate* cert);
/* Copies of the certified instance; any output pointer may be NULL. */
SL_API sl_status sl_certificate_instance(const sl_certificate* cert,
                                         sl_network** net, sl_dataset** data,
                                         sl_params** theta,
                                         sl_params** theta_prime);
SL_API sl_status sl_certificate_to_json(const sl_certificate* cert,
                                        char** out);
SL_API void sl_certificate_free(sl_certificate* cert);

#ifdef __cplusplus
}
#endif

#endif  // SUBLEVEL_SUBLEVEL_H_
