/* Copyright 2026 The libimc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C API of libimc: opaque handles, status codes, JSON in/out. Experiments are
 * described by a JSON config (see README for the schema); workflows write
 * their artifacts under an output directory and return a JSON report through
 * an imc_report handle. All entry points are thread-safe as long as each
 * handle is used from one thread at a time.
 */

#ifndef IMC_CAPI_H
#define IMC_CAPI_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define IMC_API __declspec(dllexport)
#else
#define IMC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum imc_status {
  IMC_OK = 0,
  IMC_ERR_CONFIG = 1,
  IMC_ERR_DIMENSION_MISMATCH = 2,
  IMC_ERR_DOMINATION_VIOLATION = 3,
  IMC_ERR_NON_FINITE_WEIGHT = 4,
  IMC_ERR_INVALID_BETA = 5,
  IMC_ERR_INDEX_OUT_OF_RANGE = 6,
  IMC_ERR_ALL_ZERO_WEIGHTS = 7,
  IMC_ERR_EMPTY_CHAIN = 8,
  IMC_ERR_SINGULAR_SYSTEM = 9,
  IMC_ERR_MEAN_NOT_ZERO = 10,
  IMC_ERR_NON_CONVERGENCE = 11,
  IMC_ERR_ZERO_ACCEPTANCE = 12,
  IMC_ERR_SUPPORT_TOO_SMALL = 13,
  IMC_ERR_UNSUPPORTED_LAW = 14,
  IMC_ERR_DEGENERATE_VARIANCE = 15,
  IMC_ERR_DIVISION_BY_ZERO = 16,
  IMC_ERR_IO = 17,
  IMC_ERR_INVALID_ARGUMENT = 18,
  IMC_ERR_UNKNOWN = 19
} imc_status;

/* Stable name of a status code ("ok", "config", ...). */
IMC_API const char* imc_status_name(imc_status status);

/* Message of the last error raised on the calling thread; empty when the
 * last call succeeded. The pointer stays valid until the next API call on
 * the same thread. */
IMC_API const char* imc_last_error(void);

typedef struct imc_experiment imc_experiment;
typedef struct imc_report imc_report;

/* --- experiment lifecycle --------------------------------------------- */

IMC_API imc_status imc_experiment_create(const char* config_json, imc_experiment** out);
IMC_API void imc_experiment_destroy(imc_experiment* experiment);

IMC_API imc_status imc_experiment_set_seed(imc_experiment* experiment, uint64_t seed);
IMC_API imc_status imc_experiment_set_threads(imc_experiment* experiment, int threads);

/* Resolved config JSON; owned by the handle. */
IMC_API const char* imc_experiment_config_json(const imc_experiment* experiment);

/* --- workflows --------------------------------------------------------- */
/* out_dir may be NULL to skip file output; the report always carries the
 * results. The caller owns the returned report. */

IMC_API imc_status imc_run(imc_experiment* experiment, const char* out_dir, imc_report** out);
IMC_API imc_status imc_ess_scan(imc_experiment* experiment, const char* out_dir,
                                imc_report** out);
IMC_API imc_status imc_bench(imc_experiment* experiment, const char* out_dir, imc_report** out);

/* Finite-state verification; args_json holds {m, n_max, seeds, tolerances,
 * tv_lags, reducible} with defaults for every field. */
IMC_API imc_status imc_verify(const char* args_json, const char* out_dir, imc_report** out);

IMC_API const char* imc_report_json(const imc_report* report);
IMC_API int imc_report_all_pass(const imc_report* report);
IMC_API void imc_report_destroy(imc_report* report);

/* --- direct numeric helpers ------------------------------------------- */

IMC_API imc_status imc_ess_kappa(const int64_t* counts, size_t n, double* out);
IMC_API imc_status imc_ess_is(const double* weights, size_t n, double* out);
IMC_API imc_status imc_tune_kappa(const double* weights, size_t n, double alpha, double* out);

/* n draws of the variance-optimal replication law at mean rho, from the
 * deterministic stream (seed, stream_id). */
IMC_API imc_status imc_draw_optimal(double rho, uint64_t seed, uint64_t stream_id, size_t n,
                                    int64_t* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* IMC_CAPI_H */
