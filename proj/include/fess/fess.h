// Copyright 2026 The FESS Authors. All Rights Reserved.
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

/* C interface to the fess library.
 *
 * Every fallible call returns a fess_status. On failure the message is
 * available from fess_last_error() on the same thread until the next call.
 * Objects are opaque handles released with the matching *_free function;
 * passing NULL to a *_free function is a no-op. */
#ifndef FESS_FESS_H_
#define FESS_FESS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(FESS_BUILDING_LIBRARY)
#define FESS_API __attribute__((visibility("default")))
#else
#define FESS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fess_status {
  FESS_OK = 0,
  FESS_ERR_VALIDATION = 1,
  FESS_ERR_NUMERICAL = 2,
  FESS_ERR_IO = 3,
  FESS_ERR_INTERNAL = 4
} fess_status;

typedef struct fess_config fess_config;
typedef struct fess_volume fess_volume;
typedef struct fess_model fess_model;

typedef struct fess_metrics {
  double dice;
  double iou;
  double precision;
  double specificity;
  double sensitivity;
  uint64_t tp;
  uint64_t fp;
  uint64_t tn;
  uint64_t fn;
} fess_metrics;

FESS_API const char* fess_version(void);
/* Message of the last failed call on this thread, "" if none. */
FESS_API const char* fess_last_error(void);

/* ---- configuration ---- */

FESS_API fess_status fess_config_default(fess_config** out);
FESS_API fess_status fess_config_parse(const char* text, fess_config** out);
FESS_API fess_status fess_config_load(const char* path, fess_config** out);
FESS_API void fess_config_free(fess_config* cfg);
FESS_API fess_status fess_config_validate(const fess_config* cfg);
FESS_API fess_status fess_config_set_seed(fess_config* cfg, uint64_t seed);
FESS_API fess_status fess_config_set_jobs(fess_config* cfg, size_t jobs);
FESS_API fess_status fess_config_seed(const fess_config* cfg, uint64_t* out);
/* Copies a NUL-terminated string into buf when it fits in cap bytes; *needed
 * (optional) receives the full length including the terminator. A buffer
 * that is too small yields FESS_ERR_VALIDATION. */
FESS_API fess_status fess_config_canonical(const fess_config* cfg, char* buf,
                                           size_t cap, size_t* needed);
FESS_API fess_status fess_config_provenance(const fess_config* cfg, char* buf,
                                            size_t cap, size_t* needed);

/* ---- volumes ---- */

FESS_API fess_status fess_volume_create(const size_t* shape, size_t rank,
                                        const double* data, fess_volume** out);
FESS_API void fess_volume_free(fess_volume* v);
FESS_API size_t fess_volume_rank(const fess_volume* v);
FESS_API size_t fess_volume_extent(const fess_volume* v, size_t axis);
FESS_API size_t fess_volume_size(const fess_volume* v);
FESS_API const double* fess_volume_data(const fess_volume* v);
FESS_API fess_status fess_volume_load(const char* path, fess_volume** out);
FESS_API fess_status fess_volume_save(const fess_volume* v, const char* path);
/* Masks are volumes whose values are all 0 or 1. */
FESS_API fess_status fess_mask_load(const char* path, fess_volume** out);
FESS_API fess_status fess_mask_save(const fess_volume* mask, const char* path);

/* ---- losses and metrics ---- */

FESS_API fess_status fess_loss_dice(const fess_volume* pred,
                                    const fess_volume* truth, double epsilon,
                                    double* out);
/* variant: "fess", "ntxent" or "infonce". eta applies to "fess" only. */
FESS_API fess_status fess_loss_contrastive(const fess_volume* current,
                                           const fess_volume* previous,
                                           const char* variant, double delta,
                                           double eta, double* out);
FESS_API fess_status fess_metrics_compute(const fess_volume* pred,
                                          const fess_volume* truth,
                                          double threshold, fess_metrics* out);

/* ---- model ---- */

FESS_API fess_status fess_model_init(uint64_t seed, fess_model** out);
FESS_API fess_status fess_model_load(const char* path, fess_model** out);
FESS_API fess_status fess_model_save(const fess_model* m, const char* path);
FESS_API void fess_model_free(fess_model* m);
FESS_API size_t fess_model_parameter_count(const fess_model* m);
/* image: (i,j,k) or (n,i,j,k); probs has the same shape. */
FESS_API fess_status fess_model_predict(const fess_model* m,
                                        const fess_volume* image,
                                        fess_volume** probs);

/* ---- commands ---- */

/* Writes data.count samples split into out_dir/train and out_dir/test. */
FESS_API fess_status fess_generate(const fess_config* cfg, const char* out_dir);
/* Trains on data_dir/train, evaluates on data_dir/test and writes
 * steps.csv, eval.csv and model.ckpt into out_dir. last (optional) receives
 * the last evaluation. */
FESS_API fess_status fess_train(const fess_config* cfg, const char* data_dir,
                                const char* out_dir, fess_metrics* last);
/* Evaluates a checkpoint on data_dir/test, or on data_dir itself when it has
 * no test subdirectory. volumes (optional) receives the sample count. */
FESS_API fess_status fess_eval(const fess_config* cfg, const char* checkpoint,
                               const char* data_dir, fess_metrics* out,
                               size_t* volumes);

typedef void (*fess_gradcheck_fn)(const char* name, uint64_t seed,
                                  double max_rel_error, double tolerance,
                                  int passed, void* user);
/* Runs the gradient-check suite; failures (optional) receives the number of
 * failing cases. The call itself succeeds even when cases fail. */
FESS_API fess_status fess_gradcheck(const fess_config* cfg,
                                    fess_gradcheck_fn on_case, void* user,
                                    size_t* failures);
/* Loss comparison and training-size ablation; writes comparison.csv,
 * comparison_raw.csv, ablation.csv, ablation_agg.csv and ablation.svg. */
FESS_API fess_status fess_experiment(const fess_config* cfg,
                                     const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* FESS_FESS_H_ */
