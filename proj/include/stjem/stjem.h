/* Copyright (c) 2026 the stjem authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C API for the stjem library: stabilized training of joint energy-based
 * classifiers, SGLD sampling, greedy denoising, likelihood-weighted model
 * combination, and the brute-force oracle suite.
 *
 * Every function returns STJEM_OK (0) on success or a stjem_status error
 * code; stjem_last_error() describes the most recent failure on the calling
 * thread. Objects are opaque handles owned by the caller and released with
 * the matching _free function.
 */
#ifndef STJEM_H
#define STJEM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum stjem_status {
    STJEM_OK = 0,
    STJEM_ERR_INVALID_ARGUMENT = 1,
    STJEM_ERR_FORMAT = 2,
    STJEM_ERR_IO = 3,
    STJEM_ERR_DIVERGENCE = 4,
    STJEM_ERR_TRAINING_FAILED = 5,
    STJEM_ERR_RESOURCE_LIMIT = 6,
    STJEM_ERR_INTERNAL = 7
} stjem_status;

typedef struct stjem_net stjem_net;
typedef struct stjem_dataset stjem_dataset;
typedef struct stjem_config stjem_config;

/* Message for the last error on this thread; empty string if none. */
const char* stjem_last_error(void);

/* ---- run configuration (flat key = value text format) ---- */

int stjem_config_create(stjem_config** out);
int stjem_config_load(const char* path, stjem_config** out);
int stjem_config_set(stjem_config* cfg, const char* key, const char* value);
int stjem_config_get(const stjem_config* cfg, const char* key, char* buf, size_t buflen);
/* Applies STJEM_SEED / STJEM_THREADS from the environment when present. */
int stjem_config_apply_env(stjem_config* cfg);
void stjem_config_free(stjem_config* cfg);

/* ---- datasets ---- */

/* `spec` is either a dataset CSV path or a generator spec:
 *   two-moons:n=500,noise_sd=0.1,seed=7
 *   gmm:n=1000,k=4,dx=2,cov_scale=0.08,seed=1[,means=ax|ay;bx|by;...]
 *   ring:n=400,radius=0.7,noise_sd=0.05,seed=3
 */
int stjem_dataset_make(const char* spec, stjem_dataset** out);
int stjem_dataset_load_csv(const char* path, stjem_dataset** out);
int stjem_dataset_dump_csv(const stjem_dataset* d, const char* path);
/* Keeps keep_n labels (class-stratified). A non-fatal warning, if any, is
 * copied into warning_buf. */
int stjem_dataset_mask_labels(const stjem_dataset* d, int keep_n, uint64_t seed,
                              stjem_dataset** out, char* warning_buf, size_t warning_buflen);
int stjem_dataset_split(const stjem_dataset* d, int n_head, stjem_dataset** head,
                        stjem_dataset** tail);
int stjem_dataset_dims(const stjem_dataset* d, int* n, int* dx, int* dy);
int stjem_dataset_row(const stjem_dataset* d, int i, double* x_out, int* label_out,
                      int* labeled_out);
void stjem_dataset_free(stjem_dataset* d);

/* ---- energy networks ---- */

int stjem_net_load(const char* path, stjem_net** out);
int stjem_net_save(const stjem_net* net, const char* path);
int stjem_net_dims(const stjem_net* net, int* dx, int* dy);
int stjem_net_forward(const stjem_net* net, const double* x, int dx, double* logits_out, int dy);
void stjem_net_free(stjem_net* net);

/* ---- operations ---- */

/* Trains on train_data (eval_data may be NULL to evaluate on the training
 * set). When out_dir is non-NULL, writes checkpoint.net / checkpoint.state
 * plus metrics.csv, eval.csv and events.csv there. */
int stjem_train(const stjem_config* cfg, const stjem_dataset* train_data,
                const stjem_dataset* eval_data, const char* out_dir, stjem_net** out_net);

int stjem_evaluate(const stjem_net* net, const stjem_dataset* data, double* accuracy,
                   double* ece_out, double* mean_xent);

/* n SGLD chains from uniform starts; class_index -1 samples the marginal.
 * out_xs must hold n * dx doubles. diagnostics_csv, when non-NULL, receives
 * the (step, energy, step_size) trace of the first chain. */
int stjem_sample(const stjem_net* net, int class_index, int n, int n_steps, double step_size,
                 double noise_scale, uint64_t seed, double* out_xs, const char* diagnostics_csv);

/* Greedy (zero-noise, backtracking) chains from the given points. */
int stjem_denoise(const stjem_net* net, const double* xs, int n, int dx, int class_index,
                  int n_steps, double step_size, double* out_xs);

int stjem_combine_logits(const stjem_net* const* members, int n_members, const double* x, int dx,
                         double* logits_out, int dy);

/* Per-member and combined accuracy/ECE on every dataset, written as a
 * comparison CSV (dataset, model_id, accuracy, ece). */
int stjem_combine_eval(const stjem_net* const* members, int n_members,
                       const stjem_dataset* const* datasets, int n_datasets,
                       const char* out_csv_path);

/* Runs the oracle-vs-estimator suite on a fresh seeded net. Writes a
 * human-readable report into report_buf and sets *all_pass. */
int stjem_oracle_check(int grid_points, uint64_t seed, char* report_buf, size_t report_buflen,
                       int* all_pass);

/* Binary P6 scatter image of 2-D points; labels may be NULL. */
int stjem_write_scatter_ppm(const char* path, const double* xs, int n, int dx, const int* labels,
                            int image_size);

#ifdef __cplusplus
}
#endif

#endif /* STJEM_H */
