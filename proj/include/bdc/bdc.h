/*
 * C interface to the distribution compression library.
 *
 * Every object is an opaque handle created by a bdc_*_create / load / train
 * call and released with the matching bdc_*_free. Functions that can fail
 * return a bdc_status; on failure bdc_last_error() describes the problem for
 * the calling thread until its next call into the library.
 */
#ifndef BDC_BDC_H
#define BDC_BDC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(BDC_BUILDING_LIBRARY)
#define BDC_API __declspec(dllexport)
#else
#define BDC_API __declspec(dllimport)
#endif
#else
#define BDC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bdc_status {
  BDC_OK = 0,
  BDC_ERR_INVALID_ARGUMENT = 1,
  BDC_ERR_UNSUPPORTED = 2,
  BDC_ERR_DEGENERATE_SCALE = 3,
  BDC_ERR_NUMERICAL_RANK = 4,
  BDC_ERR_DIVERGENCE = 5,
  BDC_ERR_IO = 6,
  BDC_ERR_PARSE = 7,
  BDC_ERR_EMPTY_INPUT = 8,
  BDC_ERR_INTERNAL = 9
} bdc_status;

typedef struct bdc_matrix bdc_matrix;
typedef struct bdc_kernel bdc_kernel;
typedef struct bdc_model bdc_model;
typedef struct bdc_mixture bdc_mixture;

BDC_API const char* bdc_version(void);
BDC_API const char* bdc_status_name(bdc_status status);
/* Message for the last failed call on this thread; "" if none. */
BDC_API const char* bdc_last_error(void);
/* Frees strings returned through char** out-parameters. */
BDC_API void bdc_string_free(char* s);

/* ---- matrices (row-major, one point per row) ---- */

/* `data` may be NULL, giving a zero matrix. */
BDC_API bdc_status bdc_matrix_create(size_t rows, size_t cols, const double* data, bdc_matrix** out);
BDC_API void bdc_matrix_free(bdc_matrix* m);
BDC_API size_t bdc_matrix_rows(const bdc_matrix* m);
BDC_API size_t bdc_matrix_cols(const bdc_matrix* m);
BDC_API const double* bdc_matrix_data(const bdc_matrix* m);
/* Columns [first, first + count). */
BDC_API bdc_status bdc_matrix_columns(const bdc_matrix* m, size_t first, size_t count, bdc_matrix** out);
/* [a | b]; row counts must agree. */
BDC_API bdc_status bdc_matrix_hconcat(const bdc_matrix* a, const bdc_matrix* b, bdc_matrix** out);

/* ---- CSV ---- */

/* `header` (optional) receives the header row joined by commas, or "" when
 * the file has none; release it with bdc_string_free. */
BDC_API bdc_status bdc_csv_load(const char* path, bdc_matrix** out, char** header);
/* `header` is a comma-joined list of names, or NULL for x0..x{d-1}. */
BDC_API bdc_status bdc_csv_save(const char* path, const bdc_matrix* m, const char* header);

/* ---- data generation ---- */

BDC_API bdc_status bdc_generate_gaussian_mixture(size_t n, uint64_t seed, bdc_matrix** points,
                                                 bdc_mixture** mixture);
BDC_API bdc_status bdc_generate_swiss_roll(size_t n, uint64_t seed, double response_noise, bdc_matrix** points,
                                           bdc_matrix** responses);
BDC_API bdc_status bdc_project_random_gaussian(const bdc_matrix* x, size_t dim, uint64_t seed,
                                               bdc_matrix** projected, bdc_matrix** projection);
BDC_API bdc_status bdc_project_random_tanh(const bdc_matrix* x, size_t dim, size_t hidden, uint64_t seed,
                                           bdc_matrix** projected);

/* ---- Gaussian mixtures ---- */

BDC_API void bdc_mixture_free(bdc_mixture* gm);
BDC_API bdc_status bdc_mixture_save(const char* path, const bdc_mixture* gm);
BDC_API bdc_status bdc_mixture_load(const char* path, bdc_mixture** out);
BDC_API bdc_status bdc_mixture_pushforward(const bdc_mixture* gm, const bdc_matrix* a, bdc_mixture** out);
/* Exact MMD^2 between the mixture and the rows of `points` under a Gaussian
 * kernel with the given lengthscale. */
BDC_API bdc_status bdc_exact_mmd_sq_vs_points(const bdc_mixture* gm, const bdc_matrix* points, double lengthscale,
                                              double* out);

/* ---- kernels ---- */

BDC_API bdc_status bdc_kernel_gaussian(double lengthscale, bdc_kernel** out);
BDC_API bdc_status bdc_kernel_imq(double lengthscale, bdc_kernel** out);
BDC_API bdc_status bdc_kernel_quadratic(bdc_kernel** out);
/* h(z, z') = base(decode(z), decode(z')) with the model's decoder. */
BDC_API bdc_status bdc_kernel_pullback(const bdc_kernel* base, const bdc_model* model, bdc_kernel** out);
BDC_API void bdc_kernel_free(bdc_kernel* k);
/* Lengthscale of a Gaussian or IMQ kernel. */
BDC_API bdc_status bdc_kernel_lengthscale(const bdc_kernel* k, double* out);
BDC_API bdc_status bdc_median_heuristic(const bdc_matrix* points, size_t cap, uint64_t seed, double* out);
BDC_API bdc_status bdc_mmd_sq(const bdc_kernel* k, const bdc_matrix* a, const bdc_matrix* b, double* out);

/* ---- autoencoders ---- */

typedef struct bdc_train_config {
  size_t epochs;
  size_t batch_size;
  double learning_rate;
  uint64_t seed;
  double beta1;
  double beta2;
  double eps;
} bdc_train_config;

BDC_API bdc_train_config bdc_train_config_default(void);

typedef enum bdc_linear_init { BDC_INIT_PCA = 0, BDC_INIT_GAUSSIAN = 1 } bdc_linear_init;
typedef enum bdc_model_kind { BDC_MODEL_LINEAR = 0, BDC_MODEL_MLP = 1 } bdc_model_kind;

/* Called after every epoch with the mean batch loss. */
typedef void (*bdc_epoch_callback)(void* user, size_t epoch, double loss);

/* `responses` and `response_kernel` are both NULL for unlabelled training. */
BDC_API bdc_status bdc_train_linear(const bdc_matrix* x, size_t latent_dim, const bdc_kernel* kernel,
                                    const bdc_train_config* cfg, bdc_linear_init init, const bdc_matrix* responses,
                                    const bdc_kernel* response_kernel, bdc_epoch_callback on_epoch, void* user,
                                    bdc_model** out);
BDC_API bdc_status bdc_train_mlp(const bdc_matrix* x, const size_t* hidden, size_t hidden_count, size_t latent_dim,
                                 const bdc_kernel* kernel, const bdc_train_config* cfg, const bdc_matrix* responses,
                                 const bdc_kernel* response_kernel, bdc_epoch_callback on_epoch, void* user,
                                 bdc_model** out);

BDC_API void bdc_model_free(bdc_model* m);
BDC_API bdc_status bdc_model_save(const char* path, const bdc_model* m);
BDC_API bdc_status bdc_model_load(const char* path, bdc_model** out);
BDC_API bdc_model_kind bdc_model_get_kind(const bdc_model* m);
BDC_API size_t bdc_model_ambient_dim(const bdc_model* m);
BDC_API size_t bdc_model_latent_dim(const bdc_model* m);
BDC_API bdc_status bdc_model_encode(const bdc_model* m, const bdc_matrix* x, bdc_matrix** out);
BDC_API bdc_status bdc_model_decode(const bdc_model* m, const bdc_matrix* z, bdc_matrix** out);

/* ---- compression ---- */

typedef struct bdc_compress_config {
  size_t m;
  size_t candidates;
  size_t max_steps;
  double learning_rate;
  double grad_tol;
  uint64_t seed;
  double beta1;
  double beta2;
  double eps;
} bdc_compress_config;

BDC_API bdc_compress_config bdc_compress_config_default(void);

typedef enum bdc_response_mode { BDC_RESPONSES_CONTINUOUS = 0, BDC_RESPONSES_ONE_HOT = 1 } bdc_response_mode;

/* Replays the descent history after a run: one call per evaluated iterate. */
typedef void (*bdc_step_callback)(void* user, size_t step, double objective, double grad_norm);

BDC_API bdc_status bdc_compress(const bdc_matrix* encoded, const bdc_compress_config* cfg, const bdc_kernel* kernel,
                                bdc_step_callback on_step, void* user, bdc_matrix** latents);
BDC_API bdc_status bdc_compress_joint(const bdc_matrix* encoded, const bdc_matrix* responses,
                                      const bdc_compress_config* cfg, const bdc_kernel* feature_kernel,
                                      const bdc_kernel* response_kernel, bdc_response_mode mode,
                                      bdc_step_callback on_step, void* user, bdc_matrix** latents,
                                      bdc_matrix** compressed_responses);

/* ---- evaluation ---- */

typedef struct bdc_report {
  double rmmd_sq;
  double emmd_sq;
  double dmmd_sq;
  double bound;
  int bound_satisfied;
  int pullback;
} bdc_report;

BDC_API bdc_status bdc_evaluate(const bdc_matrix* data, const bdc_model* model, const bdc_matrix* latents,
                                const bdc_kernel* ambient_kernel, const bdc_kernel* latent_kernel, bdc_report* out);

#ifdef __cplusplus
}
#endif

#endif /* BDC_BDC_H */
