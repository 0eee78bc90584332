#include "bdc/bdc.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <new>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bdc/compression.hpp"
#include "bdc/data.hpp"
#include "bdc/exact_gaussian.hpp"
#include "bdc/kernels.hpp"
#include "bdc/model.hpp"

struct bdc_matrix {
  bdc::Matrix m;
};
struct bdc_kernel {
  bdc::Kernel k;
};
struct bdc_model {
  bdc::AutoencoderModel model;
};
struct bdc_mixture {
  bdc::GaussianMixture gm;
};

namespace {

thread_local std::string g_last_error;

bdc_status to_status(bdc::ErrorCode code) {
  switch (code) {
    case bdc::ErrorCode::InvalidArgument: return BDC_ERR_INVALID_ARGUMENT;
    case bdc::ErrorCode::Unsupported: return BDC_ERR_UNSUPPORTED;
    case bdc::ErrorCode::DegenerateScale: return BDC_ERR_DEGENERATE_SCALE;
    case bdc::ErrorCode::NumericalRank: return BDC_ERR_NUMERICAL_RANK;
    case bdc::ErrorCode::Divergence: return BDC_ERR_DIVERGENCE;
    case bdc::ErrorCode::Io: return BDC_ERR_IO;
    case bdc::ErrorCode::Parse: return BDC_ERR_PARSE;
    case bdc::ErrorCode::EmptyInput: return BDC_ERR_EMPTY_INPUT;
  }
  return BDC_ERR_INTERNAL;
}

// Runs `fn`, translating exceptions into status codes and the thread-local
// error message. Nothing may throw across the C boundary.
template <class F>
bdc_status guarded(F&& fn) noexcept {
  g_last_error.clear();
  try {
    fn();
    return BDC_OK;
  } catch (const bdc::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return BDC_ERR_INTERNAL;
}

template <class T>
const T& deref(const T* p, const char* name) {
  if (!p) bdc::fail(bdc::ErrorCode::InvalidArgument, std::string(name) + " is null");
  return *p;
}

std::filesystem::path path_arg(const char* p) {
  if (!p) bdc::fail(bdc::ErrorCode::InvalidArgument, "path is null");
  return p;
}

template <class T>
void check_out(T** out, const char* name) {
  if (!out) bdc::fail(bdc::ErrorCode::InvalidArgument, std::string(name) + " is null");
}

bdc_matrix* wrap(bdc::Matrix m) { return new bdc_matrix{std::move(m)}; }

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<std::string> split_header(const char* header) {
  std::vector<std::string> names;
  if (!header) return names;
  std::string cur;
  for (const char* c = header; *c; ++c) {
    if (*c == ',') {
      names.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(*c);
    }
  }
  names.push_back(cur);
  return names;
}

bdc::TrainConfig to_core(const bdc_train_config& c) {
  bdc::TrainConfig t;
  t.epochs = static_cast<bdc::Index>(c.epochs);
  t.batch_size = static_cast<bdc::Index>(c.batch_size);
  t.learning_rate = c.learning_rate;
  t.seed = c.seed;
  t.beta1 = c.beta1;
  t.beta2 = c.beta2;
  t.eps = c.eps;
  return t;
}

bdc::CompressConfig to_core(const bdc_compress_config& c) {
  bdc::CompressConfig t;
  t.m = static_cast<bdc::Index>(c.m);
  t.candidates = static_cast<bdc::Index>(c.candidates);
  t.max_steps = static_cast<bdc::Index>(c.max_steps);
  t.learning_rate = c.learning_rate;
  t.grad_tol = c.grad_tol;
  t.seed = c.seed;
  t.beta1 = c.beta1;
  t.beta2 = c.beta2;
  t.eps = c.eps;
  return t;
}

std::optional<bdc::ResponseTerm> response_term(const bdc_matrix* responses, const bdc_kernel* kernel) {
  if (!responses && !kernel) return std::nullopt;
  if (!responses || !kernel)
    bdc::fail(bdc::ErrorCode::InvalidArgument, "responses and response_kernel must be given together");
  return bdc::ResponseTerm{responses->m, kernel->k};
}

bdc::TrainHooks epoch_hooks(bdc_epoch_callback cb, void* user) {
  bdc::TrainHooks hooks;
  if (cb)
    hooks.on_epoch = [cb, user](bdc::Index epoch, double loss) { cb(user, static_cast<size_t>(epoch), loss); };
  return hooks;
}

void replay(const bdc::CompressedSet& set, bdc_step_callback cb, void* user) {
  if (!cb) return;
  for (const auto& r : set.history) cb(user, static_cast<size_t>(r.step), r.objective, r.grad_norm);
}

}  // namespace

extern "C" {

const char* bdc_version(void) { return "0.1.0"; }

const char* bdc_status_name(bdc_status status) {
  switch (status) {
    case BDC_OK: return "ok";
    case BDC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case BDC_ERR_UNSUPPORTED: return "unsupported operation";
    case BDC_ERR_DEGENERATE_SCALE: return "degenerate scale";
    case BDC_ERR_NUMERICAL_RANK: return "numerical rank";
    case BDC_ERR_DIVERGENCE: return "divergence";
    case BDC_ERR_IO: return "io error";
    case BDC_ERR_PARSE: return "parse error";
    case BDC_ERR_EMPTY_INPUT: return "empty input";
    case BDC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* bdc_last_error(void) { return g_last_error.c_str(); }

void bdc_string_free(char* s) { std::free(s); }

bdc_status bdc_matrix_create(size_t rows, size_t cols, const double* data, bdc_matrix** out) {
  return guarded([&] {
    check_out(out, "out");
    bdc::Matrix m = bdc::Matrix::Zero(static_cast<bdc::Index>(rows), static_cast<bdc::Index>(cols));
    if (data) std::memcpy(m.data(), data, rows * cols * sizeof(double));
    *out = wrap(std::move(m));
  });
}

void bdc_matrix_free(bdc_matrix* m) { delete m; }
size_t bdc_matrix_rows(const bdc_matrix* m) { return m ? static_cast<size_t>(m->m.rows()) : 0; }
size_t bdc_matrix_cols(const bdc_matrix* m) { return m ? static_cast<size_t>(m->m.cols()) : 0; }
const double* bdc_matrix_data(const bdc_matrix* m) { return m ? m->m.data() : nullptr; }

bdc_status bdc_matrix_columns(const bdc_matrix* m, size_t first, size_t count, bdc_matrix** out) {
  return guarded([&] {
    const auto& src = deref(m, "m").m;
    check_out(out, "out");
    if (first + count > static_cast<size_t>(src.cols()))
      bdc::fail(bdc::ErrorCode::InvalidArgument, "column range exceeds the matrix");
    *out = wrap(src.middleCols(static_cast<bdc::Index>(first), static_cast<bdc::Index>(count)));
  });
}

bdc_status bdc_matrix_hconcat(const bdc_matrix* a, const bdc_matrix* b, bdc_matrix** out) {
  return guarded([&] {
    const auto& ma = deref(a, "a").m;
    const auto& mb = deref(b, "b").m;
    check_out(out, "out");
    if (ma.rows() != mb.rows()) bdc::fail(bdc::ErrorCode::InvalidArgument, "hconcat: row counts differ");
    bdc::Matrix r(ma.rows(), ma.cols() + mb.cols());
    r << ma, mb;
    *out = wrap(std::move(r));
  });
}

bdc_status bdc_csv_load(const char* path, bdc_matrix** out, char** header) {
  return guarded([&] {
    path_arg(path);
    check_out(out, "out");
    auto table = bdc::load_csv(path);
    if (header) {
      std::string joined;
      for (std::size_t i = 0; i < table.header.size(); ++i) joined += (i ? "," : "") + table.header[i];
      *header = dup_string(joined);
    }
    *out = wrap(std::move(table.values));
  });
}

bdc_status bdc_csv_save(const char* path, const bdc_matrix* m, const char* header) {
  return guarded([&] { bdc::save_csv(path_arg(path), deref(m, "m").m, split_header(header)); });
}

bdc_status bdc_generate_gaussian_mixture(size_t n, uint64_t seed, bdc_matrix** points, bdc_mixture** mixture) {
  return guarded([&] {
    check_out(points, "points");
    auto sample = bdc::gen_gaussian_mixture_2d(static_cast<bdc::Index>(n), seed);
    if (mixture) *mixture = new bdc_mixture{std::move(sample.mixture)};
    *points = wrap(std::move(sample.points));
  });
}

bdc_status bdc_generate_swiss_roll(size_t n, uint64_t seed, double response_noise, bdc_matrix** points,
                                   bdc_matrix** responses) {
  return guarded([&] {
    check_out(points, "points");
    auto roll = bdc::gen_swiss_roll(static_cast<bdc::Index>(n), seed, response_noise);
    if (responses) *responses = wrap(bdc::Matrix(roll.responses));
    *points = wrap(std::move(roll.points));
  });
}

bdc_status bdc_project_random_gaussian(const bdc_matrix* x, size_t dim, uint64_t seed, bdc_matrix** projected,
                                       bdc_matrix** projection) {
  return guarded([&] {
    check_out(projected, "projected");
    auto p = bdc::project_random_gaussian(deref(x, "x").m, static_cast<bdc::Index>(dim), seed);
    if (projection) *projection = wrap(std::move(p.matrix));
    *projected = wrap(std::move(p.projected));
  });
}

bdc_status bdc_project_random_tanh(const bdc_matrix* x, size_t dim, size_t hidden, uint64_t seed,
                                   bdc_matrix** projected) {
  return guarded([&] {
    check_out(projected, "projected");
    *projected = wrap(bdc::project_random_tanh(deref(x, "x").m, static_cast<bdc::Index>(dim),
                                               static_cast<bdc::Index>(hidden), seed));
  });
}

void bdc_mixture_free(bdc_mixture* gm) { delete gm; }

bdc_status bdc_mixture_save(const char* path, const bdc_mixture* gm) {
  return guarded([&] { bdc::save_mixture(path_arg(path), deref(gm, "gm").gm); });
}

bdc_status bdc_mixture_load(const char* path, bdc_mixture** out) {
  return guarded([&] {
    check_out(out, "out");
    *out = new bdc_mixture{bdc::load_mixture(path_arg(path))};
  });
}

bdc_status bdc_mixture_pushforward(const bdc_mixture* gm, const bdc_matrix* a, bdc_mixture** out) {
  return guarded([&] {
    check_out(out, "out");
    *out = new bdc_mixture{bdc::pushforward_linear(deref(gm, "gm").gm, deref(a, "a").m)};
  });
}

bdc_status bdc_exact_mmd_sq_vs_points(const bdc_mixture* gm, const bdc_matrix* points, double lengthscale,
                                      double* out) {
  return guarded([&] {
    if (!out) bdc::fail(bdc::ErrorCode::InvalidArgument, "out is null");
    *out = bdc::exact_mmd_sq_vs_points(deref(gm, "gm").gm, deref(points, "points").m, lengthscale);
  });
}

bdc_status bdc_kernel_gaussian(double lengthscale, bdc_kernel** out) {
  return guarded([&] {
    check_out(out, "out");
    *out = new bdc_kernel{bdc::Kernel::gaussian(lengthscale)};
  });
}

bdc_status bdc_kernel_imq(double lengthscale, bdc_kernel** out) {
  return guarded([&] {
    check_out(out, "out");
    *out = new bdc_kernel{bdc::Kernel::imq(lengthscale)};
  });
}

bdc_status bdc_kernel_quadratic(bdc_kernel** out) {
  return guarded([&] {
    check_out(out, "out");
    *out = new bdc_kernel{bdc::Kernel::quadratic()};
  });
}

bdc_status bdc_kernel_pullback(const bdc_kernel* base, const bdc_model* model, bdc_kernel** out) {
  return guarded([&] {
    check_out(out, "out");
    *out = new bdc_kernel{bdc::Kernel::pull_back(deref(base, "base").k, bdc::make_decoder(deref(model, "model").model))};
  });
}

void bdc_kernel_free(bdc_kernel* k) { delete k; }

bdc_status bdc_kernel_lengthscale(const bdc_kernel* k, double* out) {
  return guarded([&] {
    if (!out) bdc::fail(bdc::ErrorCode::InvalidArgument, "out is null");
    *out = deref(k, "k").k.lengthscale();
  });
}

bdc_status bdc_median_heuristic(const bdc_matrix* points, size_t cap, uint64_t seed, double* out) {
  return guarded([&] {
    if (!out) bdc::fail(bdc::ErrorCode::InvalidArgument, "out is null");
    *out = bdc::median_heuristic(deref(points, "points").m, static_cast<bdc::Index>(cap), seed);
  });
}

bdc_status bdc_mmd_sq(const bdc_kernel* k, const bdc_matrix* a, const bdc_matrix* b, double* out) {
  return guarded([&] {
    if (!out) bdc::fail(bdc::ErrorCode::InvalidArgument, "out is null");
    *out = bdc::mmd_sq(deref(k, "k").k, deref(a, "a").m, deref(b, "b").m);
  });
}

bdc_train_config bdc_train_config_default(void) {
  const bdc::TrainConfig d;
  return {static_cast<size_t>(d.epochs), static_cast<size_t>(d.batch_size), d.learning_rate, d.seed,
          d.beta1, d.beta2, d.eps};
}

bdc_status bdc_train_linear(const bdc_matrix* x, size_t latent_dim, const bdc_kernel* kernel,
                            const bdc_train_config* cfg, bdc_linear_init init, const bdc_matrix* responses,
                            const bdc_kernel* response_kernel, bdc_epoch_callback on_epoch, void* user,
                            bdc_model** out) {
  return guarded([&] {
    check_out(out, "out");
    const auto core_init = init == BDC_INIT_PCA ? bdc::LinearInit::Pca : bdc::LinearInit::GaussianRandom;
    auto v = bdc::train_linear(deref(x, "x").m, static_cast<bdc::Index>(latent_dim), deref(kernel, "kernel").k,
                               to_core(deref(cfg, "cfg")), core_init, epoch_hooks(on_epoch, user),
                               response_term(responses, response_kernel));
    *out = new bdc_model{std::move(v)};
  });
}

bdc_status bdc_train_mlp(const bdc_matrix* x, const size_t* hidden, size_t hidden_count, size_t latent_dim,
                         const bdc_kernel* kernel, const bdc_train_config* cfg, const bdc_matrix* responses,
                         const bdc_kernel* response_kernel, bdc_epoch_callback on_epoch, void* user,
                         bdc_model** out) {
  return guarded([&] {
    check_out(out, "out");
    if (hidden_count && !hidden) bdc::fail(bdc::ErrorCode::InvalidArgument, "hidden is null");
    std::vector<bdc::Index> widths(hidden, hidden + hidden_count);
    auto m = bdc::train_nonlinear(deref(x, "x").m, widths, static_cast<bdc::Index>(latent_dim),
                                  deref(kernel, "kernel").k, to_core(deref(cfg, "cfg")), epoch_hooks(on_epoch, user),
                                  response_term(responses, response_kernel));
    *out = new bdc_model{std::move(m)};
  });
}

void bdc_model_free(bdc_model* m) { delete m; }

bdc_status bdc_model_save(const char* path, const bdc_model* m) {
  return guarded([&] { bdc::save_model(path_arg(path), deref(m, "m").model); });
}

bdc_status bdc_model_load(const char* path, bdc_model** out) {
  return guarded([&] {
    check_out(out, "out");
    *out = new bdc_model{bdc::load_model(path_arg(path))};
  });
}

bdc_model_kind bdc_model_get_kind(const bdc_model* m) {
  return m && std::holds_alternative<bdc::Mlp>(m->model) ? BDC_MODEL_MLP : BDC_MODEL_LINEAR;
}

size_t bdc_model_ambient_dim(const bdc_model* m) {
  return m ? static_cast<size_t>(bdc::ambient_dim(m->model)) : 0;
}

size_t bdc_model_latent_dim(const bdc_model* m) { return m ? static_cast<size_t>(bdc::latent_dim(m->model)) : 0; }

bdc_status bdc_model_encode(const bdc_model* m, const bdc_matrix* x, bdc_matrix** out) {
  return guarded([&] {
    check_out(out, "out");
    *out = wrap(bdc::encode(deref(m, "m").model, deref(x, "x").m));
  });
}

bdc_status bdc_model_decode(const bdc_model* m, const bdc_matrix* z, bdc_matrix** out) {
  return guarded([&] {
    check_out(out, "out");
    *out = wrap(bdc::decode(deref(m, "m").model, deref(z, "z").m));
  });
}

bdc_compress_config bdc_compress_config_default(void) {
  const bdc::CompressConfig d;
  return {static_cast<size_t>(d.m), static_cast<size_t>(d.candidates), static_cast<size_t>(d.max_steps),
          d.learning_rate, d.grad_tol, d.seed, d.beta1, d.beta2, d.eps};
}

bdc_status bdc_compress(const bdc_matrix* encoded, const bdc_compress_config* cfg, const bdc_kernel* kernel,
                        bdc_step_callback on_step, void* user, bdc_matrix** latents) {
  return guarded([&] {
    check_out(latents, "latents");
    auto set = bdc::compress(deref(encoded, "encoded").m, to_core(deref(cfg, "cfg")), deref(kernel, "kernel").k);
    replay(set, on_step, user);
    *latents = wrap(std::move(set.latents));
  });
}

bdc_status bdc_compress_joint(const bdc_matrix* encoded, const bdc_matrix* responses, const bdc_compress_config* cfg,
                              const bdc_kernel* feature_kernel, const bdc_kernel* response_kernel,
                              bdc_response_mode mode, bdc_step_callback on_step, void* user, bdc_matrix** latents,
                              bdc_matrix** compressed_responses) {
  return guarded([&] {
    check_out(latents, "latents");
    check_out(compressed_responses, "compressed_responses");
    const bdc::LabelledSet data{deref(encoded, "encoded").m, deref(responses, "responses").m};
    auto set = bdc::compress_joint(data, to_core(deref(cfg, "cfg")), deref(feature_kernel, "feature_kernel").k,
                                   deref(response_kernel, "response_kernel").k,
                                   mode == BDC_RESPONSES_ONE_HOT ? bdc::ResponseMode::OneHot
                                                                 : bdc::ResponseMode::Continuous);
    replay(set, on_step, user);
    bdc_matrix* w = wrap(std::move(*set.responses));
    *latents = wrap(std::move(set.latents));
    *compressed_responses = w;
  });
}

bdc_status bdc_evaluate(const bdc_matrix* data, const bdc_model* model, const bdc_matrix* latents,
                        const bdc_kernel* ambient_kernel, const bdc_kernel* latent_kernel, bdc_report* out) {
  return guarded([&] {
    if (!out) bdc::fail(bdc::ErrorCode::InvalidArgument, "out is null");
    const auto r = bdc::evaluate(deref(data, "data").m, deref(model, "model").model, deref(latents, "latents").m,
                                 deref(ambient_kernel, "ambient_kernel").k, deref(latent_kernel, "latent_kernel").k);
    *out = {r.rmmd_sq, r.emmd_sq, r.dmmd_sq, r.bound, r.bound_satisfied ? 1 : 0, r.pullback ? 1 : 0};
  });
}

}  // extern "C"
