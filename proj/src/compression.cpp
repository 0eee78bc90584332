#include "bdc/compression.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bdc/adam.hpp"
#include "bdc/data.hpp"
#include "bdc/rng.hpp"
#include "bdc/training.hpp"

namespace bdc {
namespace {

// Candidate objectives closer than this are ties, so permutations of the same
// rows (equal up to summation-order rounding) resolve to the lowest index.
constexpr double kSeedTieTol = 1e-14;

AdamConfig adam_config(const CompressConfig& cfg) {
  return {cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps};
}

void require_finite(double objective, Index step) {
  if (!std::isfinite(objective))
    fail(ErrorCode::Divergence, "compress: objective became non-finite at step " + std::to_string(step));
}

void check_one_hot(const Matrix& r) {
  for (Index i = 0; i < r.rows(); ++i) {
    int ones = 0;
    for (Index j = 0; j < r.cols(); ++j) {
      if (r(i, j) == 1.0) {
        ++ones;
      } else if (r(i, j) != 0.0) {
        ones = -1;
        break;
      }
    }
    if (ones != 1)
      fail(ErrorCode::InvalidArgument, "compress_joint: response row " + std::to_string(i) + " is not one-hot");
  }
}

// Generic descent loop over a flat parameter vector. `eval` fills the gradient
// and returns the objective for the given parameters.
template <class Eval>
Vector descend(Vector params, const CompressConfig& cfg, Eval&& eval, CompressedSet& out) {
  Adam adam(adam_config(cfg), params.size());
  Vector best = params;
  double best_obj = std::numeric_limits<double>::infinity();
  Vector grad;
  for (Index step = 0;; ++step) {
    const double obj = eval(params, grad);
    require_finite(obj, step);
    const double gn = grad.norm();
    out.history.push_back({step, obj, gn});
    if (obj <= best_obj) {
      best_obj = obj;
      best = params;
    }
    if (gn < cfg.grad_tol) {
      out.converged = true;
      break;
    }
    if (step == cfg.max_steps) break;
    params += adam.step(grad);
  }
  return best;
}

}  // namespace

void CompressConfig::validate(Index n) const {
  if (m < 1) fail(ErrorCode::InvalidArgument, "compress: m must be positive");
  if (m > n)
    fail(ErrorCode::InvalidArgument,
         "compress: m = " + std::to_string(m) + " exceeds the " + std::to_string(n) + " available points");
  require(candidates >= 1, "compress: candidates must be positive");
  require(max_steps >= 0, "compress: max_steps must be non-negative");
  require(learning_rate > 0.0, "compress: learning rate must be positive");
  require(grad_tol > 0.0, "compress: grad_tol must be positive");
}

std::vector<std::vector<Index>> draw_candidates(Index n, const CompressConfig& cfg) {
  cfg.validate(n);
  RngStream rng = RngStream(cfg.seed).split(0);
  std::vector<std::vector<Index>> out;
  out.reserve(static_cast<std::size_t>(cfg.candidates));
  for (Index c = 0; c < cfg.candidates; ++c) out.push_back(rng.sample_without_replacement(n, cfg.m));
  return out;
}

SeedChoice choose_seed(const Matrix& encoded, const CompressConfig& cfg, const Kernel& kernel) {
  const EmmdObjective objective(kernel, encoded);
  const auto candidates = draw_candidates(encoded.rows(), cfg);
  SeedChoice best{-1, {}, std::numeric_limits<double>::infinity()};
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const double v = objective.value(gather_rows(encoded, candidates[c]));
    if (best.candidate < 0 || v < best.objective - kSeedTieTol) best = {static_cast<Index>(c), candidates[c], v};
  }
  return best;
}

Matrix seed_select(const Matrix& encoded, const CompressConfig& cfg, const Kernel& kernel) {
  return gather_rows(encoded, choose_seed(encoded, cfg, kernel).rows);
}

CompressedSet compress(const Matrix& encoded, const CompressConfig& cfg, const Kernel& kernel) {
  if (!kernel.differentiable()) fail(ErrorCode::Unsupported, "compress: kernel is not differentiable");
  const EmmdObjective objective(kernel, encoded);
  const Index m = cfg.m;
  const Index p = encoded.cols();

  CompressedSet out;
  Matrix z = seed_select(encoded, cfg, kernel);
  Matrix g;
  const Vector best = descend(
      Vector(flat(z)), cfg,
      [&](const Vector& params, Vector& grad) {
        flat(z) = params;
        const double v = objective.value_and_grad(z, g);
        grad = flat(g);
        return v;
      },
      out);
  out.latents = Matrix(m, p);
  flat(out.latents) = best;
  return out;
}

CompressedSet compress_joint(const LabelledSet& encoded, const CompressConfig& cfg, const Kernel& feature_kernel,
                             const Kernel& response_kernel, ResponseMode mode) {
  encoded.validate();
  if (encoded.responses.cols() == 0) fail(ErrorCode::InvalidArgument, "compress_joint: responses are missing");
  if (mode == ResponseMode::OneHot) check_one_hot(encoded.responses);
  if (!feature_kernel.differentiable() || !response_kernel.differentiable())
    fail(ErrorCode::Unsupported, "compress_joint: kernels must be differentiable");

  const JointEmmdObjective objective(feature_kernel, response_kernel, encoded);
  const Index m = cfg.m;
  const Index p = encoded.features.cols();
  const Index q = encoded.responses.cols();

  const auto candidates = draw_candidates(encoded.size(), cfg);
  LabelledSet current;
  double best_seed = std::numeric_limits<double>::infinity();
  for (const auto& rows : candidates) {
    LabelledSet c{gather_rows(encoded.features, rows), gather_rows(encoded.responses, rows)};
    const double v = objective.value(c);
    if (current.features.size() == 0 || v < best_seed - kSeedTieTol) {
      best_seed = v;
      current = std::move(c);
    }
  }

  CompressedSet out;
  JointGradient g;
  Vector params(m * (p + q));
  params.head(m * p) = flat(current.features);
  params.tail(m * q) = flat(current.responses);
  const Vector best = descend(
      std::move(params), cfg,
      [&](const Vector& x, Vector& grad) {
        flat(current.features) = x.head(m * p);
        flat(current.responses) = x.tail(m * q);
        const double v = objective.value_and_grad(current, g);
        grad.resize(x.size());
        grad.head(m * p) = flat(g.features);
        grad.tail(m * q) = flat(g.responses);
        return v;
      },
      out);

  out.latents = Matrix(m, p);
  flat(out.latents) = best.head(m * p);
  Matrix w(m, q);
  flat(w) = best.tail(m * q);
  if (mode == ResponseMode::OneHot) w = one_hot(argmax_project(w), q);
  out.responses = std::move(w);
  return out;
}

EvaluationReport evaluate(const Matrix& data, const AutoencoderModel& model, const Matrix& latents,
                          const Kernel& ambient_kernel, const Kernel& latent_kernel) {
  if (data.cols() != ambient_dim(model))
    fail(ErrorCode::InvalidArgument, "evaluate: data width does not match the model");
  if (latents.cols() != latent_dim(model))
    fail(ErrorCode::InvalidArgument, "evaluate: compressed set width does not match the model latent dimension");
  const Matrix encoded = encode(model, data);
  const Matrix recon = decode(model, encoded);
  const Matrix decoded = decode(model, latents);

  EvaluationReport r{};
  r.rmmd_sq = rmmd_sq(ambient_kernel, data, recon);
  r.emmd_sq = emmd_sq(latent_kernel, encoded, latents);
  r.dmmd_sq = dmmd_sq(ambient_kernel, data, decoded);
  const double root = std::sqrt(r.rmmd_sq) + std::sqrt(r.emmd_sq);
  r.bound = root * root;
  r.bound_satisfied = r.dmmd_sq <= r.bound + 1e-9;
  r.pullback = latent_kernel.kind() == KernelKind::PullBack;
  return r;
}

}  // namespace bdc
