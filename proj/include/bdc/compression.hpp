#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bdc/estimators.hpp"
#include "bdc/kernels.hpp"
#include "bdc/model.hpp"
#include "bdc/types.hpp"

namespace bdc {

struct CompressConfig {
  Index m = 100;
  Index candidates = 10;
  Index max_steps = 1000;
  double learning_rate = 1e-2;
  double grad_tol = 1e-8;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  /// Checks ranges against a dataset of n rows.
  void validate(Index n) const;
};

struct DescentRecord {
  Index step;
  double objective;
  double grad_norm;  // Frobenius norm of the full gradient
};

struct CompressedSet {
  Matrix latents;
  std::optional<Matrix> responses;
  std::vector<DescentRecord> history;  // one record per evaluated iterate, step 0 is the seed
  bool converged = false;              // stopped on the gradient-norm threshold
};

/// The C candidate row subsets seed_select draws, in draw order. Each is a
/// uniform sample of m distinct rows; candidates are independent.
std::vector<std::vector<Index>> draw_candidates(Index n, const CompressConfig& cfg);

struct SeedChoice {
  Index candidate;         // index into draw_candidates()
  std::vector<Index> rows;
  double objective;
};

/// Picks the candidate with the smallest EMMD; ties go to the lowest index.
SeedChoice choose_seed(const Matrix& encoded, const CompressConfig& cfg, const Kernel& kernel);
Matrix seed_select(const Matrix& encoded, const CompressConfig& cfg, const Kernel& kernel);

/// Adam descent on EMMD from the best-of-C seed. Stops after max_steps updates
/// or once the gradient norm drops below grad_tol. Returns the iterate with the
/// lowest recorded objective, so the result is never worse than the seed.
CompressedSet compress(const Matrix& encoded, const CompressConfig& cfg, const Kernel& kernel);

enum class ResponseMode { Continuous, OneHot };

/// Joint descent of latents and responses on the joint EMMD. In one-hot mode
/// the responses are optimized in the continuous relaxation and projected
/// back to one-hot rows by argmax at the end.
CompressedSet compress_joint(const LabelledSet& encoded, const CompressConfig& cfg, const Kernel& feature_kernel,
                             const Kernel& response_kernel, ResponseMode mode);

struct EvaluationReport {
  double rmmd_sq;
  double emmd_sq;
  double dmmd_sq;
  double bound;          // (sqrt(rmmd_sq) + sqrt(emmd_sq))^2
  bool bound_satisfied;  // dmmd_sq <= bound + 1e-9
  bool pullback;         // latent kernel is a pull-back kernel
};

/// RMMD of the model's reconstruction, EMMD of the latents against the
/// encoded data, and DMMD of the decoded latents against the data.
EvaluationReport evaluate(const Matrix& data, const AutoencoderModel& model, const Matrix& latents,
                          const Kernel& ambient_kernel, const Kernel& latent_kernel);

}  // namespace bdc
