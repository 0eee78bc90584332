#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bdc/adam.hpp"
#include "bdc/kernels.hpp"
#include "bdc/rng.hpp"
#include "bdc/types.hpp"

namespace bdc {

/// Minibatch settings shared by the linear and neural autoencoders.
struct TrainConfig {
  Index epochs = 10;
  Index batch_size = 64;  // clamped to n at use
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamConfig adam() const { return {learning_rate, beta1, beta2, eps}; }
  void validate() const;
};

/// Responses paired row-for-row with the training features. When present the
/// reconstruction objective becomes the joint MMD with the response kernel.
struct ResponseTerm {
  Matrix values;
  Kernel kernel;
};

struct TrainHooks {
  /// Called once per epoch with the mean of the pre-update batch losses.
  std::function<void(Index epoch, double mean_loss)> on_epoch;
  /// Linear training only: the encoder before the step, the tangent-projected
  /// gradient taken there, and the encoder after retraction.
  std::function<void(const Matrix& before, const Matrix& tangent_grad, const Matrix& after)> on_stiefel_step;
};

/// Row order for one epoch's minibatches: a fresh permutation per epoch.
std::vector<std::vector<Index>> epoch_batches(Index n, Index batch_size, RngStream& rng);

Matrix gather_rows(const Matrix& m, const std::vector<Index>& rows);

}  // namespace bdc
