#pragma once

#include <optional>
#include <vector>

#include "bdc/kernels.hpp"
#include "bdc/rng.hpp"
#include "bdc/training.hpp"
#include "bdc/types.hpp"

namespace bdc {

/// Affine layer applied to row batches: out = in * weights + bias.
struct DenseLayer {
  Matrix weights;  // in x out
  Vector bias;     // out

  Index in() const { return weights.rows(); }
  Index out() const { return weights.cols(); }
};

/// Fully connected autoencoder. Hidden layers use ReLU; the last layer of the
/// encoder and the last layer of the decoder are linear. The decoder does not
/// share weights with the encoder.
struct Mlp {
  std::vector<DenseLayer> encoder;
  std::vector<DenseLayer> decoder;

  Index input_dim() const { return encoder.front().in(); }
  Index latent_dim() const { return encoder.back().out(); }
  /// Throws unless widths chain d -> ... -> p -> ... -> d and every parameter is finite.
  void validate() const;
  Index parameter_count() const;
};

/// Same layout as Mlp, holding derivatives.
struct MlpGrads {
  std::vector<DenseLayer> encoder;
  std::vector<DenseLayer> decoder;
};

/// He initialization: weights ~ N(0, 2 / fan_in), biases zero. The decoder
/// mirrors the encoder's hidden widths.
Mlp init_mlp(Index input_dim, const std::vector<Index>& hidden, Index latent_dim, RngStream& rng);

Matrix mlp_encode(const Mlp& m, const Matrix& x);
Matrix mlp_decode(const Mlp& m, const Matrix& z);

struct HybridResult {
  double loss;
  MlpGrads grads;
};

/// rmmd_sq + msre of the batch reconstruction (the reconstruction joint MMD
/// replaces rmmd_sq when responses are given) and its exact gradient with
/// respect to every weight and bias.
HybridResult hybrid_backward(const Mlp& m, const Matrix& x, const Kernel& kernel,
                             const ResponseTerm* responses = nullptr);

/// Minibatch Adam on the hybrid objective.
Mlp train_nonlinear(const Matrix& x, const std::vector<Index>& hidden, Index latent_dim, const Kernel& kernel,
                    const TrainConfig& cfg, const TrainHooks& hooks = {},
                    const std::optional<ResponseTerm>& responses = std::nullopt);

Vector pack_parameters(const Mlp& m);
Vector pack_gradients(const MlpGrads& g);
void unpack_parameters(const Vector& flat, Mlp& m);

class MlpDecoder final : public Decoder {
 public:
  explicit MlpDecoder(Mlp m) : m_(std::move(m)) {}
  Index latent_dim() const override { return m_.latent_dim(); }
  Index ambient_dim() const override { return m_.decoder.back().out(); }
  Matrix decode(const Matrix& latents) const override { return mlp_decode(m_, latents); }

 private:
  Mlp m_;
};

}  // namespace bdc
