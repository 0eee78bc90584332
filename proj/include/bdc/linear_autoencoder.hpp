#pragma once

#include <optional>

#include "bdc/kernels.hpp"
#include "bdc/training.hpp"
#include "bdc/types.hpp"

namespace bdc {

/// d x p matrix with orthonormal columns. Encoder x -> xV, decoder z -> zV^T,
/// so the autoencoder is the idempotent projection x -> x V V^T.
class StiefelPoint {
 public:
  /// Throws unless |V^T V - I|_F < tol.
  explicit StiefelPoint(Matrix v, double tol = 1e-8);

  const Matrix& matrix() const { return v_; }
  Index ambient_dim() const { return v_.rows(); }
  Index latent_dim() const { return v_.cols(); }
  double orthonormality_error() const;

 private:
  Matrix v_;
};

Matrix encode(const StiefelPoint& v, const Matrix& x);
Matrix decode(const StiefelPoint& v, const Matrix& z);

/// G - V sym(V^T G): projection onto the tangent space at V.
Matrix tangent_project(const StiefelPoint& v, const Matrix& g);

/// Q factor of the thin QR decomposition of `a`, with R's diagonal made
/// positive. Throws ErrorCode::NumericalRank when `a` is rank deficient.
StiefelPoint orthonormalize(const Matrix& a);

/// orthonormalize(V + step).
StiefelPoint qr_retract(const StiefelPoint& v, const Matrix& step);

/// Euclidean gradient with respect to V of rmmd_sq(kernel, X, X V V^T), or of
/// the reconstruction joint MMD when `response_gram` is given.
Matrix rmmd_grad_V(const Kernel& kernel, const Matrix& x, const StiefelPoint& v,
                   const Matrix* response_gram = nullptr);

struct PcaBasis {
  StiefelPoint basis;
  Vector eigenvalues;  // top p, descending
  bool degenerate;     // fewer than p strictly positive eigenvalues
};

/// Top-p eigenvectors of the sample covariance of the column-centered data.
PcaBasis pca_basis(const Matrix& x, Index p);
StiefelPoint pca_init(const Matrix& x, Index p);

enum class LinearInit { Pca, GaussianRandom };

/// N(0, 1/d) entries, orthonormalized.
StiefelPoint gaussian_init(Index d, Index p, RngStream& rng);

/// Minibatch Adam on tangent-projected RMMD gradients with a QR retraction
/// after every step.
StiefelPoint train_linear(const Matrix& x, Index p, const Kernel& kernel, const TrainConfig& cfg,
                          LinearInit init, const TrainHooks& hooks = {},
                          const std::optional<ResponseTerm>& responses = std::nullopt);

class LinearDecoder final : public Decoder {
 public:
  explicit LinearDecoder(StiefelPoint v) : v_(std::move(v)) {}
  Index latent_dim() const override { return v_.latent_dim(); }
  Index ambient_dim() const override { return v_.ambient_dim(); }
  Matrix decode(const Matrix& latents) const override { return bdc::decode(v_, latents); }

 private:
  StiefelPoint v_;
};

}  // namespace bdc
