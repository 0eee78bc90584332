#pragma once

#include <cstdint>
#include <memory>
#include <variant>

#include "bdc/types.hpp"

namespace bdc {

/// Deterministic map from latent space R^p back to ambient space R^d.
class Decoder {
 public:
  virtual ~Decoder() = default;
  virtual Index latent_dim() const = 0;
  virtual Index ambient_dim() const = 0;
  /// Decodes each row of `latents`.
  virtual Matrix decode(const Matrix& latents) const = 0;
};

using DecoderHandle = std::shared_ptr<const Decoder>;

class Kernel;

struct GaussianKernel {
  double lengthscale;
};

/// (1 + |x-y|^2 / (2 l^2))^(-1/2)
struct ImqKernel {
  double lengthscale;
};

/// (1 + x.y)^2
struct QuadraticKernel {};

/// Product kernel on concatenated rows [feature | response]; the first
/// `feature_dim` coordinates go to the feature kernel.
struct TensorProductKernel {
  std::shared_ptr<const Kernel> feature;
  std::shared_ptr<const Kernel> response;
  Index feature_dim;
};

/// h(z, z') = base(decoder(z), decoder(z')).
struct PullBackKernel {
  std::shared_ptr<const Kernel> base;
  DecoderHandle decoder;
};

enum class KernelKind { Gaussian, Imq, Quadratic, TensorProduct, PullBack };

/// Immutable positive-definite kernel.
class Kernel {
 public:
  using Variant =
      std::variant<GaussianKernel, ImqKernel, QuadraticKernel, TensorProductKernel, PullBackKernel>;

  static Kernel gaussian(double lengthscale);
  static Kernel imq(double lengthscale);
  static Kernel quadratic();
  static Kernel tensor_product(const Kernel& feature, const Kernel& response, Index feature_dim);
  static Kernel pull_back(const Kernel& base, DecoderHandle decoder);

  KernelKind kind() const { return static_cast<KernelKind>(v_.index()); }
  const Variant& variant() const { return v_; }

  /// Lengthscale of a Gaussian or IMQ kernel; throws otherwise.
  double lengthscale() const;
  /// True for the variants grad_first supports.
  bool differentiable() const;

 private:
  explicit Kernel(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

double eval(const Kernel& kernel, Point x, Point y);

/// d k(x, y) / dx. Supported for Gaussian, IMQ and Quadratic.
Vector grad_first(const Kernel& kernel, Point x, Point y);

/// out += scale * d k(x, y) / dx, without allocating.
void accumulate_grad_first(const Kernel& kernel, Point x, Point y, double scale,
                           std::span<double> out);

/// G(i, j) = k(a_i, b_j).
Matrix gram(const Kernel& kernel, const Matrix& a, const Matrix& b);

/// Median-heuristic lengthscale sqrt(H / 2), where H is the median squared
/// distance over distinct pairs of at most `cap` rows. When n > cap the rows
/// are taken from the front of a permutation seeded by `seed`.
double median_heuristic(const Matrix& points, Index cap = 1000, std::uint64_t seed = 0);

}  // namespace bdc
