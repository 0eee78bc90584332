#pragma once

#include "bdc/kernels.hpp"
#include "bdc/types.hpp"

namespace bdc {

/// Features with row-aligned responses (q = 1 for regression, q = C for
/// one-hot classes).
struct LabelledSet {
  Matrix features;
  Matrix responses;

  Index size() const { return features.rows(); }
  /// Throws unless row counts agree and every entry is finite.
  void validate() const;
  /// Rows as [feature | response], the layout TensorProductKernel expects.
  Matrix concatenated() const;
};

// All discrepancies below are normalized V-statistics of the squared MMD.
// Results in [-1e-12, 0) are clamped to 0.

double mmd_sq(const Kernel& kernel, const Matrix& a, const Matrix& b);

/// Data against its row-aligned reconstruction.
double rmmd_sq(const Kernel& kernel, const Matrix& data, const Matrix& reconstruction);

/// Encoded data against a latent compressed set.
double emmd_sq(const Kernel& kernel, const Matrix& encoded, const Matrix& compressed);

/// Data against the decoded compressed set.
double dmmd_sq(const Kernel& kernel, const Matrix& data, const Matrix& decoded);

/// MMD of the product kernel k(x,x') l(y,y').
double joint_mmd_sq(const Kernel& feature_kernel, const Kernel& response_kernel, const LabelledSet& a,
                    const LabelledSet& b);

/// Mean squared reconstruction error averaged over rows and columns.
double msre(const Matrix& data, const Matrix& reconstruction);

/// rmmd_sq + msre with unit weights.
double hybrid_loss(const Kernel& kernel, const Matrix& data, const Matrix& reconstruction);

/// Analytic d emmd_sq / d compressed.
Matrix emmd_grad(const Kernel& kernel, const Matrix& encoded, const Matrix& compressed);

struct JointGradient {
  Matrix features;
  Matrix responses;
};

JointGradient joint_emmd_grad(const Kernel& feature_kernel, const Kernel& response_kernel,
                              const LabelledSet& encoded, const LabelledSet& compressed);

/// Gradient of rmmd_sq(kernel, data, reconstruction) with respect to the
/// reconstruction rows. With `response_gram` set (the response kernel Gram of
/// the shared responses) it is the gradient of the reconstruction joint MMD.
Matrix rmmd_grad_reconstruction(const Kernel& kernel, const Matrix& data, const Matrix& reconstruction,
                                const Matrix* response_gram = nullptr);

struct IntegrationError {
  double gap;    // |mean_a f - mean_b f|
  double bound;  // |f|_H * sqrt(mmd_sq(a, b))
};

/// Witness f = sum_i w_i k(c_i, .). The gap never exceeds the bound.
IntegrationError integration_error(const Kernel& kernel, const Vector& weights, const Matrix& centers,
                                   const Matrix& a, const Matrix& b);

/// EMMD against fixed encoded data. The encoded-encoded term does not depend
/// on the compressed set and is computed once at construction.
class EmmdObjective {
 public:
  EmmdObjective(Kernel kernel, Matrix encoded);

  double value(const Matrix& compressed) const;
  /// Writes the gradient into `grad` and returns the objective.
  double value_and_grad(const Matrix& compressed, Matrix& grad) const;

  const Matrix& encoded() const { return encoded_; }

 private:
  Kernel kernel_;
  Matrix encoded_;
  double self_term_;
};

/// Joint EMMD against fixed labelled encoded data, with the same caching.
class JointEmmdObjective {
 public:
  JointEmmdObjective(Kernel feature_kernel, Kernel response_kernel, LabelledSet encoded);

  double value(const LabelledSet& compressed) const;
  double value_and_grad(const LabelledSet& compressed, JointGradient& grad) const;

 private:
  Kernel feature_kernel_;
  Kernel response_kernel_;
  LabelledSet encoded_;
  double self_term_;
};

}  // namespace bdc
