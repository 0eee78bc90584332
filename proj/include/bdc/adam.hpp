#pragma once

#include <cstdint>

#include "bdc/types.hpp"

namespace bdc {

struct AdamConfig {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam over a flat parameter vector. step() returns the
/// increment to add to the parameters; the caller decides how to apply it
/// (plain addition, or addition followed by a retraction).
class Adam {
 public:
  Adam(AdamConfig cfg, Index size);

  Vector step(const Vector& grad);

  std::int64_t iterations() const { return t_; }

 private:
  AdamConfig cfg_;
  Vector m_;
  Vector v_;
  std::int64_t t_ = 0;
};

/// Flat view over a matrix's storage.
inline Eigen::Map<Vector> flat(Matrix& m) { return {m.data(), m.size()}; }
inline Eigen::Map<const Vector> flat(const Matrix& m) { return {m.data(), m.size()}; }

}  // namespace bdc
