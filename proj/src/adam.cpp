#include "bdc/adam.hpp"

#include <cmath>

namespace bdc {

Adam::Adam(AdamConfig cfg, Index size) : cfg_(cfg), m_(Vector::Zero(size)), v_(Vector::Zero(size)) {
  require(cfg_.learning_rate > 0.0, "adam: learning rate must be positive");
  require(cfg_.beta1 >= 0.0 && cfg_.beta1 < 1.0, "adam: beta1 must lie in [0, 1)");
  require(cfg_.beta2 >= 0.0 && cfg_.beta2 < 1.0, "adam: beta2 must lie in [0, 1)");
  require(cfg_.eps > 0.0, "adam: eps must be positive");
}

Vector Adam::step(const Vector& grad) {
  require(grad.size() == m_.size(), "adam: gradient size does not match optimizer state");
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  Vector delta(grad.size());
  for (Index i = 0; i < grad.size(); ++i) {
    m_(i) = cfg_.beta1 * m_(i) + (1.0 - cfg_.beta1) * grad(i);
    v_(i) = cfg_.beta2 * v_(i) + (1.0 - cfg_.beta2) * grad(i) * grad(i);
    const double mhat = m_(i) / bc1;
    const double vhat = v_(i) / bc2;
    delta(i) = -cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.eps);
  }
  return delta;
}

}  // namespace bdc
