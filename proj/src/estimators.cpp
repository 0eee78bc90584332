#include "bdc/estimators.hpp"

#include <cmath>
#include <string>

namespace bdc {
namespace {

constexpr double kClamp = 1e-12;

double clamp_sq(double v) { return (v < 0.0 && v >= -kClamp) ? 0.0 : v; }

// Fixed row-major summation order so results are reproducible.
double total(const Matrix& g) {
  double s = 0.0;
  for (Index i = 0; i < g.rows(); ++i)
    for (Index j = 0; j < g.cols(); ++j) s += g(i, j);
  return s;
}

void require_nonempty(const Matrix& m, const char* what) {
  if (m.rows() == 0) fail(ErrorCode::InvalidArgument, std::string(what) + ": empty point set");
}

void require_same_cols(const Matrix& a, const Matrix& b, const char* what) {
  if (a.cols() != b.cols())
    fail(ErrorCode::InvalidArgument, std::string(what) + ": dimension mismatch (" +
                                         std::to_string(a.cols()) + " vs " + std::to_string(b.cols()) +
                                         ")");
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorCode::InvalidArgument, std::string(what) + ": shapes differ");
}

void require_differentiable(const Kernel& k, const char* what) {
  if (!k.differentiable())
    fail(ErrorCode::Unsupported, std::string(what) + ": kernel variant is not differentiable");
}

std::span<double> row_out(Matrix& m, Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

double mmd_from_grams(const Matrix& kaa, const Matrix& kab, const Matrix& kbb) {
  const double n = static_cast<double>(kaa.rows());
  const double m = static_cast<double>(kbb.rows());
  return clamp_sq(total(kaa) / (n * n) - 2.0 * total(kab) / (n * m) + total(kbb) / (m * m));
}

void check_labelled_pair(const LabelledSet& a, const LabelledSet& b, const char* what) {
  a.validate();
  b.validate();
  require_nonempty(a.features, what);
  require_nonempty(b.features, what);
  require_same_cols(a.features, b.features, what);
  require_same_cols(a.responses, b.responses, what);
}

}  // namespace

void LabelledSet::validate() const {
  if (features.rows() != responses.rows())
    fail(ErrorCode::InvalidArgument, "labelled set: feature and response row counts differ");
  if (!features.allFinite() || !responses.allFinite())
    fail(ErrorCode::InvalidArgument, "labelled set: non-finite entry");
}

Matrix LabelledSet::concatenated() const {
  Matrix out(features.rows(), features.cols() + responses.cols());
  out << features, responses;
  return out;
}

double mmd_sq(const Kernel& kernel, const Matrix& a, const Matrix& b) {
  require_nonempty(a, "mmd_sq");
  require_nonempty(b, "mmd_sq");
  require_same_cols(a, b, "mmd_sq");
  return mmd_from_grams(gram(kernel, a, a), gram(kernel, a, b), gram(kernel, b, b));
}

double rmmd_sq(const Kernel& kernel, const Matrix& data, const Matrix& reconstruction) {
  require_same_shape(data, reconstruction, "rmmd_sq");
  return mmd_sq(kernel, data, reconstruction);
}

double emmd_sq(const Kernel& kernel, const Matrix& encoded, const Matrix& compressed) {
  require_nonempty(compressed, "emmd_sq");
  return mmd_sq(kernel, encoded, compressed);
}

double dmmd_sq(const Kernel& kernel, const Matrix& data, const Matrix& decoded) {
  require_same_cols(data, decoded, "dmmd_sq");
  return mmd_sq(kernel, data, decoded);
}

double joint_mmd_sq(const Kernel& feature_kernel, const Kernel& response_kernel, const LabelledSet& a,
                    const LabelledSet& b) {
  check_labelled_pair(a, b, "joint_mmd_sq");
  auto joint = [&](const LabelledSet& u, const LabelledSet& v) -> Matrix {
    return gram(feature_kernel, u.features, v.features)
        .cwiseProduct(gram(response_kernel, u.responses, v.responses));
  };
  return mmd_from_grams(joint(a, a), joint(a, b), joint(b, b));
}

double msre(const Matrix& data, const Matrix& reconstruction) {
  require_same_shape(data, reconstruction, "msre");
  require_nonempty(data, "msre");
  double s = 0.0;
  for (Index i = 0; i < data.rows(); ++i)
    for (Index j = 0; j < data.cols(); ++j) {
      const double diff = data(i, j) - reconstruction(i, j);
      s += diff * diff;
    }
  return s / static_cast<double>(data.rows() * data.cols());
}

double hybrid_loss(const Kernel& kernel, const Matrix& data, const Matrix& reconstruction) {
  return rmmd_sq(kernel, data, reconstruction) + msre(data, reconstruction);
}

Matrix emmd_grad(const Kernel& kernel, const Matrix& encoded, const Matrix& compressed) {
  Matrix grad;
  EmmdObjective(kernel, encoded).value_and_grad(compressed, grad);
  return grad;
}

JointGradient joint_emmd_grad(const Kernel& feature_kernel, const Kernel& response_kernel,
                              const LabelledSet& encoded, const LabelledSet& compressed) {
  JointGradient grad;
  JointEmmdObjective(feature_kernel, response_kernel, encoded).value_and_grad(compressed, grad);
  return grad;
}

Matrix rmmd_grad_reconstruction(const Kernel& kernel, const Matrix& data, const Matrix& reconstruction,
                                const Matrix* response_gram) {
  require_same_shape(data, reconstruction, "rmmd_grad_reconstruction");
  require_nonempty(data, "rmmd_grad_reconstruction");
  require_differentiable(kernel, "rmmd_grad_reconstruction");
  const Index n = data.rows();
  if (response_gram && (response_gram->rows() != n || response_gram->cols() != n))
    fail(ErrorCode::InvalidArgument, "rmmd_grad_reconstruction: response Gram has wrong shape");

  const double c = 2.0 / (static_cast<double>(n) * static_cast<double>(n));
  Matrix grad = Matrix::Zero(n, data.cols());
  for (Index j = 0; j < n; ++j) {
    const Point yj = row_span(reconstruction, j);
    auto out = row_out(grad, j);
    for (Index l = 0; l < n; ++l) {
      const double w = response_gram ? (*response_gram)(j, l) : 1.0;
      accumulate_grad_first(kernel, yj, row_span(reconstruction, l), c * w, out);
      accumulate_grad_first(kernel, yj, row_span(data, l), -c * w, out);
    }
  }
  return grad;
}

IntegrationError integration_error(const Kernel& kernel, const Vector& weights, const Matrix& centers,
                                   const Matrix& a, const Matrix& b) {
  require(weights.size() == centers.rows(), "integration_error: one weight per center required");
  require_nonempty(a, "integration_error");
  require_nonempty(b, "integration_error");
  require_same_cols(centers, a, "integration_error");
  require_same_cols(a, b, "integration_error");

  auto mean_f = [&](const Matrix& pts) {
    const Vector f = gram(kernel, pts, centers) * weights;
    double s = 0.0;
    for (Index i = 0; i < f.size(); ++i) s += f(i);
    return s / static_cast<double>(pts.rows());
  };
  const double norm_sq = weights.dot(gram(kernel, centers, centers) * weights);
  const double norm = std::sqrt(std::max(norm_sq, 0.0));
  return {std::abs(mean_f(a) - mean_f(b)), norm * std::sqrt(mmd_sq(kernel, a, b))};
}

EmmdObjective::EmmdObjective(Kernel kernel, Matrix encoded)
    : kernel_(std::move(kernel)), encoded_(std::move(encoded)) {
  require_nonempty(encoded_, "EmmdObjective");
  const double n = static_cast<double>(encoded_.rows());
  self_term_ = total(gram(kernel_, encoded_, encoded_)) / (n * n);
}

double EmmdObjective::value(const Matrix& compressed) const {
  require_nonempty(compressed, "emmd");
  require_same_cols(encoded_, compressed, "emmd");
  const double n = static_cast<double>(encoded_.rows());
  const double m = static_cast<double>(compressed.rows());
  return clamp_sq(self_term_ - 2.0 * total(gram(kernel_, encoded_, compressed)) / (n * m) +
                  total(gram(kernel_, compressed, compressed)) / (m * m));
}

double EmmdObjective::value_and_grad(const Matrix& compressed, Matrix& grad) const {
  require_differentiable(kernel_, "emmd_grad");
  const double value_sq = value(compressed);
  const Index n = encoded_.rows();
  const Index m = compressed.rows();
  const double cross = -2.0 / (static_cast<double>(n) * static_cast<double>(m));
  const double self = 2.0 / (static_cast<double>(m) * static_cast<double>(m));

  grad = Matrix::Zero(m, compressed.cols());
  for (Index j = 0; j < m; ++j) {
    const Point zj = row_span(compressed, j);
    auto out = row_out(grad, j);
    for (Index l = 0; l < m; ++l) accumulate_grad_first(kernel_, zj, row_span(compressed, l), self, out);
    for (Index i = 0; i < n; ++i) accumulate_grad_first(kernel_, zj, row_span(encoded_, i), cross, out);
  }
  return value_sq;
}

JointEmmdObjective::JointEmmdObjective(Kernel feature_kernel, Kernel response_kernel, LabelledSet encoded)
    : feature_kernel_(std::move(feature_kernel)),
      response_kernel_(std::move(response_kernel)),
      encoded_(std::move(encoded)) {
  encoded_.validate();
  require_nonempty(encoded_.features, "JointEmmdObjective");
  const double n = static_cast<double>(encoded_.size());
  self_term_ = total(gram(feature_kernel_, encoded_.features, encoded_.features)
                         .cwiseProduct(gram(response_kernel_, encoded_.responses, encoded_.responses))) /
               (n * n);
}

double JointEmmdObjective::value(const LabelledSet& compressed) const {
  check_labelled_pair(encoded_, compressed, "joint emmd");
  const double n = static_cast<double>(encoded_.size());
  const double m = static_cast<double>(compressed.size());
  const Matrix cross = gram(feature_kernel_, encoded_.features, compressed.features)
                           .cwiseProduct(gram(response_kernel_, encoded_.responses, compressed.responses));
  const Matrix self = gram(feature_kernel_, compressed.features, compressed.features)
                          .cwiseProduct(gram(response_kernel_, compressed.responses, compressed.responses));
  return clamp_sq(self_term_ - 2.0 * total(cross) / (n * m) + total(self) / (m * m));
}

double JointEmmdObjective::value_and_grad(const LabelledSet& compressed, JointGradient& grad) const {
  require_differentiable(feature_kernel_, "joint_emmd_grad");
  require_differentiable(response_kernel_, "joint_emmd_grad");
  const double value_sq = value(compressed);
  const Index n = encoded_.size();
  const Index m = compressed.size();
  const double cross = -2.0 / (static_cast<double>(n) * static_cast<double>(m));
  const double self = 2.0 / (static_cast<double>(m) * static_cast<double>(m));

  const Matrix& z = compressed.features;
  const Matrix& w = compressed.responses;
  const Matrix& e = encoded_.features;
  const Matrix& y = encoded_.responses;
  const Matrix kzz = gram(feature_kernel_, z, z);
  const Matrix kze = gram(feature_kernel_, z, e);
  const Matrix lww = gram(response_kernel_, w, w);
  const Matrix lwy = gram(response_kernel_, w, y);

  grad.features = Matrix::Zero(m, z.cols());
  grad.responses = Matrix::Zero(m, w.cols());
  for (Index j = 0; j < m; ++j) {
    auto gz = row_out(grad.features, j);
    auto gw = row_out(grad.responses, j);
    for (Index l = 0; l < m; ++l) {
      accumulate_grad_first(feature_kernel_, row_span(z, j), row_span(z, l), self * lww(j, l), gz);
      accumulate_grad_first(response_kernel_, row_span(w, j), row_span(w, l), self * kzz(j, l), gw);
    }
    for (Index i = 0; i < n; ++i) {
      accumulate_grad_first(feature_kernel_, row_span(z, j), row_span(e, i), cross * lwy(j, i), gz);
      accumulate_grad_first(response_kernel_, row_span(w, j), row_span(y, i), cross * kze(j, i), gw);
    }
  }
  return value_sq;
}

}  // namespace bdc
