#include "bdc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "bdc/rng.hpp"

namespace bdc {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_same_dim(Point x, Point y) {
  if (x.size() != y.size())
    fail(ErrorCode::InvalidArgument, "kernel: point dimensions differ (" + std::to_string(x.size()) +
                                         " vs " + std::to_string(y.size()) + ")");
}

double squared_distance(Point x, Point y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = x[k] - y[k];
    s += diff * diff;
  }
  return s;
}

double dot(Point x, Point y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

Matrix decode_point(const Decoder& decoder, Point z) {
  if (static_cast<Index>(z.size()) != decoder.latent_dim())
    fail(ErrorCode::InvalidArgument, "pull-back kernel: latent point has dimension " +
                                         std::to_string(z.size()) + ", decoder expects " +
                                         std::to_string(decoder.latent_dim()));
  Matrix row(1, static_cast<Index>(z.size()));
  std::copy(z.begin(), z.end(), row.data());
  return decoder.decode(row);
}

}  // namespace

Kernel Kernel::gaussian(double lengthscale) {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale))
    fail(ErrorCode::InvalidArgument, "gaussian kernel: lengthscale must be positive and finite");
  return Kernel(GaussianKernel{lengthscale});
}

Kernel Kernel::imq(double lengthscale) {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale))
    fail(ErrorCode::InvalidArgument, "imq kernel: lengthscale must be positive and finite");
  return Kernel(ImqKernel{lengthscale});
}

Kernel Kernel::quadratic() { return Kernel(QuadraticKernel{}); }

Kernel Kernel::tensor_product(const Kernel& feature, const Kernel& response, Index feature_dim) {
  require(feature_dim > 0, "tensor-product kernel: feature_dim must be positive");
  return Kernel(TensorProductKernel{std::make_shared<const Kernel>(feature),
                                    std::make_shared<const Kernel>(response), feature_dim});
}

Kernel Kernel::pull_back(const Kernel& base, DecoderHandle decoder) {
  require(decoder != nullptr, "pull-back kernel: decoder is null");
  return Kernel(PullBackKernel{std::make_shared<const Kernel>(base), std::move(decoder)});
}

double Kernel::lengthscale() const {
  if (const auto* g = std::get_if<GaussianKernel>(&v_)) return g->lengthscale;
  if (const auto* m = std::get_if<ImqKernel>(&v_)) return m->lengthscale;
  fail(ErrorCode::Unsupported, "kernel has no lengthscale");
}

bool Kernel::differentiable() const {
  const auto k = kind();
  return k == KernelKind::Gaussian || k == KernelKind::Imq || k == KernelKind::Quadratic;
}

double eval(const Kernel& kernel, Point x, Point y) {
  return std::visit(
      overloaded{
          [&](const GaussianKernel& g) {
            check_same_dim(x, y);
            return std::exp(-squared_distance(x, y) / (2.0 * g.lengthscale * g.lengthscale));
          },
          [&](const ImqKernel& m) {
            check_same_dim(x, y);
            return 1.0 / std::sqrt(1.0 + squared_distance(x, y) / (2.0 * m.lengthscale * m.lengthscale));
          },
          [&](const QuadraticKernel&) {
            check_same_dim(x, y);
            const double s = 1.0 + dot(x, y);
            return s * s;
          },
          [&](const TensorProductKernel& t) {
            check_same_dim(x, y);
            const auto fd = static_cast<std::size_t>(t.feature_dim);
            if (x.size() <= fd)
              fail(ErrorCode::InvalidArgument, "tensor-product kernel: point has no response part");
            return eval(*t.feature, x.first(fd), y.first(fd)) *
                   eval(*t.response, x.subspan(fd), y.subspan(fd));
          },
          [&](const PullBackKernel& pb) {
            const Matrix dx = decode_point(*pb.decoder, x);
            const Matrix dy = decode_point(*pb.decoder, y);
            return eval(*pb.base, row_span(dx, 0), row_span(dy, 0));
          },
      },
      kernel.variant());
}

void accumulate_grad_first(const Kernel& kernel, Point x, Point y, double scale,
                           std::span<double> out) {
  check_same_dim(x, y);
  if (out.size() != x.size()) fail(ErrorCode::InvalidArgument, "grad_first: output size mismatch");
  const std::size_t d = x.size();
  std::visit(overloaded{
                 [&](const GaussianKernel& g) {
                   const double l2 = g.lengthscale * g.lengthscale;
                   const double k = std::exp(-squared_distance(x, y) / (2.0 * l2));
                   const double c = -scale * k / l2;
                   for (std::size_t i = 0; i < d; ++i) out[i] += c * (x[i] - y[i]);
                 },
                 [&](const ImqKernel& m) {
                   const double l2 = m.lengthscale * m.lengthscale;
                   const double base = 1.0 + squared_distance(x, y) / (2.0 * l2);
                   const double c = -scale / (2.0 * l2) * std::pow(base, -1.5);
                   for (std::size_t i = 0; i < d; ++i) out[i] += c * (x[i] - y[i]);
                 },
                 [&](const QuadraticKernel&) {
                   const double c = scale * 2.0 * (1.0 + dot(x, y));
                   for (std::size_t i = 0; i < d; ++i) out[i] += c * y[i];
                 },
                 [&](const TensorProductKernel&) {
                   fail(ErrorCode::Unsupported, "grad_first: tensor-product kernel not supported");
                 },
                 [&](const PullBackKernel&) {
                   fail(ErrorCode::Unsupported, "grad_first: pull-back kernel not supported");
                 },
             },
             kernel.variant());
}

Vector grad_first(const Kernel& kernel, Point x, Point y) {
  Vector g = Vector::Zero(static_cast<Index>(x.size()));
  accumulate_grad_first(kernel, x, y, 1.0, {g.data(), static_cast<std::size_t>(g.size())});
  return g;
}

Matrix gram(const Kernel& kernel, const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols())
    fail(ErrorCode::InvalidArgument, "gram: column counts differ (" + std::to_string(a.cols()) +
                                         " vs " + std::to_string(b.cols()) + ")");
  if (const auto* pb = std::get_if<PullBackKernel>(&kernel.variant())) {
    if (a.cols() != pb->decoder->latent_dim())
      fail(ErrorCode::InvalidArgument, "gram: pull-back kernel latent dimension mismatch");
    return gram(*pb->base, pb->decoder->decode(a), pb->decoder->decode(b));
  }
  if (const auto* t = std::get_if<TensorProductKernel>(&kernel.variant())) {
    const Index fd = t->feature_dim;
    if (a.cols() <= fd) fail(ErrorCode::InvalidArgument, "gram: tensor-product rows lack responses");
    const Index rd = a.cols() - fd;
    const Matrix kf = gram(*t->feature, a.leftCols(fd), b.leftCols(fd));
    const Matrix kr = gram(*t->response, a.rightCols(rd), b.rightCols(rd));
    return kf.cwiseProduct(kr);
  }
  Matrix g(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.rows(); ++j) g(i, j) = eval(kernel, row_span(a, i), row_span(b, j));
  return g;
}

double median_heuristic(const Matrix& points, Index cap, std::uint64_t seed) {
  require(cap >= 2, "median_heuristic: cap must be at least 2");
  if (points.rows() < 2) fail(ErrorCode::InvalidArgument, "median_heuristic: need at least two points");

  std::vector<Index> rows;
  if (points.rows() > cap) {
    rows = RngStream(seed).permutation(points.rows());
    rows.resize(static_cast<std::size_t>(cap));
  } else {
    rows.resize(static_cast<std::size_t>(points.rows()));
    for (Index i = 0; i < points.rows(); ++i) rows[static_cast<std::size_t>(i)] = i;
  }

  std::vector<double> sq;
  sq.reserve(rows.size() * (rows.size() - 1) / 2);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j)
      sq.push_back(squared_distance(row_span(points, rows[i]), row_span(points, rows[j])));

  const std::size_t mid = sq.size() / 2;
  std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(mid), sq.end());
  double h = sq[mid];
  if (sq.size() % 2 == 0) {
    const double lower = *std::max_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(mid));
    h = 0.5 * (lower + h);
  }
  if (!(h > 0.0)) fail(ErrorCode::DegenerateScale, "median_heuristic: median squared distance is zero");
  return std::sqrt(h / 2.0);
}

}  // namespace bdc
