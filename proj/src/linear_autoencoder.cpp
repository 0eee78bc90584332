#include "bdc/linear_autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bdc/adam.hpp"
#include "bdc/estimators.hpp"
#include "bdc/rng.hpp"

namespace bdc {
namespace {

double orthonormality_residual(const Matrix& v) {
  const Matrix gram = v.transpose() * v;
  return (gram - Matrix::Identity(v.cols(), v.cols())).norm();
}

void require_rows_match(const Matrix& x, Index d, const char* what) {
  if (x.cols() != d)
    fail(ErrorCode::InvalidArgument, std::string(what) + ": expected " + std::to_string(d) +
                                         " columns, got " + std::to_string(x.cols()));
}

// Largest-magnitude entry positive; the first such entry wins ties.
void fix_column_sign(Eigen::Ref<Vector> col) {
  Index best = 0;
  for (Index i = 1; i < col.size(); ++i)
    if (std::abs(col(i)) > std::abs(col(best))) best = i;
  if (col(best) < 0.0) col = -col;
}

}  // namespace

StiefelPoint::StiefelPoint(Matrix v, double tol) : v_(std::move(v)) {
  require(v_.cols() > 0 && v_.rows() >= v_.cols(), "stiefel point: need d >= p > 0");
  const double err = orthonormality_residual(v_);
  if (!(err < tol))
    fail(ErrorCode::InvalidArgument,
         "stiefel point: columns are not orthonormal (|V^T V - I|_F = " + std::to_string(err) + ")");
}

double StiefelPoint::orthonormality_error() const { return orthonormality_residual(v_); }

Matrix encode(const StiefelPoint& v, const Matrix& x) {
  require_rows_match(x, v.ambient_dim(), "encode");
  return x * v.matrix();
}

Matrix decode(const StiefelPoint& v, const Matrix& z) {
  require_rows_match(z, v.latent_dim(), "decode");
  return z * v.matrix().transpose();
}

Matrix tangent_project(const StiefelPoint& v, const Matrix& g) {
  const Matrix& vm = v.matrix();
  if (g.rows() != vm.rows() || g.cols() != vm.cols())
    fail(ErrorCode::InvalidArgument, "tangent_project: shape mismatch");
  const Matrix vtg = vm.transpose() * g;
  const Matrix sym = 0.5 * (vtg + vtg.transpose());
  return g - vm * sym;
}

StiefelPoint orthonormalize(const Matrix& a) {
  const Index d = a.rows();
  const Index p = a.cols();
  require(p > 0 && d >= p, "orthonormalize: need d >= p > 0");
  if (!a.allFinite()) fail(ErrorCode::NumericalRank, "orthonormalize: non-finite input");

  const Eigen::MatrixXd col_major = a;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(col_major);
  const Eigen::MatrixXd& packed = qr.matrixQR();
  double scale = 0.0;
  for (Index k = 0; k < p; ++k) scale = std::max(scale, std::abs(packed(k, k)));
  for (Index k = 0; k < p; ++k)
    if (!(std::abs(packed(k, k)) > 1e-10 * scale))
      fail(ErrorCode::NumericalRank,
           "qr retraction: matrix is rank deficient (column " + std::to_string(k) + ")");

  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, p);
  for (Index k = 0; k < p; ++k)
    if (packed(k, k) < 0.0) q.col(k) = -q.col(k);
  return StiefelPoint(Matrix(q), 1e-8);
}

StiefelPoint qr_retract(const StiefelPoint& v, const Matrix& step) {
  const Matrix& vm = v.matrix();
  if (step.rows() != vm.rows() || step.cols() != vm.cols())
    fail(ErrorCode::InvalidArgument, "qr_retract: shape mismatch");
  return orthonormalize(vm + step);
}

Matrix rmmd_grad_V(const Kernel& kernel, const Matrix& x, const StiefelPoint& v, const Matrix* response_gram) {
  require_rows_match(x, v.ambient_dim(), "rmmd_grad_V");
  const Matrix& vm = v.matrix();
  const Matrix latent = x * vm;
  const Matrix recon = latent * vm.transpose();
  const Matrix g_recon = rmmd_grad_reconstruction(kernel, x, recon, response_gram);
  // recon = X V V^T, so dL/dV = X^T G V + G^T X V.
  return x.transpose() * (g_recon * vm) + g_recon.transpose() * latent;
}

PcaBasis pca_basis(const Matrix& x, Index p) {
  const Index n = x.rows();
  const Index d = x.cols();
  if (n < 2) fail(ErrorCode::InvalidArgument, "pca_init: need at least two rows");
  if (p < 1 || p > d)
    fail(ErrorCode::InvalidArgument, "pca_init: latent dimension must lie in [1, d]");

  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) fail(ErrorCode::NumericalRank, "pca_init: eigen-decomposition failed");

  Eigen::MatrixXd vecs = eig.eigenvectors();
  const Vector vals = eig.eigenvalues();
  for (Index k = 0; k < d; ++k) fix_column_sign(vecs.col(k));

  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (vals(a) != vals(b)) return vals(a) > vals(b);
    for (Index i = 0; i < d; ++i)
      if (vecs(i, a) != vecs(i, b)) return vecs(i, a) > vecs(i, b);
    return false;
  });

  Matrix basis(d, p);
  Vector top(p);
  Index positive = 0;
  for (Index k = 0; k < p; ++k) {
    basis.col(k) = vecs.col(order[static_cast<std::size_t>(k)]);
    top(k) = vals(order[static_cast<std::size_t>(k)]);
    if (top(k) > 0.0) ++positive;
  }
  return {StiefelPoint(std::move(basis)), top, positive < p};
}

StiefelPoint pca_init(const Matrix& x, Index p) { return pca_basis(x, p).basis; }

StiefelPoint gaussian_init(Index d, Index p, RngStream& rng) {
  require(p >= 1 && p <= d, "gaussian_init: need 1 <= p <= d");
  return orthonormalize(rng.normal_matrix(d, p, 1.0 / std::sqrt(static_cast<double>(d))));
}

StiefelPoint train_linear(const Matrix& x, Index p, const Kernel& kernel, const TrainConfig& cfg,
                          LinearInit init, const TrainHooks& hooks,
                          const std::optional<ResponseTerm>& responses) {
  cfg.validate();
  const Index n = x.rows();
  const Index d = x.cols();
  if (p < 1 || p > d) fail(ErrorCode::InvalidArgument, "train_linear: latent dimension must lie in [1, d]");
  if (n < 1) fail(ErrorCode::InvalidArgument, "train_linear: empty data");
  if (!kernel.differentiable()) fail(ErrorCode::Unsupported, "train_linear: kernel is not differentiable");
  if (responses && responses->values.rows() != n)
    fail(ErrorCode::InvalidArgument, "train_linear: responses must have one row per sample");

  const RngStream root(cfg.seed);
  RngStream init_rng = root.split(0);
  RngStream batch_rng = root.split(1);

  StiefelPoint v = init == LinearInit::Pca ? pca_init(x, p) : gaussian_init(d, p, init_rng);
  Adam adam(cfg.adam(), d * p);

  for (Index epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    const auto batches = epoch_batches(n, cfg.batch_size, batch_rng);
    for (const auto& rows : batches) {
      const Matrix xb = gather_rows(x, rows);
      const Matrix recon = decode(v, encode(v, xb));
      Matrix g;
      if (responses) {
        const Matrix rb = gather_rows(responses->values, rows);
        const Matrix lb = gram(responses->kernel, rb, rb);
        loss_sum += joint_mmd_sq(kernel, responses->kernel, {xb, rb}, {recon, rb});
        g = rmmd_grad_V(kernel, xb, v, &lb);
      } else {
        loss_sum += rmmd_sq(kernel, xb, recon);
        g = rmmd_grad_V(kernel, xb, v);
      }
      const Matrix tangent = tangent_project(v, g);
      Matrix step(d, p);
      flat(step) = adam.step(flat(tangent));
      StiefelPoint next = qr_retract(v, step);
      if (hooks.on_stiefel_step) hooks.on_stiefel_step(v.matrix(), tangent, next.matrix());
      v = std::move(next);
    }
    const double mean_loss = loss_sum / static_cast<double>(batches.size());
    if (!std::isfinite(mean_loss))
      fail(ErrorCode::Divergence, "train_linear: non-finite loss in epoch " + std::to_string(epoch));
    if (hooks.on_epoch) hooks.on_epoch(epoch, mean_loss);
  }
  return v;
}

}  // namespace bdc
