#include "bdc/exact_gaussian.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "bdc/format.hpp"

namespace bdc {
namespace {

// Eigen-factorization of a PSD matrix S for the pairwise closed form
//   |I + S / lambda^2|^(-1/2) exp(-1/2 delta^T (lambda^2 I + S)^(-1) delta).
// Eigenvalues are clamped at zero, so lambda^2 I + S stays invertible for the
// rank-deficient covariances projections produce.
struct PairFactor {
  Eigen::MatrixXd basis;
  Vector inv_scale;  // 1 / (lambda^2 + s_k)
  double det_factor;

  PairFactor(const Matrix& s, double lambda) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig{Eigen::MatrixXd(s)};
    if (eig.info() != Eigen::Success) fail(ErrorCode::NumericalRank, "exact_gaussian: eigen-decomposition failed");
    basis = eig.eigenvectors();
    const double l2 = lambda * lambda;
    inv_scale.resize(s.rows());
    double log_det = 0.0;
    for (Index k = 0; k < s.rows(); ++k) {
      const double ev = std::max(eig.eigenvalues()(k), 0.0);
      inv_scale(k) = 1.0 / (l2 + ev);
      log_det += std::log1p(ev / l2);
    }
    det_factor = std::exp(-0.5 * log_det);
  }

  double operator()(const Vector& delta) const {
    const Vector proj = basis.transpose() * delta;
    double q = 0.0;
    for (Index k = 0; k < proj.size(); ++k) q += proj(k) * proj(k) * inv_scale(k);
    return det_factor * std::exp(-0.5 * q);
  }
};

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    fail(ErrorCode::InvalidArgument, "exact_gaussian: lengthscale must be positive");
}

void check_dims(const GaussianMixture& p, const GaussianMixture& q) {
  if (p.dim() != q.dim()) fail(ErrorCode::InvalidArgument, "exact_gaussian: mixture dimensions differ");
}

double clamp_sq(double v) { return (v < 0.0 && v >= -1e-12) ? 0.0 : v; }

}  // namespace

void GaussianMixture::validate() const {
  const std::size_t k = weights.size();
  if (k == 0) fail(ErrorCode::InvalidArgument, "mixture: no components");
  if (means.size() != k || covariances.size() != k)
    fail(ErrorCode::InvalidArgument, "mixture: weights, means and covariances disagree in count");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) fail(ErrorCode::InvalidArgument, "mixture: weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) >= 1e-12) fail(ErrorCode::InvalidArgument, "mixture: weights must sum to 1");
  const Index d = dim();
  for (std::size_t i = 0; i < k; ++i) {
    const Matrix& c = covariances[i];
    if (means[i].size() != d || c.rows() != d || c.cols() != d)
      fail(ErrorCode::InvalidArgument, "mixture: component " + std::to_string(i) + " has the wrong dimension");
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      fail(ErrorCode::InvalidArgument, "mixture: covariance " + std::to_string(i) + " is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Eigen::MatrixXd(c), Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10)
      fail(ErrorCode::InvalidArgument, "mixture: covariance " + std::to_string(i) + " is not PSD");
  }
}

double embedding_at(const GaussianMixture& gm, double lambda, const Vector& x) {
  check_lambda(lambda);
  if (x.size() != gm.dim()) fail(ErrorCode::InvalidArgument, "embedding_at: dimension mismatch");
  double s = 0.0;
  for (Index i = 0; i < gm.components(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    s += gm.weights[ui] * PairFactor(gm.covariances[ui], lambda)(x - gm.means[ui]);
  }
  return s;
}

double cross_expectation(const GaussianMixture& p, const GaussianMixture& q, double lambda) {
  check_lambda(lambda);
  check_dims(p, q);
  double s = 0.0;
  for (std::size_t i = 0; i < p.weights.size(); ++i)
    for (std::size_t j = 0; j < q.weights.size(); ++j) {
      const PairFactor f(p.covariances[i] + q.covariances[j], lambda);
      s += p.weights[i] * q.weights[j] * f(p.means[i] - q.means[j]);
    }
  return s;
}

double expected_embedding(const GaussianMixture& gm, double lambda) { return cross_expectation(gm, gm, lambda); }

GaussianMixture pushforward_linear(const GaussianMixture& gm, const Matrix& a) {
  if (a.rows() != gm.dim())
    fail(ErrorCode::InvalidArgument, "pushforward_linear: matrix rows must equal the mixture dimension");
  GaussianMixture out;
  out.weights = gm.weights;
  for (std::size_t i = 0; i < gm.weights.size(); ++i) {
    out.means.push_back(a.transpose() * gm.means[i]);
    Matrix c = a.transpose() * gm.covariances[i] * a;
    out.covariances.push_back(0.5 * (c + c.transpose()));
  }
  return out;
}

double exact_mmd_sq_mixture(const GaussianMixture& p, const GaussianMixture& q, double lambda) {
  check_dims(p, q);
  return clamp_sq(expected_embedding(p, lambda) + expected_embedding(q, lambda) -
                  2.0 * cross_expectation(p, q, lambda));
}

double exact_mmd_sq_vs_points(const GaussianMixture& gm, const Matrix& s, double lambda) {
  check_lambda(lambda);
  if (s.cols() != gm.dim()) fail(ErrorCode::InvalidArgument, "exact_mmd_sq_vs_points: dimension mismatch");
  if (s.rows() == 0) fail(ErrorCode::InvalidArgument, "exact_mmd_sq_vs_points: empty point set");
  const Index m = s.rows();

  std::vector<PairFactor> factors;
  for (const auto& c : gm.covariances) factors.emplace_back(c, lambda);
  double cross = 0.0;
  for (Index j = 0; j < m; ++j) {
    const Vector sj = s.row(j).transpose();
    for (std::size_t i = 0; i < factors.size(); ++i) cross += gm.weights[i] * factors[i](sj - gm.means[i]);
  }
  double self = 0.0;
  const double denom = 2.0 * lambda * lambda;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) self += std::exp(-(s.row(i) - s.row(j)).squaredNorm() / denom);

  const double md = static_cast<double>(m);
  return clamp_sq(expected_embedding(gm, lambda) - 2.0 * cross / md + self / (md * md));
}

Matrix sample_mixture(const GaussianMixture& gm, Index n, RngStream& rng) {
  gm.validate();
  const Index d = gm.dim();
  std::vector<Matrix> roots;
  for (const auto& c : gm.covariances) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig{Eigen::MatrixXd(c)};
    const Vector sd = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    roots.emplace_back(sd.asDiagonal() * eig.eigenvectors().transpose());
  }
  Matrix out(n, d);
  Vector xi(d);
  for (Index r = 0; r < n; ++r) {
    const double u = rng.uniform();
    std::size_t comp = 0;
    double acc = gm.weights[0];
    while (u >= acc && comp + 1 < gm.weights.size()) acc += gm.weights[++comp];
    for (Index k = 0; k < d; ++k) xi(k) = rng.normal();
    out.row(r) = gm.means[comp].transpose() + xi.transpose() * roots[comp];
  }
  return out;
}

void write_mixture(std::ostream& out, const GaussianMixture& gm) {
  auto row = [&](const double* v, Index count) {
    for (Index j = 0; j < count; ++j) out << (j ? " " : "") << format_double(v[j]);
    out << '\n';
  };
  out << "mixture " << gm.components() << ' ' << gm.dim() << '\n';
  for (std::size_t i = 0; i < gm.weights.size(); ++i) {
    out << "component " << format_double(gm.weights[i]) << '\n';
    row(gm.means[i].data(), gm.dim());
    const Matrix& c = gm.covariances[i];
    for (Index r = 0; r < c.rows(); ++r) row(c.data() + r * c.cols(), c.cols());
  }
}

GaussianMixture read_mixture(std::istream& in) {
  int line_no = 0;
  auto next_line = [&]() {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::Parse, "mixture: unexpected end of file");
    ++line_no;
    return std::istringstream(line);
  };
  auto read_values = [&](double* dst, Index count) {
    auto ss = next_line();
    std::string tok;
    Index j = 0;
    while (ss >> tok) {
      const auto v = parse_double(tok);
      if (!v || j == count) fail(ErrorCode::Parse, "mixture: bad row at line " + std::to_string(line_no));
      dst[j++] = *v;
    }
    if (j != count) fail(ErrorCode::Parse, "mixture: short row at line " + std::to_string(line_no));
  };

  auto header = next_line();
  std::string kw;
  long long k = 0, d = 0;
  if (!(header >> kw >> k >> d) || kw != "mixture" || k <= 0 || d <= 0)
    fail(ErrorCode::Parse, "mixture: bad header");
  GaussianMixture gm;
  for (long long i = 0; i < k; ++i) {
    auto comp = next_line();
    std::string tok, wtok;
    if (!(comp >> tok >> wtok) || tok != "component")
      fail(ErrorCode::Parse, "mixture: expected 'component' at line " + std::to_string(line_no));
    const auto w = parse_double(wtok);
    if (!w) fail(ErrorCode::Parse, "mixture: bad weight at line " + std::to_string(line_no));
    gm.weights.push_back(*w);
    Vector mu(d);
    read_values(mu.data(), d);
    gm.means.push_back(mu);
    Matrix c(d, d);
    for (long long r = 0; r < d; ++r) read_values(c.data() + r * d, d);
    gm.covariances.push_back(c);
  }
  gm.validate();
  return gm;
}

void save_mixture(const std::filesystem::path& path, const GaussianMixture& gm) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  write_mixture(out, gm);
}

GaussianMixture load_mixture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
  return read_mixture(in);
}

}  // namespace bdc
