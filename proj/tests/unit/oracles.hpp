#pragma once

// Reference implementations written directly from the defining formulas,
// deliberately naive, for comparison against the library.

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using ScalarKernel = std::function<double(const Vec&, const Vec&)>;

inline double sqdist(const Vec& x, const Vec& y) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) s += (x(k) - y(k)) * (x(k) - y(k));
  return s;
}

inline ScalarKernel gaussian(double l) {
  return [l](const Vec& x, const Vec& y) { return std::exp(-sqdist(x, y) / (2.0 * l * l)); };
}

inline ScalarKernel imq(double l) {
  return [l](const Vec& x, const Vec& y) { return 1.0 / std::sqrt(1.0 + sqdist(x, y) / (2.0 * l * l)); };
}

inline ScalarKernel quadratic() {
  return [](const Vec& x, const Vec& y) {
    const double t = 1.0 + x.dot(y);
    return t * t;
  };
}

inline Vec row(const Mat& m, Eigen::Index i) { return m.row(i).transpose(); }

// Biased V-statistic, four explicit loops.
inline double mmd_sq(const ScalarKernel& k, const Mat& a, const Mat& b) {
  double aa = 0.0, bb = 0.0, ab = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.rows(); ++j) aa += k(row(a, i), row(a, j));
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) bb += k(row(b, i), row(b, j));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) ab += k(row(a, i), row(b, j));
  const double n = static_cast<double>(a.rows()), m = static_cast<double>(b.rows());
  return aa / (n * n) + bb / (m * m) - 2.0 * ab / (n * m);
}

// Joint MMD with the product kernel applied to (feature, response) pairs.
inline double joint_mmd_sq(const ScalarKernel& kf, const ScalarKernel& kr, const Mat& fa, const Mat& ra,
                           const Mat& fb, const Mat& rb) {
  auto term = [&](const Mat& f1, const Mat& r1, const Mat& f2, const Mat& r2) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < f1.rows(); ++i)
      for (Eigen::Index j = 0; j < f2.rows(); ++j) s += kf(row(f1, i), row(f2, j)) * kr(row(r1, i), row(r2, j));
    return s / static_cast<double>(f1.rows() * f2.rows());
  };
  return term(fa, ra, fa, ra) + term(fb, rb, fb, rb) - 2.0 * term(fa, ra, fb, rb);
}

// Central differences of a scalar function of a matrix, entry by entry.
inline Mat fd_gradient(const std::function<double(const Mat&)>& f, const Mat& at, double h = 1e-6) {
  Mat g(at.rows(), at.cols());
  Mat probe = at;
  for (Eigen::Index i = 0; i < at.rows(); ++i)
    for (Eigen::Index j = 0; j < at.cols(); ++j) {
      const double orig = probe(i, j);
      probe(i, j) = orig + h;
      const double up = f(probe);
      probe(i, j) = orig - h;
      const double down = f(probe);
      probe(i, j) = orig;
      g(i, j) = (up - down) / (2.0 * h);
    }
  return g;
}

inline double rel_err(const Mat& a, const Mat& b) {
  const double scale = std::max(b.norm(), 1e-8);
  return (a - b).norm() / scale;
}

inline Mat random_matrix(std::mt19937_64& gen, Eigen::Index r, Eigen::Index c, double sd = 1.0) {
  std::normal_distribution<double> nd(0.0, sd);
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = nd(gen);
  return m;
}

inline Eigen::Index uniform_int(std::mt19937_64& gen, Eigen::Index lo, Eigen::Index hi) {
  return std::uniform_int_distribution<Eigen::Index>(lo, hi)(gen);
}

// Orthonormal d x p from Gram-Schmidt on a random Gaussian matrix.
inline Mat random_stiefel(std::mt19937_64& gen, Eigen::Index d, Eigen::Index p) {
  Mat a = random_matrix(gen, d, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index k = 0; k < j; ++k) a.col(j) -= a.col(k).dot(a.col(j)) * a.col(k);
    a.col(j) /= a.col(j).norm();
  }
  return a;
}

}  // namespace oracle
