#include <doctest.h>

#include <cmath>
#include <random>

#include "bdc/kernels.hpp"
#include "bdc/rng.hpp"
#include "oracles.hpp"

using namespace bdc;

namespace {

Matrix m1(std::initializer_list<double> vals) {
  Matrix m(static_cast<Index>(vals.size()), 1);
  Index i = 0;
  for (double v : vals) m(i++, 0) = v;
  return m;
}

double k_at(const Kernel& k, const Matrix& a, const Matrix& b) { return eval(k, row_span(a, 0), row_span(b, 0)); }

}  // namespace

TEST_CASE("gaussian kernel values") {
  const Matrix x = m1({0.0}), y = m1({2.0});
  CHECK(k_at(Kernel::gaussian(1.0), x, x) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(k_at(Kernel::gaussian(std::sqrt(2.0)), x, y) == doctest::Approx(0.3678794).epsilon(1e-7));
}

TEST_CASE("quadratic kernel values") {
  Matrix a(1, 2), b(1, 2);
  a << 1, 0;
  b << 0, 1;
  CHECK(k_at(Kernel::quadratic(), a, b) == 1.0);
  a << 1, 1;
  CHECK(k_at(Kernel::quadratic(), a, a) == 9.0);
}

TEST_CASE("imq kernel against the formula") {
  const Matrix x = m1({0.5}), y = m1({-1.0});
  const double l = 0.7;
  const double expect = 1.0 / std::sqrt(1.0 + 1.5 * 1.5 / (2 * l * l));
  CHECK(k_at(Kernel::imq(l), x, y) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("invalid lengthscales are rejected") {
  CHECK_THROWS_AS(Kernel::gaussian(0.0), Error);
  CHECK_THROWS_AS(Kernel::imq(-1.0), Error);
  CHECK_THROWS_AS(Kernel::gaussian(std::nan("")), Error);
}

TEST_CASE("gradient of the first argument") {
  const Matrix x = m1({1.0}), y = m1({0.0});
  const Vector g = grad_first(Kernel::gaussian(1.0), row_span(x, 0), row_span(y, 0));
  CHECK(g(0) == doctest::Approx(-0.6065307).epsilon(1e-7));
  const Vector z = grad_first(Kernel::gaussian(1.0), row_span(x, 0), row_span(x, 0));
  CHECK(z(0) == 0.0);
}

TEST_CASE("gradients match central differences") {
  std::mt19937_64 gen(11);
  const Kernel kernels[] = {Kernel::gaussian(1.3), Kernel::imq(0.8), Kernel::quadratic()};
  for (const auto& k : kernels) {
    for (int trial = 0; trial < 50; ++trial) {
      const oracle::Mat x = oracle::random_matrix(gen, 1, 5);
      const oracle::Mat y = oracle::random_matrix(gen, 1, 5);
      const Vector g = grad_first(k, row_span(x, 0), row_span(y, 0));
      const oracle::Mat fd = oracle::fd_gradient([&](const oracle::Mat& p) { return k_at(k, p, y); }, x);
      CHECK(oracle::rel_err(g.transpose(), fd) < 1e-6);
    }
  }
}

TEST_CASE("composite kernels have no gradient") {
  const auto tp = Kernel::tensor_product(Kernel::gaussian(1.0), Kernel::gaussian(1.0), 1);
  const Matrix x(1, 2);
  CHECK_THROWS_AS(grad_first(tp, row_span(x, 0), row_span(x, 0)), Error);
  CHECK_FALSE(tp.differentiable());
  CHECK_THROWS_AS(tp.lengthscale(), Error);
}

TEST_CASE("gram matrices against scalar loops") {
  std::mt19937_64 gen(3);
  const oracle::Mat a = oracle::random_matrix(gen, 8, 3), b = oracle::random_matrix(gen, 5, 3);
  const auto k = Kernel::gaussian(0.9);
  const auto ok = oracle::gaussian(0.9);
  const Matrix g = gram(k, a, b);
  REQUIRE(g.rows() == 8);
  REQUIRE(g.cols() == 5);
  for (Index i = 0; i < 8; ++i)
    for (Index j = 0; j < 5; ++j) CHECK(std::abs(g(i, j) - ok(oracle::row(a, i), oracle::row(b, j))) < 1e-14);

  const Matrix s = gram(k, a, a);
  CHECK((s - s.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (Index i = 0; i < 8; ++i) CHECK(s(i, i) == 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig{Eigen::MatrixXd(s)};
  CHECK(eig.eigenvalues().minCoeff() > -1e-12);

  const Matrix one = gram(k, a.topRows(1), b.topRows(1));
  CHECK(one(0, 0) == eval(k, row_span(a, 0), row_span(b, 0)));
}

TEST_CASE("tensor product gram multiplies feature and response grams") {
  std::mt19937_64 gen(5);
  const oracle::Mat a = oracle::random_matrix(gen, 6, 4), b = oracle::random_matrix(gen, 4, 4);
  const auto kf = Kernel::gaussian(1.1), kr = Kernel::imq(0.6);
  const Matrix g = gram(Kernel::tensor_product(kf, kr, 3), a, b);
  const Matrix expect =
      gram(kf, a.leftCols(3), b.leftCols(3)).cwiseProduct(gram(kr, a.rightCols(1), b.rightCols(1)));
  CHECK((g - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("median heuristic") {
  CHECK(median_heuristic(m1({0.0, 1.0, 3.0})) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  Matrix two(2, 2);
  two << 0, 0, 1, 1;
  CHECK(median_heuristic(two) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(median_heuristic(m1({2.0, 2.0, 2.0})), Error);
  try {
    median_heuristic(m1({2.0, 2.0}));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateScale);
  }
}

TEST_CASE("median heuristic: even count averages the middle pair") {
  // four points give six squared distances {1,4,9,1,4,1} -> sorted 1,1,1,4,4,9 -> H = (1+4)/2
  const Matrix x = m1({0.0, 1.0, 2.0, 3.0});
  CHECK(median_heuristic(x) == doctest::Approx(std::sqrt(2.5 / 2.0)).epsilon(1e-15));
}

TEST_CASE("median heuristic subsamples deterministically") {
  RngStream rng(9);
  const Matrix x = rng.normal_matrix(3000, 2);
  const double a = median_heuristic(x, 500, 4);
  CHECK(a == median_heuristic(x, 500, 4));
  CHECK(a == doctest::Approx(median_heuristic(x, 3000)).epsilon(0.1));
}
