#include <doctest.h>

#include <cmath>
#include <random>

#include "bdc/estimators.hpp"
#include "bdc/linear_autoencoder.hpp"
#include "oracles.hpp"

using namespace bdc;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

}  // namespace

TEST_CASE("mmd hand values") {
  const auto k = Kernel::gaussian(std::sqrt(2.0));
  const double expect = 2.0 - 2.0 * std::exp(-1.0);
  CHECK(mmd_sq(k, scalar(0), scalar(2)) == doctest::Approx(1.2642411).epsilon(1e-7));
  CHECK(rmmd_sq(k, scalar(0), scalar(2)) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(hybrid_loss(k, scalar(0), scalar(2)) == doctest::Approx(5.2642411).epsilon(1e-7));
  CHECK(msre(scalar(0), scalar(2)) == 4.0);
}

TEST_CASE("identical sets give zero") {
  std::mt19937_64 gen(1);
  const oracle::Mat a = oracle::random_matrix(gen, 9, 3);
  const auto k = Kernel::imq(1.0);
  CHECK(mmd_sq(k, a, a) == 0.0);
  CHECK(rmmd_sq(k, a, a) == 0.0);
  CHECK(hybrid_loss(k, a, a) == 0.0);
  const LabelledSet s{a.leftCols(2), a.rightCols(1)};
  CHECK(joint_mmd_sq(k, Kernel::gaussian(1.0), s, s) == 0.0);
}

TEST_CASE("estimators match the naive oracle") {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = oracle::uniform_int(gen, 1, 12), m = oracle::uniform_int(gen, 1, 12);
    const Index d = oracle::uniform_int(gen, 1, 5);
    const double l = 0.3 + std::abs(oracle::random_matrix(gen, 1, 1)(0, 0));
    const oracle::Mat a = oracle::random_matrix(gen, n, d), b = oracle::random_matrix(gen, m, d);
    CHECK(std::abs(mmd_sq(Kernel::gaussian(l), a, b) - oracle::mmd_sq(oracle::gaussian(l), a, b)) < 1e-12);
    CHECK(std::abs(emmd_sq(Kernel::imq(l), a, b) - oracle::mmd_sq(oracle::imq(l), a, b)) < 1e-12);
    CHECK(std::abs(dmmd_sq(Kernel::quadratic(), a, b) - oracle::mmd_sq(oracle::quadratic(), a, b)) <
          1e-9 * (1.0 + std::abs(oracle::mmd_sq(oracle::quadratic(), a, b))));
  }
}

TEST_CASE("rmmd requires matching shapes") {
  CHECK_THROWS_AS(rmmd_sq(Kernel::gaussian(1), Matrix::Zero(3, 2), Matrix::Zero(2, 2)), Error);
  CHECK_THROWS_AS(mmd_sq(Kernel::gaussian(1), Matrix::Zero(3, 2), Matrix::Zero(2, 3)), Error);
  CHECK_THROWS_AS(mmd_sq(Kernel::gaussian(1), Matrix::Zero(0, 2), Matrix::Zero(2, 2)), Error);
}

TEST_CASE("projector applied twice gives the same rmmd") {
  std::mt19937_64 gen(4);
  const oracle::Mat x = oracle::random_matrix(gen, 10, 5);
  const oracle::Mat v = oracle::random_stiefel(gen, 5, 2);
  const oracle::Mat once = x * v * v.transpose();
  const oracle::Mat twice = once * v * v.transpose();
  const auto k = Kernel::gaussian(1.5);
  CHECK(rmmd_sq(k, x, once) == doctest::Approx(rmmd_sq(k, x, twice)).epsilon(1e-10));
}

TEST_CASE("joint mmd against the product-kernel oracle") {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = oracle::uniform_int(gen, 1, 10), m = oracle::uniform_int(gen, 1, 10);
    const oracle::Mat fa = oracle::random_matrix(gen, n, 3), fb = oracle::random_matrix(gen, m, 3);
    const oracle::Mat ra = oracle::random_matrix(gen, n, 2), rb = oracle::random_matrix(gen, m, 2);
    const double got = joint_mmd_sq(Kernel::gaussian(1.2), Kernel::imq(0.7), {fa, ra}, {fb, rb});
    const double want = oracle::joint_mmd_sq(oracle::gaussian(1.2), oracle::imq(0.7), fa, ra, fb, rb);
    CHECK(std::abs(got - want) < 1e-12);
  }
}

TEST_CASE("constant responses factor out of the joint mmd") {
  std::mt19937_64 gen(7);
  const oracle::Mat fa = oracle::random_matrix(gen, 7, 2), fb = oracle::random_matrix(gen, 4, 2);
  const Matrix ra = Matrix::Constant(7, 1, 0.3), rb = Matrix::Constant(4, 1, 0.3);
  const auto kf = Kernel::gaussian(0.8);
  // l(y, y) = 1 for a Gaussian response kernel
  CHECK(joint_mmd_sq(kf, Kernel::gaussian(2.0), {fa, ra}, {fb, rb}) ==
        doctest::Approx(mmd_sq(kf, fa, fb)).epsilon(1e-12));
  // quadratic: l(y, y) = (1 + 0.09)^2
  CHECK(joint_mmd_sq(kf, Kernel::quadratic(), {fa, ra}, {fb, rb}) ==
        doctest::Approx(1.09 * 1.09 * mmd_sq(kf, fa, fb)).epsilon(1e-12));
}

TEST_CASE("hybrid loss dominates each term") {
  std::mt19937_64 gen(8);
  const oracle::Mat x = oracle::random_matrix(gen, 6, 3), y = oracle::random_matrix(gen, 6, 3);
  const auto k = Kernel::gaussian(1.0);
  const double h = hybrid_loss(k, x, y);
  CHECK(h >= rmmd_sq(k, x, y));
  CHECK(h >= msre(x, y));
  CHECK(h == doctest::Approx(rmmd_sq(k, x, y) + msre(x, y)).epsilon(1e-15));
}

TEST_CASE("emmd gradient hand value and stationarity") {
  const Matrix g = emmd_grad(Kernel::gaussian(1.0), scalar(0.0), scalar(1.0));
  CHECK(g(0, 0) == doctest::Approx(1.2130613).epsilon(1e-7));

  std::mt19937_64 gen(9);
  const oracle::Mat e = oracle::random_matrix(gen, 5, 2);
  CHECK(emmd_grad(Kernel::gaussian(1.0), e, e).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("single-pair emmd is minimized at the data point") {
  const auto k = Kernel::gaussian(1.0);
  CHECK(emmd_sq(k, scalar(0), scalar(0)) == 0.0);
  for (double z : {-1.0, -0.1, 0.2, 2.0}) {
    CHECK(emmd_sq(k, scalar(0), scalar(z)) == doctest::Approx(2.0 - 2.0 * std::exp(-z * z / 2)).epsilon(1e-14));
    CHECK(emmd_sq(k, scalar(0), scalar(z)) > 0.0);
  }
}

TEST_CASE("emmd gradient against finite differences") {
  std::mt19937_64 gen(10);
  const Kernel kernels[] = {Kernel::gaussian(1.1), Kernel::imq(0.9), Kernel::quadratic()};
  for (const auto& k : kernels) {
    const oracle::Mat e = oracle::random_matrix(gen, 9, 3), z = oracle::random_matrix(gen, 6, 3);
    const Matrix g = emmd_grad(k, e, z);
    const auto fd = oracle::fd_gradient([&](const oracle::Mat& p) { return emmd_sq(k, e, p); }, z);
    CHECK(oracle::rel_err(g, fd) < 1e-6);

    EmmdObjective obj(k, e);
    Matrix g2;
    CHECK(obj.value_and_grad(z, g2) == doctest::Approx(emmd_sq(k, e, z)).epsilon(1e-13));
    CHECK((g2 - g).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("joint emmd gradient against finite differences") {
  std::mt19937_64 gen(12);
  const auto kf = Kernel::gaussian(1.0), kr = Kernel::gaussian(0.7);
  const LabelledSet e{oracle::random_matrix(gen, 8, 2), oracle::random_matrix(gen, 8, 1)};
  const LabelledSet z{oracle::random_matrix(gen, 5, 2), oracle::random_matrix(gen, 5, 1)};
  const auto g = joint_emmd_grad(kf, kr, e, z);
  const auto fdf = oracle::fd_gradient(
      [&](const oracle::Mat& p) { return joint_mmd_sq(kf, kr, e, LabelledSet{p, z.responses}); }, z.features);
  const auto fdr = oracle::fd_gradient(
      [&](const oracle::Mat& p) { return joint_mmd_sq(kf, kr, e, LabelledSet{z.features, p}); }, z.responses);
  CHECK(oracle::rel_err(g.features, fdf) < 1e-6);
  CHECK(oracle::rel_err(g.responses, fdr) < 1e-6);

  const auto zero = joint_emmd_grad(kf, kr, e, e);
  CHECK(zero.features.cwiseAbs().maxCoeff() < 1e-15);
  CHECK(zero.responses.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("constant responses reduce the joint gradient to the feature gradient") {
  std::mt19937_64 gen(13);
  const oracle::Mat ef = oracle::random_matrix(gen, 7, 2), zf = oracle::random_matrix(gen, 4, 2);
  const auto kf = Kernel::gaussian(0.9);
  const auto g = joint_emmd_grad(kf, Kernel::gaussian(1.0), {ef, Matrix::Ones(7, 1)}, {zf, Matrix::Ones(4, 1)});
  CHECK((g.features - emmd_grad(kf, ef, zf)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("reconstruction gradient against finite differences") {
  std::mt19937_64 gen(14);
  const oracle::Mat x = oracle::random_matrix(gen, 7, 3), y = oracle::random_matrix(gen, 7, 3);
  const auto k = Kernel::gaussian(1.3);
  const Matrix g = rmmd_grad_reconstruction(k, x, y);
  const auto fd = oracle::fd_gradient([&](const oracle::Mat& p) { return rmmd_sq(k, x, p); }, y);
  CHECK(oracle::rel_err(g, fd) < 1e-6);
}

TEST_CASE("decoded discrepancy obeys the triangle bound under the pull-back kernel") {
  std::mt19937_64 gen(15);
  int violations = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Index d = oracle::uniform_int(gen, 2, 6), p = oracle::uniform_int(gen, 1, d);
    const oracle::Mat x = oracle::random_matrix(gen, 12, d);
    const StiefelPoint v(oracle::random_stiefel(gen, d, p));
    const oracle::Mat z = oracle::random_matrix(gen, 5, p);
    const auto k = Kernel::gaussian(1.0);
    const auto h = Kernel::pull_back(k, std::make_shared<LinearDecoder>(v));
    const double r = rmmd_sq(k, x, decode(v, encode(v, x)));
    const double e = emmd_sq(h, encode(v, x), z);
    const double dm = dmmd_sq(k, x, decode(v, z));
    if (std::sqrt(dm) > std::sqrt(r) + std::sqrt(e) + 1e-9) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("integration error never exceeds the mmd bound") {
  std::mt19937_64 gen(16);
  const auto k = Kernel::gaussian(1.0);
  const oracle::Mat a = oracle::random_matrix(gen, 10, 2), b = oracle::random_matrix(gen, 6, 2, 1.5);
  const auto same = integration_error(k, Vector::Ones(1), a.topRows(1), a, a);
  CHECK(same.gap == 0.0);
  CHECK(same.bound == 0.0);

  const auto single = integration_error(k, Vector::Ones(1), b.topRows(1), a, b);
  CHECK(single.gap <= std::sqrt(mmd_sq(k, a, b)) + 1e-12);

  for (int trial = 0; trial < 100; ++trial) {
    const Index c = oracle::uniform_int(gen, 1, 5);
    const Vector w = oracle::random_matrix(gen, c, 1).col(0);
    const auto r = integration_error(k, w, oracle::random_matrix(gen, c, 2), a, b);
    CHECK(r.gap <= r.bound + 1e-12);
  }
}
