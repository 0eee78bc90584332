#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "bdc/data.hpp"
#include "bdc/rng.hpp"

using namespace bdc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "bdc_test_data";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

}  // namespace

TEST_CASE("nine-component mixture") {
  const auto gm = nine_component_mixture();
  REQUIRE(gm.components() == 9);
  const double means[9][2] = {{0, 0}, {1, 1}, {-1, -1}, {-1, 1}, {1, -1}, {2, 0}, {-2, 0}, {0, 2}, {0, -2}};
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(gm.weights[i] == 1.0 / 9.0);
    CHECK(gm.means[i](0) == means[i][0]);
    CHECK(gm.means[i](1) == means[i][1]);
    CHECK(gm.covariances[i] == Matrix::Identity(2, 2));
  }
  const auto s = gen_gaussian_mixture_2d(20000, 3);
  const double tol = 5.0 / std::sqrt(20000.0);
  CHECK(std::abs(s.points.col(0).mean()) < tol);
  CHECK(std::abs(s.points.col(1).mean()) < tol);
  CHECK(gen_gaussian_mixture_2d(50, 3).points == gen_gaussian_mixture_2d(50, 3).points);
}

TEST_CASE("random gaussian projection") {
  const auto s = gen_gaussian_mixture_2d(100, 1);
  const auto p = project_random_gaussian(s.points, 25, 2);
  CHECK(p.projected.rows() == 100);
  CHECK(p.projected.cols() == 25);
  CHECK(p.matrix.rows() == 2);
  CHECK((p.projected - s.points * p.matrix).cwiseAbs().maxCoeff() == 0.0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(p.projected);
  CHECK(svd.singularValues()(1) > 1e-6);
  CHECK(svd.singularValues()(2) < 1e-9 * svd.singularValues()(0));
  CHECK(project_random_gaussian(s.points, 25, 2).matrix == p.matrix);
  CHECK_THROWS_AS(project_random_gaussian(s.points, 1, 2), Error);
}

TEST_CASE("tanh projection") {
  const auto s = gen_swiss_roll(30, 1);
  const Matrix t = project_random_tanh(s.points, 12, 8, 4);
  CHECK(t.rows() == 30);
  CHECK(t.cols() == 12);
  CHECK(t.cwiseAbs().maxCoeff() < 1.0);
  CHECK(project_random_tanh(s.points, 12, 8, 4) == t);
}

TEST_CASE("swiss roll") {
  const double pi = std::numbers::pi;
  CHECK(swiss_roll_response(1.5 * pi, 0.0) == doctest::Approx(88.8264).epsilon(1e-6));
  CHECK(swiss_roll_response(1.5 * pi, 0.0) == doctest::Approx(4 * std::pow(1.5 * pi, 2)).epsilon(1e-14));
  CHECK(swiss_roll_response(2.0, 20.0) - swiss_roll_response(2.0, 0.0) == doctest::Approx(pi).epsilon(1e-14));

  const auto r = gen_swiss_roll(2000, 7, 0.0);
  CHECK(r.points.cols() == 3);
  for (Index i = 0; i < 2000; ++i) {
    CHECK(r.u(i) >= 1.5 * pi);
    CHECK(r.u(i) <= 4.5 * pi);
    CHECK(r.v(i) >= 0.0);
    CHECK(r.v(i) <= 20.0);
    CHECK(std::abs(r.responses(i) - swiss_roll_response(r.u(i), r.v(i))) < 1e-12);
  }
  // noise on the coordinates is unit variance around the manifold
  double sq = 0.0;
  for (Index i = 0; i < 2000; ++i) sq += std::pow(r.points(i, 1) - r.v(i), 2);
  CHECK(sq / 2000.0 == doctest::Approx(1.0).epsilon(0.1));
  CHECK(gen_swiss_roll(10, 7).points == gen_swiss_roll(10, 7).points);
}

TEST_CASE("standardizer") {
  RngStream rng(1);
  Matrix x = rng.normal_matrix(50, 3, 4.0);
  x.col(1).setConstant(2.5);
  const auto s = Standardizer::fit(x);
  const Matrix z = s.apply(x);
  CHECK(std::abs(z.col(0).mean()) < 1e-12);
  CHECK(s.constant()[1]);
  CHECK_FALSE(s.constant()[0]);
  CHECK(z.col(1) == x.col(1));
  CHECK((s.invert(z) - x).cwiseAbs().maxCoeff() < 1e-12);

  const auto again = Standardizer::fit(z);
  CHECK(std::abs(again.means()(0)) < 1e-12);
  CHECK(std::abs(again.stds()(0) - 1.0) < 1e-12);
  CHECK_THROWS_AS(Standardizer::fit(Matrix::Zero(1, 2)), Error);
}

TEST_CASE("one-hot") {
  const Matrix m = one_hot({2}, 4);
  CHECK(m == (Matrix(1, 4) << 0, 0, 1, 0).finished());
  const std::vector<Index> labels{0, 3, 1, 1, 2};
  CHECK(argmax_project(one_hot(labels, 4)) == labels);
  CHECK(argmax_project((Matrix(1, 3) << 0.3, 0.3, 0.4).finished())[0] == 2);
  CHECK(argmax_project((Matrix(1, 3) << 0.5, 0.5, 0.0).finished())[0] == 0);
  CHECK_THROWS_AS(one_hot({4}, 4), Error);
}

TEST_CASE("csv round trip") {
  RngStream rng(2);
  const Matrix x = rng.normal_matrix(20, 4, 1e3);
  const auto path = scratch("round.csv");
  save_csv(path, x, {"a", "b", "c", "y0"});
  const auto t = load_csv(path);
  CHECK(t.values == x);
  CHECK(t.header == std::vector<std::string>{"a", "b", "c", "y0"});

  save_csv(path, x);
  CHECK(load_csv(path).header == default_header("x", 4));
  CHECK_THROWS_AS(save_csv(path, x, {"a"}), Error);
}

TEST_CASE("csv errors") {
  const auto path = scratch("bad.csv");
  write_text(path, "a,b\n1,2\n3\n");
  try {
    load_csv(path);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
  write_text(path, "1,2\n3,abc\n");
  try {
    load_csv(path);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    CHECK(std::string(e.what()).find("column 2") != std::string::npos);
  }
  write_text(path, "");
  try {
    load_csv(path);
    FAIL("expected an empty-input error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyInput);
  }
  try {
    load_csv(scratch("missing.csv"));
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
  write_text(path, "1,2\n3,4\n");
  CHECK(load_csv(path).header.empty());
  CHECK(load_csv(path).values.rows() == 2);
}
