#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bdc/exact_gaussian.hpp"
#include "bdc/types.hpp"

namespace bdc {

// ---- synthetic generators -------------------------------------------------

/// Equal-weight mixture of nine unit-covariance Gaussians in 2-d with means
/// (0,0), (1,1), (-1,-1), (-1,1), (1,-1), (2,0), (-2,0), (0,2), (0,-2).
GaussianMixture nine_component_mixture();

struct MixtureSample {
  Matrix points;
  GaussianMixture mixture;
};

MixtureSample gen_gaussian_mixture_2d(Index n, std::uint64_t seed);

struct Projection {
  Matrix projected;  // n x D
  Matrix matrix;     // k x D
};

/// X P with i.i.d. standard normal P.
Projection project_random_gaussian(const Matrix& x, Index dim, std::uint64_t seed);

/// Randomly initialized two-layer tanh network R^k -> R^D; weights have
/// variance 1 / fan_in.
Matrix project_random_tanh(const Matrix& x, Index dim, Index hidden, std::uint64_t seed);

struct SwissRoll {
  Matrix points;     // n x 3, noisy
  Vector responses;  // f(u, v) + eps
  Vector u;
  Vector v;
};

/// f(u, v) = 4 (u / (3 pi) - (1 + 3 pi) / 2)^2 + (pi / 20) v
double swiss_roll_response(double u, double v);

/// u ~ U(3pi/2, 9pi/2), v ~ U(0, 20); points (u cos u, v, u sin u) + N(0, I3);
/// responses f(u, v) + N(0, response_noise^2).
SwissRoll gen_swiss_roll(Index n, std::uint64_t seed, double response_noise = 0.5);

// ---- standardization --------------------------------------------------------

/// Per-column affine map to zero mean and unit sample standard deviation.
/// Constant columns are centered only and flagged.
class Standardizer {
 public:
  static Standardizer fit(const Matrix& x);

  Matrix apply(const Matrix& x) const;
  Matrix invert(const Matrix& z) const;

  const Vector& means() const { return means_; }
  const Vector& stds() const { return stds_; }
  const std::vector<bool>& constant() const { return constant_; }

 private:
  Vector means_;
  Vector stds_;
  std::vector<bool> constant_;
};

// ---- one-hot ----------------------------------------------------------------

Matrix one_hot(const std::vector<Index>& labels, Index classes);
/// Row-wise argmax; ties go to the lowest column.
std::vector<Index> argmax_project(const Matrix& w);

// ---- CSV ----------------------------------------------------------------------

struct CsvTable {
  Matrix values;
  std::vector<std::string> header;  // empty when the file has no header row
};

/// Comma-separated reals with an optional header row (detected when the first
/// row is not entirely numeric).
CsvTable load_csv(const std::filesystem::path& path);

/// Writes one header row (x0..x{d-1} when `header` is empty) and shortest
/// round-trip reals.
void save_csv(const std::filesystem::path& path, const Matrix& values, const std::vector<std::string>& header = {});

std::vector<std::string> default_header(const std::string& prefix, Index count);

}  // namespace bdc
