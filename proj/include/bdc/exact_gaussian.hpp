#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "bdc/rng.hpp"
#include "bdc/types.hpp"

namespace bdc {

/// Finite mixture of Gaussians sum_i w_i N(mu_i, Sigma_i). Covariances may be
/// rank deficient (pushforwards through a projection are).
struct GaussianMixture {
  std::vector<double> weights;
  std::vector<Vector> means;
  std::vector<Matrix> covariances;

  Index dim() const { return means.empty() ? 0 : means.front().size(); }
  Index components() const { return static_cast<Index>(weights.size()); }
  /// Weights positive and summing to 1 within 1e-12, covariances symmetric to
  /// 1e-12 with eigenvalues >= -1e-10.
  void validate() const;
};

// Closed forms below are for the Gaussian kernel exp(-|x-y|^2 / (2 lambda^2)).

/// Mean embedding E_X[k(X, x)].
double embedding_at(const GaussianMixture& gm, double lambda, const Vector& x);

/// E_{X,X'}[k(X, X')] for independent X, X' from the mixture.
double expected_embedding(const GaussianMixture& gm, double lambda);

/// E_{X~p, Y~q}[k(X, Y)].
double cross_expectation(const GaussianMixture& p, const GaussianMixture& q, double lambda);

/// Law of x -> x A for row vectors x: means mu A, covariances A^T Sigma A.
GaussianMixture pushforward_linear(const GaussianMixture& gm, const Matrix& a);

/// Population MMD^2 between two mixtures.
double exact_mmd_sq_mixture(const GaussianMixture& p, const GaussianMixture& q, double lambda);

/// MMD^2 between the mixture and the empirical distribution of the rows of s.
double exact_mmd_sq_vs_points(const GaussianMixture& gm, const Matrix& s, double lambda);

Matrix sample_mixture(const GaussianMixture& gm, Index n, RngStream& rng);

// Text format: `mixture <components> <dim>`, then per component a line
// `component <weight>`, a mean row and <dim> covariance rows.
void write_mixture(std::ostream& out, const GaussianMixture& gm);
GaussianMixture read_mixture(std::istream& in);
void save_mixture(const std::filesystem::path& path, const GaussianMixture& gm);
GaussianMixture load_mixture(const std::filesystem::path& path);

}  // namespace bdc
