#include "bdc/training.hpp"

#include <algorithm>

namespace bdc {

void TrainConfig::validate() const {
  require(epochs >= 0, "train config: epochs must be non-negative");
  require(batch_size > 0, "train config: batch size must be positive");
  require(learning_rate > 0.0, "train config: learning rate must be positive");
}

std::vector<std::vector<Index>> epoch_batches(Index n, Index batch_size, RngStream& rng) {
  const Index b = std::min(batch_size, n);
  const auto perm = rng.permutation(n);
  std::vector<std::vector<Index>> batches;
  // The trailing partial batch is kept.
  for (Index start = 0; start < n; start += b) {
    const Index end = std::min(start + b, n);
    batches.emplace_back(perm.begin() + start, perm.begin() + end);
  }
  return batches;
}

Matrix gather_rows(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(rows[i]);
  return out;
}

}  // namespace bdc
