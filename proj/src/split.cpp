#include "aeromix/split.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aeromix/error.hpp"
#include "aeromix/rng.hpp"

namespace aeromix {

SplitIndices split_indices(std::size_t n, double ratio, std::uint64_t seed) {
  if (n < 4) {
    fail(ErrorClass::InsufficientData,
         "split needs >= 4 rows, got " + std::to_string(n));
  }
  if (!(ratio > 0.0 && ratio < 1.0)) {
    fail(ErrorClass::ValidationError, "split ratio must lie in (0, 1)");
  }
  const auto n_train =
      static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) {
    fail(ErrorClass::ValidationError,
         "split ratio " + std::to_string(ratio) + " leaves an empty side for n = " +
             std::to_string(n));
  }

  const std::vector<std::size_t> order = shuffled_indices(n, seed);
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::pair<TrainingMatrix, TrainingMatrix> train_test_split(const TrainingMatrix& matrix,
                                                           double ratio,
                                                           std::uint64_t seed) {
  const SplitIndices idx = split_indices(matrix.n_rows(), ratio, seed);
  return {matrix.subset(idx.train), matrix.subset(idx.test)};
}

std::vector<int> kfold_assignment(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) fail(ErrorClass::ValidationError, "k-fold needs k >= 2");
  if (n < static_cast<std::size_t>(k)) {
    fail(ErrorClass::InsufficientData,
         "k-fold needs n >= k, got n = " + std::to_string(n) + ", k = " +
             std::to_string(k));
  }
  const std::vector<std::size_t> order = shuffled_indices(n, seed);
  std::vector<int> fold(n, 0);
  for (int f = 0; f < k; ++f) {
    const std::size_t lo = n * static_cast<std::size_t>(f) / static_cast<std::size_t>(k);
    const std::size_t hi =
        n * static_cast<std::size_t>(f + 1) / static_cast<std::size_t>(k);
    for (std::size_t i = lo; i < hi; ++i) fold[order[i]] = f;
  }
  return fold;
}

}  // namespace aeromix
