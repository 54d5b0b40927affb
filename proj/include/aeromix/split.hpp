#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "aeromix/training.hpp"

namespace aeromix {

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded shuffle, then the first round(ratio * n) indices train and the rest
// test; both sides are re-sorted ascending. Throws if n < 4 or either side
// comes out empty.
SplitIndices split_indices(std::size_t n, double ratio, std::uint64_t seed);

std::pair<TrainingMatrix, TrainingMatrix> train_test_split(const TrainingMatrix& matrix,
                                                           double ratio,
                                                           std::uint64_t seed);

// Fold id (0..k-1) per row, from a seeded shuffle dealt into contiguous
// near-equal blocks.
std::vector<int> kfold_assignment(std::size_t n, int k, std::uint64_t seed);

}  // namespace aeromix
