#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aeromix/training.hpp"
#include "aeromix/tree.hpp"

namespace aeromix {

struct GbtParams {
  int n_trees = 100;
  int max_depth = 5;
  double learning_rate = 0.1;
  double subsample = 1.0;
  int min_samples_leaf = 3;
  std::uint64_t seed = 0;

  void validate() const;
  std::string describe() const;
};

// Gradient-boosted regression trees under squared-error loss: the model is
// the target mean plus learning_rate times the sum of depth-limited trees,
// each fit to the current residuals on a seeded row subsample.
struct GBTModel {
  GbtParams params;
  std::vector<std::string> feature_names;
  double base_score = 0.0;
  std::vector<RegressionTree> trees;

  double predict(std::span<const double> features) const;
};

GBTModel fit_gbt(const TrainingMatrix& data, const GbtParams& params);

}  // namespace aeromix
