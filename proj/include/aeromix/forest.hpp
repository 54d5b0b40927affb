#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aeromix/training.hpp"
#include "aeromix/tree.hpp"

namespace aeromix {

struct RfParams {
  int n_trees = 100;
  int max_depth = 12;
  int min_samples_leaf = 3;
  bool bootstrap = true;
  int max_features = 0;  // 0 = ceil(sqrt(arity))
  std::uint64_t seed = 0;

  void validate() const;
};

// Bagged regression trees with per-split feature subsampling; the prediction
// is the mean over trees.
struct RFModel {
  RfParams params;
  std::vector<std::string> feature_names;
  std::vector<RegressionTree> trees;

  double predict(std::span<const double> features) const;
};

RFModel fit_rf(const TrainingMatrix& data, const RfParams& params);

}  // namespace aeromix
