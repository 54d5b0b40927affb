#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aeromix/rng.hpp"
#include "aeromix/training.hpp"

namespace aeromix {

// Axis-aligned split node; feature < 0 marks a leaf. Rows with
// feature value <= threshold go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

// Nodes stored in preorder; the root is node 0.
struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> features) const;
};

struct TreeGrowth {
  int max_depth = 5;
  int min_samples_leaf = 3;
};

// Depth-limited least-squares tree on `response` over the given row subset.
// Split candidates are midpoints between sorted adjacent distinct feature
// values; the split minimizing the summed squared error wins, ties broken by
// lowest feature index then lowest threshold. When feature_rng is given,
// each node examines a random sample of max_features features instead of all
// of them.
RegressionTree fit_regression_tree(const TrainingMatrix& data,
                                   const std::vector<double>& response,
                                   const std::vector<std::size_t>& rows,
                                   const TreeGrowth& growth,
                                   Rng* feature_rng = nullptr,
                                   int max_features = 0);

}  // namespace aeromix
