#include "aeromix/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aeromix/error.hpp"
#include "aeromix/rng.hpp"

namespace aeromix {

void RfParams::validate() const {
  if (n_trees < 1) fail(ErrorClass::ValidationError, "rf: n_trees must be >= 1");
  if (max_depth < 1) fail(ErrorClass::ValidationError, "rf: max_depth must be >= 1");
  if (min_samples_leaf < 1) {
    fail(ErrorClass::ValidationError, "rf: min_samples_leaf must be >= 1");
  }
  if (max_features < 0) fail(ErrorClass::ValidationError, "rf: max_features must be >= 0");
}

double RFModel::predict(std::span<const double> features) const {
  if (features.size() != feature_names.size()) {
    fail(ErrorClass::ValidationError, "rf predict: feature arity mismatch");
  }
  double acc = 0.0;
  for (const RegressionTree& tree : trees) acc += tree.predict(features);
  return acc / static_cast<double>(trees.size());
}

RFModel fit_rf(const TrainingMatrix& data, const RfParams& params) {
  params.validate();
  if (data.n_rows() == 0) fail(ErrorClass::ValidationError, "rf: empty training matrix");

  RFModel model;
  model.params = params;
  model.feature_names = data.feature_names();

  const std::size_t n = data.n_rows();
  std::vector<double> response(n);
  for (std::size_t i = 0; i < n; ++i) response[i] = data.target(i);

  const int max_features =
      params.max_features > 0
          ? params.max_features
          : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(data.arity()))));
  const TreeGrowth growth{params.max_depth, params.min_samples_leaf};

  model.trees.reserve(static_cast<std::size_t>(params.n_trees));
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(derive_seed(params.seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> rows(n);
    if (params.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) {
        rows[i] = static_cast<std::size_t>(rng.bounded(n));
      }
      std::sort(rows.begin(), rows.end());
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    model.trees.push_back(
        fit_regression_tree(data, response, rows, growth, &rng, max_features));
  }
  return model;
}

}  // namespace aeromix
