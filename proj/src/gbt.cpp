#include "aeromix/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "aeromix/error.hpp"
#include "aeromix/rng.hpp"
#include "aeromix/strings.hpp"

namespace aeromix {

void GbtParams::validate() const {
  if (n_trees < 0) fail(ErrorClass::ValidationError, "gbt: n_trees must be >= 0");
  if (max_depth < 1) fail(ErrorClass::ValidationError, "gbt: max_depth must be >= 1");
  if (!(learning_rate >= 0.0 && learning_rate <= 1.0)) {
    fail(ErrorClass::ValidationError, "gbt: learning_rate must lie in [0, 1]");
  }
  if (!(subsample > 0.0 && subsample <= 1.0)) {
    fail(ErrorClass::ValidationError, "gbt: subsample must lie in (0, 1]");
  }
  if (min_samples_leaf < 1) {
    fail(ErrorClass::ValidationError, "gbt: min_samples_leaf must be >= 1");
  }
}

std::string GbtParams::describe() const {
  std::ostringstream out;
  out << "n_trees=" << n_trees << " max_depth=" << max_depth
      << " learning_rate=" << format_g(learning_rate, 9)
      << " subsample=" << format_g(subsample, 9)
      << " min_samples_leaf=" << min_samples_leaf;
  return out.str();
}

double GBTModel::predict(std::span<const double> features) const {
  if (features.size() != feature_names.size()) {
    fail(ErrorClass::ValidationError,
         "gbt predict: feature arity " + std::to_string(features.size()) + " != " +
             std::to_string(feature_names.size()));
  }
  double acc = 0.0;
  for (const RegressionTree& tree : trees) acc += tree.predict(features);
  return base_score + params.learning_rate * acc;
}

GBTModel fit_gbt(const TrainingMatrix& data, const GbtParams& params) {
  params.validate();
  if (data.n_rows() == 0) {
    fail(ErrorClass::ValidationError, "gbt: empty training matrix");
  }

  GBTModel model;
  model.params = params;
  model.feature_names = data.feature_names();

  const std::size_t n = data.n_rows();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += data.target(i);
  mean /= static_cast<double>(n);
  model.base_score = mean;

  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) residual[i] = data.target(i) - mean;

  const TreeGrowth growth{params.max_depth, params.min_samples_leaf};
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);

  const auto n_sub = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(params.subsample * static_cast<double>(n))));
  model.trees.reserve(static_cast<std::size_t>(params.n_trees));
  for (int t = 0; t < params.n_trees; ++t) {
    std::vector<std::size_t> tree_rows;
    if (n_sub >= n) {
      tree_rows = rows;
    } else {
      const auto order = shuffled_indices(n, derive_seed(params.seed, static_cast<std::uint64_t>(t)));
      tree_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_sub));
      std::sort(tree_rows.begin(), tree_rows.end());
    }
    RegressionTree tree = fit_regression_tree(data, residual, tree_rows, growth);
    for (std::size_t i = 0; i < n; ++i) {
      residual[i] -= params.learning_rate * tree.predict(data.row(i));
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace aeromix
