#include "aeromix/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "aeromix/error.hpp"

namespace aeromix {

double RegressionTree::predict(std::span<const double> features) const {
  if (nodes.empty()) fail(ErrorClass::Internal, "empty tree");
  int i = 0;
  while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
    const TreeNode& node = nodes[static_cast<std::size_t>(i)];
    i = features[static_cast<std::size_t>(node.feature)] <= node.threshold
            ? node.left
            : node.right;
  }
  return nodes[static_cast<std::size_t>(i)].value;
}

namespace {

struct BestSplit {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double sse = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const TrainingMatrix& data, const std::vector<double>& response,
              const TreeGrowth& growth, Rng* feature_rng, int max_features)
      : data_(data),
        response_(response),
        growth_(growth),
        feature_rng_(feature_rng),
        max_features_(max_features) {}

  int build(std::vector<std::size_t>& rows, int depth, std::vector<TreeNode>& nodes) {
    const int index = static_cast<int>(nodes.size());
    nodes.push_back(TreeNode{});

    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t r : rows) {
      sum += response_[r];
      sum_sq += response_[r] * response_[r];
    }
    const auto n = static_cast<double>(rows.size());
    const double mean = sum / n;
    nodes[static_cast<std::size_t>(index)].value = mean;

    if (depth >= growth_.max_depth ||
        rows.size() < 2 * static_cast<std::size_t>(growth_.min_samples_leaf)) {
      return index;
    }
    const double node_sse = sum_sq - sum * sum / n;
    const BestSplit best = find_split(rows, node_sse);
    if (!best.found) return index;

    std::vector<std::size_t> left_rows, right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    for (std::size_t r : rows) {
      const double v = data_.row(r)[static_cast<std::size_t>(best.feature)];
      (v <= best.threshold ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    nodes[static_cast<std::size_t>(index)].feature = best.feature;
    nodes[static_cast<std::size_t>(index)].threshold = best.threshold;
    const int left = build(left_rows, depth + 1, nodes);
    nodes[static_cast<std::size_t>(index)].left = left;
    const int right = build(right_rows, depth + 1, nodes);
    nodes[static_cast<std::size_t>(index)].right = right;
    return index;
  }

 private:
  void candidate_features(std::vector<int>& out) {
    const int arity = static_cast<int>(data_.arity());
    out.resize(static_cast<std::size_t>(arity));
    std::iota(out.begin(), out.end(), 0);
    if (feature_rng_ == nullptr || max_features_ <= 0 || max_features_ >= arity) {
      return;
    }
    // Partial Fisher-Yates, then sorted so tie-breaks stay index-ordered.
    for (int i = 0; i < max_features_; ++i) {
      const auto j = static_cast<std::size_t>(
          feature_rng_->bounded(static_cast<std::uint64_t>(arity - i)));
      std::swap(out[static_cast<std::size_t>(i)], out[static_cast<std::size_t>(i) + j]);
    }
    out.resize(static_cast<std::size_t>(max_features_));
    std::sort(out.begin(), out.end());
  }

  BestSplit find_split(const std::vector<std::size_t>& rows, double node_sse) {
    BestSplit best;
    best.sse = node_sse;
    const std::size_t min_leaf = static_cast<std::size_t>(growth_.min_samples_leaf);
    const std::size_t n = rows.size();

    candidate_features(features_buf_);
    order_.assign(rows.begin(), rows.end());
    for (const int f : features_buf_) {
      const auto fi = static_cast<std::size_t>(f);
      std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
        const double va = data_.row(a)[fi];
        const double vb = data_.row(b)[fi];
        if (va != vb) return va < vb;
        return a < b;
      });

      double left_sum = 0.0, left_sq = 0.0;
      double total_sum = 0.0, total_sq = 0.0;
      for (std::size_t r : order_) {
        total_sum += response_[r];
        total_sq += response_[r] * response_[r];
      }
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double y = response_[order_[i]];
        left_sum += y;
        left_sq += y * y;
        const std::size_t n_left = i + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < min_leaf || n_right < min_leaf) continue;
        const double x_lo = data_.row(order_[i])[fi];
        const double x_hi = data_.row(order_[i + 1])[fi];
        if (x_lo == x_hi) continue;
        const double sse_left = left_sq - left_sum * left_sum / static_cast<double>(n_left);
        const double right_sum = total_sum - left_sum;
        const double sse_right = (total_sq - left_sq) -
                                 right_sum * right_sum / static_cast<double>(n_right);
        const double sse = sse_left + sse_right;
        if (sse < best.sse) {
          best.found = true;
          best.feature = f;
          best.threshold = 0.5 * (x_lo + x_hi);
          best.sse = sse;
        }
      }
    }
    return best;
  }

  const TrainingMatrix& data_;
  const std::vector<double>& response_;
  const TreeGrowth& growth_;
  Rng* feature_rng_;
  int max_features_;
  std::vector<int> features_buf_;
  std::vector<std::size_t> order_;
};

}  // namespace

RegressionTree fit_regression_tree(const TrainingMatrix& data,
                                   const std::vector<double>& response,
                                   const std::vector<std::size_t>& rows,
                                   const TreeGrowth& growth, Rng* feature_rng,
                                   int max_features) {
  if (rows.empty()) fail(ErrorClass::ValidationError, "tree fit: empty row set");
  if (response.size() != data.n_rows()) {
    fail(ErrorClass::ValidationError, "tree fit: response size mismatch");
  }
  if (growth.max_depth < 0 || growth.min_samples_leaf < 1) {
    fail(ErrorClass::ValidationError, "tree fit: invalid growth parameters");
  }
  RegressionTree tree;
  std::vector<std::size_t> work(rows);
  TreeBuilder builder(data, response, growth, feature_rng, max_features);
  builder.build(work, 0, tree.nodes);
  return tree;
}

}  // namespace aeromix
