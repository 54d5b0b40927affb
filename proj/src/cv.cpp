#include "aeromix/cv.hpp"

#include <cmath>

#include "aeromix/csv.hpp"
#include "aeromix/error.hpp"
#include "aeromix/metrics.hpp"
#include "aeromix/parallel.hpp"
#include "aeromix/split.hpp"
#include "aeromix/strings.hpp"

namespace aeromix {

CvResult kfold_cv(const TrainingMatrix& data, const std::vector<GbtParams>& grid,
                  int k, std::uint64_t seed) {
  if (grid.empty()) fail(ErrorClass::ValidationError, "cv: empty hyperparameter grid");
  for (const auto& p : grid) p.validate();
  const std::size_t n = data.n_rows();
  const std::vector<int> fold_of = kfold_assignment(n, k, seed);

  std::vector<std::vector<std::size_t>> fold_train(static_cast<std::size_t>(k));
  std::vector<std::vector<std::size_t>> fold_valid(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    for (int f = 0; f < k; ++f) {
      (fold_of[i] == f ? fold_valid : fold_train)[static_cast<std::size_t>(f)].push_back(i);
    }
  }

  CvResult result;
  result.table.resize(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    result.table[g].params = grid[g];
    result.table[g].fold_rmse.assign(static_cast<std::size_t>(k), 0.0);
  }

  const std::size_t n_tasks = grid.size() * static_cast<std::size_t>(k);
  parallel_for(n_tasks, [&](std::size_t task) {
    const std::size_t g = task / static_cast<std::size_t>(k);
    const auto f = static_cast<std::size_t>(task % static_cast<std::size_t>(k));
    const TrainingMatrix train = data.subset(fold_train[f]);
    const GBTModel model = fit_gbt(train, grid[g]);
    double sse = 0.0;
    for (std::size_t i : fold_valid[f]) {
      const double err = data.target(i) - model.predict(data.row(i));
      sse += err * err;
    }
    result.table[g].fold_rmse[f] =
        std::sqrt(sse / static_cast<double>(fold_valid[f].size()));
  });

  for (std::size_t g = 0; g < grid.size(); ++g) {
    double mean = 0.0;
    for (double v : result.table[g].fold_rmse) mean += v;
    result.table[g].mean_rmse = mean / static_cast<double>(k);
    if (result.table[g].mean_rmse < result.table[result.best_index].mean_rmse) {
      result.best_index = g;
    }
  }
  return result;
}

void write_cv_table(const CvResult& result, const std::string& path) {
  CsvTable table;
  table.header = {"n_trees", "max_depth",        "learning_rate", "subsample",
                  "min_samples_leaf", "mean_rmse", "selected"};
  const std::size_t k =
      result.table.empty() ? 0 : result.table.front().fold_rmse.size();
  for (std::size_t f = 0; f < k; ++f) {
    table.header.push_back("fold" + std::to_string(f) + "_rmse");
  }
  for (std::size_t g = 0; g < result.table.size(); ++g) {
    const CvCell& cell = result.table[g];
    std::vector<std::string> row = {
        std::to_string(cell.params.n_trees),
        std::to_string(cell.params.max_depth),
        format_g(cell.params.learning_rate, 9),
        format_g(cell.params.subsample, 9),
        std::to_string(cell.params.min_samples_leaf),
        format_g(cell.mean_rmse, 9),
        g == result.best_index ? "1" : "0"};
    for (double v : cell.fold_rmse) row.push_back(format_g(v, 9));
    table.rows.push_back(std::move(row));
  }
  write_csv(path, table);
}

std::vector<GbtParams> make_param_grid(const std::vector<int>& n_trees,
                                       const std::vector<int>& max_depth,
                                       const std::vector<double>& learning_rate,
                                       const std::vector<double>& subsample,
                                       const std::vector<int>& min_samples_leaf,
                                       std::uint64_t seed) {
  std::vector<GbtParams> grid;
  for (int nt : n_trees) {
    for (int md : max_depth) {
      for (double lr : learning_rate) {
        for (double ss : subsample) {
          for (int msl : min_samples_leaf) {
            GbtParams p;
            p.n_trees = nt;
            p.max_depth = md;
            p.learning_rate = lr;
            p.subsample = ss;
            p.min_samples_leaf = msl;
            p.seed = seed;
            grid.push_back(p);
          }
        }
      }
    }
  }
  return grid;
}

}  // namespace aeromix
