#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aeromix/gbt.hpp"
#include "aeromix/training.hpp"

namespace aeromix {

inline constexpr int kDefaultCvFolds = 5;

struct CvCell {
  GbtParams params;
  std::vector<double> fold_rmse;
  double mean_rmse = 0.0;
};

struct CvResult {
  std::vector<CvCell> table;  // grid order
  std::size_t best_index = 0;

  const GbtParams& best_params() const { return table[best_index].params; }
};

// Deterministic k-fold search over a hyperparameter grid: one RMSE per
// (grid point, fold), averaged per point; the minimum wins, ties broken by
// grid order. Fold assignment depends only on (n, k, seed). Evaluations run
// in parallel with results written into fixed slots, so the worker count
// cannot change the outcome.
CvResult kfold_cv(const TrainingMatrix& data, const std::vector<GbtParams>& grid,
                  int k, std::uint64_t seed);

void write_cv_table(const CvResult& result, const std::string& path);

// Cartesian product in a fixed nesting order (n_trees, max_depth,
// learning_rate, subsample, min_samples_leaf).
std::vector<GbtParams> make_param_grid(const std::vector<int>& n_trees,
                                       const std::vector<int>& max_depth,
                                       const std::vector<double>& learning_rate,
                                       const std::vector<double>& subsample,
                                       const std::vector<int>& min_samples_leaf,
                                       std::uint64_t seed);

}  // namespace aeromix
