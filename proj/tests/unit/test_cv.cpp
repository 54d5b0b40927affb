#include <doctest.h>

#include <algorithm>
#include <set>

#include "aeromix/cv.hpp"
#include "aeromix/error.hpp"
#include "aeromix/parallel.hpp"
#include "aeromix/rng.hpp"
#include "aeromix/split.hpp"

using namespace aeromix;

namespace {

TrainingMatrix random_matrix(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  TrainingMatrix m({"x", "z"});
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.normal();
    const double z = rng.normal();
    m.add_row(RowKey{"s" + std::to_string(i), Date{2015, 1, 1}}, {x, z},
              std::max(0.0, 30.0 + 6.0 * x - 2.0 * z + rng.normal()));
  }
  return m;
}

}  // namespace

TEST_CASE("split honors the 75/25 ratio and partitions the rows") {
  const SplitIndices s = split_indices(100, 0.75, 42);
  CHECK(s.train.size() == 75);
  CHECK(s.test.size() == 25);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 100);
}

TEST_CASE("same seed gives the identical partition, different seeds differ") {
  const SplitIndices a = split_indices(60, 0.75, 7);
  const SplitIndices b = split_indices(60, 0.75, 7);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);
  const SplitIndices c = split_indices(60, 0.75, 8);
  CHECK(a.train != c.train);
}

TEST_CASE("degenerate ratios and tiny inputs are rejected") {
  CHECK_THROWS_AS(split_indices(100, 1.0, 1), Error);
  CHECK_THROWS_AS(split_indices(100, 0.0, 1), Error);
  CHECK_THROWS_AS(split_indices(3, 0.75, 1), Error);
  // round(0.99 * 4) = 4 would empty the test side.
  CHECK_THROWS_AS(split_indices(4, 0.99, 1), Error);
}

TEST_CASE("fold assignment is balanced and deterministic") {
  const std::vector<int> folds = kfold_assignment(103, 5, 11);
  std::array<int, 5> counts{};
  for (int f : folds) {
    REQUIRE(f >= 0);
    REQUIRE(f < 5);
    ++counts[static_cast<std::size_t>(f)];
  }
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  CHECK(*hi - *lo <= 1);
  CHECK(kfold_assignment(103, 5, 11) == folds);
}

TEST_CASE("single grid point is selected") {
  const TrainingMatrix data = random_matrix(40, 3);
  GbtParams p;
  p.n_trees = 10;
  p.max_depth = 2;
  const CvResult cv = kfold_cv(data, {p}, 4, 9);
  CHECK(cv.best_index == 0);
  CHECK(cv.table.size() == 1);
  CHECK(cv.table[0].fold_rmse.size() == 4);
}

TEST_CASE("constant model loses to a real fit on non-constant targets") {
  const TrainingMatrix data = random_matrix(60, 21);
  GbtParams constant;
  constant.n_trees = 10;
  constant.learning_rate = 0.0;  // stays at the target mean
  GbtParams real;
  real.n_trees = 40;
  real.max_depth = 3;
  real.learning_rate = 0.1;
  const CvResult cv = kfold_cv(data, {constant, real}, 5, 33);
  CHECK(cv.best_index == 1);
  CHECK(cv.table[1].mean_rmse < cv.table[0].mean_rmse);
}

TEST_CASE("cv table is reproducible and thread-count independent") {
  const TrainingMatrix data = random_matrix(50, 77);
  GbtParams a;
  a.n_trees = 15;
  a.max_depth = 2;
  GbtParams b = a;
  b.max_depth = 4;

  set_max_threads(1);
  const CvResult serial = kfold_cv(data, {a, b}, 5, 3);
  set_max_threads(4);
  const CvResult parallel = kfold_cv(data, {a, b}, 5, 3);
  set_max_threads(0);

  REQUIRE(serial.table.size() == parallel.table.size());
  CHECK(serial.best_index == parallel.best_index);
  for (std::size_t g = 0; g < serial.table.size(); ++g) {
    CHECK(serial.table[g].mean_rmse == parallel.table[g].mean_rmse);
    CHECK(serial.table[g].fold_rmse == parallel.table[g].fold_rmse);
  }
}

TEST_CASE("empty grid is an error") {
  const TrainingMatrix data = random_matrix(20, 5);
  CHECK_THROWS_AS(kfold_cv(data, {}, 5, 1), Error);
}

TEST_CASE("parameter grid enumerates in fixed nesting order") {
  const auto grid = make_param_grid({10, 20}, {2, 3}, {0.1}, {1.0}, {3}, 0);
  REQUIRE(grid.size() == 4);
  CHECK(grid[0].n_trees == 10);
  CHECK(grid[0].max_depth == 2);
  CHECK(grid[1].n_trees == 10);
  CHECK(grid[1].max_depth == 3);
  CHECK(grid[2].n_trees == 20);
  CHECK(grid[2].max_depth == 2);
}
