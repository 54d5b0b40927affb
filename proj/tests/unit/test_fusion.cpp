#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "aeromix/error.hpp"
#include "aeromix/fusion.hpp"
#include "aeromix/rng.hpp"

using namespace aeromix;

namespace {

WindowSample sample_of(Sensor sensor, Algorithm alg, double mean, double weight,
                       bool valid = true) {
  WindowSample s;
  s.sensor = sensor;
  s.algorithm = alg;
  s.mean_aod = mean;
  s.weight = weight;
  s.n_valid = valid ? 9 : 0;
  s.valid = valid;
  return s;
}

// Per-product single-feature matrices over a shared key set; target is a
// noisy function of the product features.
std::map<ProductId, TrainingMatrix> make_matrices(
    const std::vector<ProductId>& products, std::size_t n, std::uint64_t seed,
    std::vector<RowKey>* keys_out = nullptr) {
  Rng rng(seed);
  std::map<ProductId, TrainingMatrix> matrices;
  for (ProductId p : products) {
    matrices.emplace(p, TrainingMatrix({"x"}));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const RowKey key{"s" + std::to_string(i), Date{2015, 1, 1}.plus_days(static_cast<int>(i) % 30)};
    const double latent = rng.normal();
    const double target = std::max(0.0, 30.0 + 8.0 * latent + 0.5 * rng.normal());
    for (auto& [p, m] : matrices) {
      m.add_row(key, {latent + 0.1 * rng.normal()}, target);
    }
    if (keys_out != nullptr) keys_out->push_back(key);
  }
  return matrices;
}

}  // namespace

TEST_CASE("the 11 canonical scenarios match the published product sets") {
  using P = ProductId;
  const auto scenarios = canonical_scenarios();
  REQUIRE(scenarios.size() == 11);
  const std::vector<std::vector<P>> expected = {
      {P::MDB, P::VDB},
      {P::MDB, P::MDT, P::VDB},
      {P::MDB, P::VDB, P::VDT},
      {P::MDB, P::MDT, P::VDB, P::VDT},
      {P::MDT, P::VDT},
      {P::MDB, P::MDT, P::VDT},
      {P::MDT, P::VDB, P::VDT},
      {P::MDB, P::MDT},
      {P::VDB, P::VDT},
      {P::MDB, P::VDT},
      {P::MDT, P::VDB},
  };
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    CHECK(scenarios[i].id == static_cast<int>(i) + 1);
    CHECK(scenarios[i].products == expected[i]);
  }
  CHECK(scenario_by_id(1).products == expected[0]);
  CHECK_THROWS_AS(scenario_by_id(12), Error);
}

TEST_CASE("data-level fusion drops zero weights and averages by quality") {
  const auto s1 = sample_of(Sensor::ModisTerra, Algorithm::DeepBlue, 0.5, 1.0);
  const auto s2 = sample_of(Sensor::ViirsSnpp, Algorithm::DeepBlue, 0.9, 0.0);
  CHECK(*fuse_data_level({s1, s2}) == doctest::Approx(0.5));

  const auto s3 = sample_of(Sensor::ModisTerra, Algorithm::DeepBlue, 0.4, 4.0 / 9.0);
  const auto s4 = sample_of(Sensor::ViirsSnpp, Algorithm::DeepBlue, 0.6, 4.0 / 9.0);
  CHECK(*fuse_data_level({s3, s4}) == doctest::Approx(0.5));

  const auto z1 = sample_of(Sensor::ModisTerra, Algorithm::DeepBlue, 0.4, 0.0);
  const auto z2 = sample_of(Sensor::ViirsSnpp, Algorithm::DeepBlue, 0.6, 0.0);
  CHECK(!fuse_data_level({z1, z2}).has_value());

  // Invalid samples are excluded even with positive weight.
  const auto inv = sample_of(Sensor::ModisAqua, Algorithm::DarkTarget, 9.0, 1.0, false);
  CHECK(*fuse_data_level({s1, inv}) == doctest::Approx(0.5));
  CHECK(!fuse_data_level({inv}).has_value());
}

TEST_CASE("data-level fusion is a convex combination, invariant to ordering") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<WindowSample> samples;
    const std::size_t k = 2 + rng.bounded(4);
    double lo = 1e9, hi = -1e9;
    for (std::size_t i = 0; i < k; ++i) {
      const double mean = rng.uniform() * 2.0;
      const double weight = rng.bounded(10) / 9.0;
      const auto sensor = static_cast<Sensor>(rng.bounded(3));
      const auto alg = static_cast<Algorithm>(rng.bounded(2));
      samples.push_back(sample_of(sensor, alg, mean, weight));
      if (weight > 0) {
        lo = std::min(lo, mean);
        hi = std::max(hi, mean);
      }
    }
    const auto fused = fuse_data_level(samples);
    const auto order = shuffled_indices(samples.size(), trial + 1);
    std::vector<WindowSample> permuted;
    for (std::size_t i : order) permuted.push_back(samples[i]);
    const auto fused2 = fuse_data_level(permuted);
    CHECK(fused.has_value() == fused2.has_value());
    if (fused) {
      CHECK(*fused == *fused2);  // exact, not approximate
      CHECK(*fused >= lo - 1e-12);
      CHECK(*fused <= hi + 1e-12);
    }
  }
}

TEST_CASE("single-product stack recovers identity when decisions equal targets") {
  // A two-leaf dataset the base model fits exactly, so decisions == targets
  // and least squares must find A = 1, B = 0.
  std::map<ProductId, TrainingMatrix> matrices;
  TrainingMatrix m({"x"});
  for (int i = 0; i < 20; ++i) {
    m.add_row(RowKey{"s" + std::to_string(i), Date{2015, 1, 1}},
              {i < 10 ? 0.0 : 1.0}, i < 10 ? 10.0 : 50.0);
  }
  matrices.emplace(ProductId::VDB, std::move(m));

  FusionScenario scenario{9, {ProductId::VDB}};  // single-product for the test
  std::map<ProductId, GbtParams> params;
  GbtParams p;
  p.n_trees = 1;
  p.max_depth = 1;
  p.learning_rate = 1.0;
  p.min_samples_leaf = 1;
  params[ProductId::VDB] = p;
  const DecisionFusionModel model =
      train_decision_fusion(scenario, matrices, params, 42);
  REQUIRE(model.combiners.count(1));
  const LinearModel& combiner = model.combiners.at(1);
  CHECK(combiner.coefficients[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(combiner.bias == doctest::Approx(0.0).scale(10.0).epsilon(1e-8));
}

TEST_CASE("identical decision columns tie to the single-product fit (minimum norm)") {
  std::vector<RowKey> keys;
  auto matrices = make_matrices({ProductId::MDB, ProductId::VDB}, 80, 5, &keys);
  // Force identical features so both base models produce identical columns.
  std::map<ProductId, TrainingMatrix> identical;
  identical.emplace(ProductId::MDB, matrices.at(ProductId::MDB));
  identical.emplace(ProductId::VDB, matrices.at(ProductId::MDB));

  GbtParams p;
  p.n_trees = 20;
  p.max_depth = 3;
  std::map<ProductId, GbtParams> params{{ProductId::MDB, p}, {ProductId::VDB, p}};

  FusionScenario two{1, {ProductId::MDB, ProductId::VDB}};
  const DecisionFusionModel stacked =
      train_decision_fusion(two, identical, params, 7);

  FusionScenario one{9, {ProductId::MDB}};
  std::map<ProductId, TrainingMatrix> single;
  single.emplace(ProductId::MDB, identical.at(ProductId::MDB));
  const DecisionFusionModel lone = train_decision_fusion(one, single, params, 7);

  // Same seed stream per product id, same rows: the MDB base models agree,
  // and the stacked prediction must match the single-product one.
  const TrainingMatrix& m = identical.at(ProductId::MDB);
  double max_diff = 0.0;
  for (std::size_t i = 0; i < m.n_rows(); ++i) {
    const double est = stacked.base_models.at(ProductId::MDB).predict(m.row(i));
    DecisionVector dv;
    dv.estimates[ProductId::MDB] = est;
    dv.estimates[ProductId::VDB] =
        stacked.base_models.at(ProductId::VDB).predict(m.row(i));
    const double fused = apply_decision_fusion(stacked, dv);
    DecisionVector dv1;
    dv1.estimates[ProductId::MDB] = lone.base_models.at(ProductId::MDB).predict(m.row(i));
    const double alone = apply_decision_fusion(lone, dv1);
    max_diff = std::max(max_diff, std::abs(fused - alone));
  }
  CHECK(max_diff < 1e-6);
}

TEST_CASE("apply_decision_fusion is the weighted sum plus bias") {
  DecisionFusionModel model;
  model.scenario_id = 1;
  model.products = {ProductId::MDB, ProductId::VDB};
  LinearModel combiner;
  combiner.coefficients = {1.0, 1.0};
  combiner.bias = 5.0;
  model.combiners[3] = combiner;

  DecisionVector dv;
  dv.estimates[ProductId::MDB] = 10.0;
  dv.estimates[ProductId::VDB] = 20.0;
  CHECK(apply_decision_fusion(model, dv) == doctest::Approx(35.0));

  combiner.coefficients = {0.5, 0.5};
  combiner.bias = 0.0;
  model.combiners[3] = combiner;
  CHECK(apply_decision_fusion(model, dv) == doctest::Approx(15.0));

  DecisionVector missing;
  missing.estimates[ProductId::MDB] = 10.0;
  CHECK_THROWS_AS(apply_decision_fusion(model, missing), Error);
}

TEST_CASE("stacking training SSE never exceeds any single base model's SSE") {
  std::vector<RowKey> keys;
  auto matrices = make_matrices({ProductId::MDB, ProductId::VDB, ProductId::VDT},
                                120, 99, &keys);
  GbtParams p;
  p.n_trees = 15;
  p.max_depth = 2;
  std::map<ProductId, GbtParams> params{{ProductId::MDB, p},
                                        {ProductId::VDB, p},
                                        {ProductId::VDT, p}};
  FusionScenario scenario{3, {ProductId::MDB, ProductId::VDB, ProductId::VDT}};
  const DecisionFusionModel model = train_decision_fusion(scenario, matrices, params, 3);

  double fused_sse = 0.0;
  std::map<ProductId, double> single_sse;
  const TrainingMatrix& first = matrices.at(ProductId::MDB);
  for (std::size_t i = 0; i < first.n_rows(); ++i) {
    DecisionVector dv;
    for (ProductId pid : scenario.products) {
      dv.estimates[pid] =
          model.base_models.at(pid).predict(matrices.at(pid).row(i));
    }
    const double err = apply_decision_fusion(model, dv) - first.target(i);
    fused_sse += err * err;
    for (ProductId pid : scenario.products) {
      const double e = dv.estimates.at(pid) - first.target(i);
      single_sse[pid] += e * e;
    }
  }
  for (const auto& [pid, sse] : single_sse) {
    CHECK(fused_sse <= sse * (1.0 + 1e-9) + 1e-9);
  }
}

TEST_CASE("coverage ratio and union semantics") {
  CHECK(coverage_percent(69, 100) == doctest::Approx(69.0));
  CHECK_THROWS_AS(coverage_percent(1, 0), Error);

  // Complementary halves: union covers everything.
  std::set<int> a, b;
  for (int i = 0; i < 50; ++i) a.insert(i);
  for (int i = 50; i < 100; ++i) b.insert(i);
  std::set<int> u(a);
  u.insert(b.begin(), b.end());
  CHECK(coverage_percent(u.size(), 100) == doctest::Approx(100.0));

  // Independent masks 0.6 / 0.7 on a 100x100 grid: union near 88%.
  Rng rng(31337);
  std::size_t union_count = 0;
  const std::size_t cells = 100 * 100;
  for (std::size_t i = 0; i < cells; ++i) {
    const bool in_a = rng.uniform() < 0.6;
    const bool in_b = rng.uniform() < 0.7;
    if (in_a || in_b) ++union_count;
  }
  const double pct = coverage_percent(union_count, cells);
  CHECK(pct == doctest::Approx(88.0).epsilon(0.025));  // 1 - 0.4*0.3, ±2%
}

TEST_CASE("subset fallback predicts with partial decisions") {
  std::vector<RowKey> keys;
  auto matrices = make_matrices({ProductId::MDB, ProductId::VDB}, 60, 8, &keys);
  GbtParams p;
  p.n_trees = 10;
  p.max_depth = 2;
  std::map<ProductId, GbtParams> params{{ProductId::MDB, p}, {ProductId::VDB, p}};
  FusionScenario scenario{1, {ProductId::MDB, ProductId::VDB}};
  const DecisionFusionModel model = train_decision_fusion(scenario, matrices, params, 4);

  // All three non-empty subsets have combiners here.
  CHECK(model.combiners.size() == 3);
  std::map<ProductId, double> only_mdb{{ProductId::MDB, 30.0}};
  const auto est = model.predict_subset(only_mdb);
  REQUIRE(est.has_value());
  CHECK(std::isfinite(*est));
  CHECK(!model.predict_subset({}).has_value());
}

TEST_CASE("run_scenario: degenerate single-product stack matches its base model") {
  std::vector<RowKey> keys;
  auto matrices = make_matrices({ProductId::VDB}, 90, 55, &keys);
  FusionScenario one{9, {ProductId::VDB}};
  ScenarioRunParams run;
  GbtParams p;
  p.n_trees = 20;
  p.max_depth = 2;
  run.grid = {p};
  run.cv_folds = 3;
  run.seed = 12;
  const ScenarioReport report = run_scenario(one, matrices, keys, run);
  CHECK(report.fused_metrics.rmse ==
        doctest::Approx(report.product_metrics.at(ProductId::VDB).rmse).epsilon(1e-6));
  CHECK(report.n_train + report.n_test == keys.size());
  CHECK(report.fused_coverage == doctest::Approx(100.0));
}

TEST_CASE("run_scenario is reproducible for a fixed seed") {
  std::vector<RowKey> keys;
  auto matrices = make_matrices({ProductId::MDB, ProductId::VDB}, 70, 31, &keys);
  FusionScenario scenario{1, {ProductId::MDB, ProductId::VDB}};
  ScenarioRunParams run;
  GbtParams p;
  p.n_trees = 10;
  p.max_depth = 2;
  run.grid = {p};
  run.cv_folds = 3;
  run.seed = 5;
  const ScenarioReport a = run_scenario(scenario, matrices, keys, run);
  const ScenarioReport b = run_scenario(scenario, matrices, keys, run);
  CHECK(a.fused_metrics.rmse == b.fused_metrics.rmse);
  CHECK(a.fused_metrics.r2 == b.fused_metrics.r2);
  CHECK(a.test_keys.size() == b.test_keys.size());
}
