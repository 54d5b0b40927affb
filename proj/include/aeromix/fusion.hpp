#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aeromix/cv.hpp"
#include "aeromix/gbt.hpp"
#include "aeromix/linear.hpp"
#include "aeromix/metrics.hpp"
#include "aeromix/training.hpp"
#include "aeromix/window.hpp"

namespace aeromix {

// Daily AOD products: MODIS / VIIRS crossed with Deep Blue / Dark Target.
enum class ProductId { MDB = 0, MDT = 1, VDB = 2, VDT = 3 };

const char* to_string(ProductId p);
ProductId product_from_string(const std::string& s);

// A decision-level fusion input set: one of the 11 canonical product
// combinations.
struct FusionScenario {
  int id = 0;
  std::vector<ProductId> products;  // ascending ProductId order
};

std::vector<FusionScenario> canonical_scenarios();
FusionScenario scenario_by_id(int id);

// Quality-weighted average of per-product window AODs. Samples that are
// invalid or carry zero weight drop out; when nothing remains the result is
// no-value (not an error). Independent of input ordering.
std::optional<double> fuse_data_level(const std::vector<WindowSample>& samples);

// Per-product base-model PM2.5 estimates at one point.
struct DecisionVector {
  std::map<ProductId, double> estimates;
};

// Per-product boosted-tree base models plus linear stacking combiners. The
// primary combiner weights the full product set; additional combiners are
// kept per product subset, fit on the training keys where exactly that
// subset was available, so any point with at least one valid product gets an
// estimate.
struct DecisionFusionModel {
  int scenario_id = 0;
  std::vector<ProductId> products;
  std::map<ProductId, GBTModel> base_models;
  // Key: bitmask over `products` (bit i <-> products[i]). The full-set mask
  // is always present.
  std::map<unsigned, LinearModel> combiners;

  // Combiner output for exactly the available subset; mean of decisions when
  // that subset had too few training rows for a fit. nullopt when no
  // scenario product is available.
  std::optional<double> predict_subset(const std::map<ProductId, double>& decisions) const;
};

// Trains one base model per product on the keys where every scenario
// product is valid, then fits the stacking coefficients by least squares of
// the targets on the base-model decisions. Subset combiners are fit on the
// keys of the supplied matrices where their products are co-valid. Matrices
// must contain training-side rows only.
DecisionFusionModel train_decision_fusion(
    const FusionScenario& scenario,
    const std::map<ProductId, TrainingMatrix>& matrices,
    const std::map<ProductId, GbtParams>& params, std::uint64_t seed);

// Weighted sum of the full decision vector plus bias. The vector must carry
// exactly the scenario products.
double apply_decision_fusion(const DecisionFusionModel& model,
                             const DecisionVector& decisions);

// 100 * valid / domain.
double coverage_percent(std::size_t valid_count, std::size_t domain_size);

struct ScenarioRunParams {
  double split_ratio = 0.75;
  int cv_folds = kDefaultCvFolds;
  std::vector<GbtParams> grid;
  std::uint64_t seed = 0;
};

struct ScenarioReport {
  FusionScenario scenario;
  std::map<ProductId, Metrics> product_metrics;
  Metrics fused_metrics;
  std::map<ProductId, double> product_coverage;  // percent of the key domain
  double fused_coverage = 0.0;                   // union coverage, percent
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::map<ProductId, GbtParams> tuned_params;
  std::vector<RowKey> test_keys;  // shared across fused and per-product evals
};

// Full per-scenario experiment: split the co-valid keys 75/25, tune each
// base model by k-fold CV on the training side, train the fusion stack,
// evaluate the fused estimate and every individual product on the same test
// keys, and census coverage over `all_keys`. Points whose products are only
// partially valid stay out of the test set but do feed the subset
// combiners.
ScenarioReport run_scenario(const FusionScenario& scenario,
                            const std::map<ProductId, TrainingMatrix>& matrices,
                            const std::vector<RowKey>& all_keys,
                            const ScenarioRunParams& run,
                            DecisionFusionModel* out_model = nullptr);

void write_scenario_reports_csv(const std::vector<ScenarioReport>& reports,
                                const std::string& path);
std::string format_scenario_table(const std::vector<ScenarioReport>& reports);

}  // namespace aeromix
