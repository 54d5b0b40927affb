#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aeromix/corrections.hpp"
#include "aeromix/crossfill.hpp"
#include "aeromix/cv.hpp"
#include "aeromix/fusion.hpp"
#include "aeromix/mapgen.hpp"
#include "aeromix/synth.hpp"
#include "aeromix/training.hpp"
#include "aeromix/variogram.hpp"
#include "aeromix/window.hpp"

namespace aeromix {

// Run configuration, loaded from a key = value text file. Defaults follow
// the method: 3x3 window std threshold 0.02, 75/25 split, 5-fold CV.
struct PipelineConfig {
  std::string data_dir;
  std::vector<ProductId> products = {ProductId::MDB, ProductId::MDT, ProductId::VDB,
                                     ProductId::VDT};
  double std_threshold = kDefaultStdThreshold;
  double rh_max = kDefaultRhMax;
  double blh_min = kDefaultBlhMin;
  double split_ratio = 0.75;
  int cv_folds = kDefaultCvFolds;
  int min_pairs = kMinCrossFillPairs;
  double idw_power = kDefaultIdwPower;
  std::vector<int> scenarios = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};

  std::vector<int> gbt_n_trees = {100, 300};
  std::vector<int> gbt_max_depth = {3, 5, 7};
  std::vector<double> gbt_learning_rate = {0.05, 0.1};
  std::vector<double> gbt_subsample = {0.8, 1.0};
  std::vector<int> gbt_min_samples_leaf = {3};

  std::vector<VariogramKind> variogram_kinds = {VariogramKind::Spherical,
                                                VariogramKind::Exponential,
                                                VariogramKind::Gaussian};

  int map_scenario = 1;
  int quasi_stride = 1;
  double map_vmin = 0.0;
  double map_vmax = 100.0;

  std::uint64_t seed = 42;

  static PipelineConfig load(const std::string& path);
  std::string format() const;
  std::vector<GbtParams> param_grid() const;
  void validate() const;
};

// A platform-level product: one (sensor, algorithm) pair.
struct PlatformProduct {
  Sensor sensor;
  Algorithm algorithm;

  auto operator<=>(const PlatformProduct&) const = default;
};

struct CrossFillPair {
  std::optional<CrossFillRegression> terra_to_aqua;
  std::optional<CrossFillRegression> aqua_to_terra;
};

// Everything derived from one scene directory: corrected station records,
// met kriged to the stations, per-platform window samples, per-product daily
// AODs and training matrices.
struct Dataset {
  GridGeometry geom;
  std::vector<StationRecord> stations;  // pm25_corrected set where met allowed
  std::vector<Date> dates;
  std::vector<RowKey> all_keys;  // one per station record
  std::map<RowKey, MetRecord> met_at_stations;
  std::map<PlatformProduct, std::map<RowKey, WindowSample>> window_samples;
  std::map<ProductId, CrossFillPair> crossfill;
  std::map<ProductId, std::map<RowKey, double>> daily_aod;  // unnormalized
  std::map<ProductId, TrainingMatrix> product_matrices;
  std::map<ProductId, std::size_t> matrix_drop_counts;
  std::vector<MetRecord> met_records;
  // Per-variable variogram models fitted on the first day's met samples.
  std::vector<VariogramModel> met_variograms;
};

Dataset load_dataset(const PipelineConfig& config);

// Data-level fusion experiment: one global train/test key split, one tuned
// model per source (the quality-weighted fused AOD plus each individual
// product), sources evaluated on their own test rows, and paired
// comparisons restricted to keys valid for both the fused product and the
// individual one.
struct DataLevelSource {
  std::string name;  // "fused" or a product tag
  Metrics metrics;
  double coverage = 0.0;  // percent of the key domain
  std::size_t n_train = 0;
};

struct DataLevelPaired {
  ProductId product;
  std::size_t n = 0;
  double fused_rmse = 0.0;
  double product_rmse = 0.0;
  double fused_mae = 0.0;
  double product_mae = 0.0;
};

struct DataLevelReport {
  std::vector<DataLevelSource> sources;
  std::vector<DataLevelPaired> paired;
};

// The fused matrix carries the quality-weighted AOD (normalized by BLH) as
// its AOD feature; its key set is the data-level coverage.
TrainingMatrix build_fused_matrix(const PipelineConfig& config, const Dataset& dataset,
                                  std::size_t* dropped = nullptr);
DataLevelReport run_data_level(const PipelineConfig& config, const Dataset& dataset,
                               GBTModel* out_fused_model = nullptr,
                               TrainingMatrix* out_fused_matrix = nullptr);

// Command entry points shared by the CLI and the test suites. Each writes
// its outputs plus a manifest under out_dir.
void cmd_synth(const std::string& scene_config_path, const std::string& out_dir);
void cmd_preprocess(const PipelineConfig& config, const std::string& config_path,
                    const std::string& out_dir);
void cmd_fuse_data(const PipelineConfig& config, const std::string& config_path,
                   const std::string& out_dir);
void cmd_fuse_decision(const PipelineConfig& config, const std::string& config_path,
                       const std::vector<int>& scenario_ids, const std::string& out_dir);
void cmd_map(const PipelineConfig& config, const std::string& config_path,
             const Date& date, const std::string& out_dir);
void cmd_eval(const PipelineConfig& config, const std::string& config_path,
              const std::string& out_dir);

}  // namespace aeromix
