#pragma once

#include <compare>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "aeromix/date.hpp"
#include "aeromix/tables.hpp"

namespace aeromix {

// Join key for model rows.
struct RowKey {
  std::string station_id;
  Date date;

  auto operator<=>(const RowKey&) const = default;
};

// Dense feature rows with targets, keyed by (station, date). All entries are
// finite; targets are nonnegative.
class TrainingMatrix {
 public:
  TrainingMatrix() = default;
  explicit TrainingMatrix(std::vector<std::string> feature_names);

  // Feature order used throughout the pipeline:
  // AOD, East, North, DPT, T, Blh, SP, Lai_hv, Lai_lv, WS, WD, Cdir, Uvb,
  // RH, DOY.
  static std::vector<std::string> standard_feature_names();

  void add_row(RowKey key, const std::vector<double>& features, double target);

  std::size_t n_rows() const { return targets_.size(); }
  std::size_t arity() const { return feature_names_.size(); }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  std::span<const double> row(std::size_t i) const;
  double target(std::size_t i) const { return targets_[i]; }
  const RowKey& key(std::size_t i) const { return keys_[i]; }
  const std::vector<double>& targets() const { return targets_; }
  const std::vector<RowKey>& keys() const { return keys_; }

  std::size_t feature_index(const std::string& name) const;
  TrainingMatrix subset(const std::vector<std::size_t>& rows) const;
  // Row index per key (keys are unique within a matrix).
  std::map<RowKey, std::size_t> key_index() const;

 private:
  std::vector<std::string> feature_names_;
  std::vector<RowKey> keys_;
  std::vector<double> features_;  // row-major
  std::vector<double> targets_;
};

// CSV: station_id,date,<feature columns>,target_pm25.
void write_training_matrix(const TrainingMatrix& matrix, const std::string& path);
TrainingMatrix load_training_matrix(const std::string& path);

struct BuildResult {
  TrainingMatrix matrix;
  std::size_t dropped = 0;
};

// One row per station record whose key has both an AOD value and met
// covariates; target is the humidity-corrected PM2.5. Records lacking any
// required feature are dropped and counted. Empty output is a pipeline
// error.
BuildResult build_training_matrix(const std::map<RowKey, double>& aod_by_key,
                                  const std::vector<StationRecord>& stations,
                                  const std::map<RowKey, MetRecord>& met_by_key);

}  // namespace aeromix
