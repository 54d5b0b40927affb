#include "aeromix/training.hpp"

#include <algorithm>
#include <cmath>

#include "aeromix/csv.hpp"
#include "aeromix/error.hpp"
#include "aeromix/strings.hpp"

namespace aeromix {

TrainingMatrix::TrainingMatrix(std::vector<std::string> feature_names)
    : feature_names_(std::move(feature_names)) {
  if (feature_names_.empty()) {
    fail(ErrorClass::ValidationError, "training matrix needs >= 1 feature");
  }
}

std::vector<std::string> TrainingMatrix::standard_feature_names() {
  std::vector<std::string> names = {"AOD", "East", "North"};
  static const char* met[] = {"DPT", "T",  "Blh",  "SP",  "Lai_hv", "Lai_lv",
                              "WS",  "WD", "Cdir", "Uvb", "RH"};
  names.insert(names.end(), std::begin(met), std::end(met));
  names.push_back("DOY");
  return names;
}

void TrainingMatrix::add_row(RowKey key, const std::vector<double>& features,
                             double target) {
  if (features.size() != arity()) {
    fail(ErrorClass::ValidationError,
         "row arity " + std::to_string(features.size()) + " != " +
             std::to_string(arity()));
  }
  for (double v : features) {
    if (!std::isfinite(v)) {
      fail(ErrorClass::ValidationError,
           "non-finite feature in row for " + key.station_id + " " +
               key.date.to_string());
    }
  }
  if (!std::isfinite(target) || target < 0.0) {
    fail(ErrorClass::ValidationError,
         "target must be finite and >= 0 for " + key.station_id + " " +
             key.date.to_string());
  }
  keys_.push_back(std::move(key));
  features_.insert(features_.end(), features.begin(), features.end());
  targets_.push_back(target);
}

std::span<const double> TrainingMatrix::row(std::size_t i) const {
  return {features_.data() + i * arity(), arity()};
}

std::size_t TrainingMatrix::feature_index(const std::string& name) const {
  for (std::size_t i = 0; i < feature_names_.size(); ++i) {
    if (feature_names_[i] == name) return i;
  }
  fail(ErrorClass::ValidationError, "unknown feature '" + name + "'");
}

TrainingMatrix TrainingMatrix::subset(const std::vector<std::size_t>& rows) const {
  TrainingMatrix out(feature_names_);
  for (std::size_t r : rows) {
    out.keys_.push_back(keys_[r]);
    const auto row_span = row(r);
    out.features_.insert(out.features_.end(), row_span.begin(), row_span.end());
    out.targets_.push_back(targets_[r]);
  }
  return out;
}

std::map<RowKey, std::size_t> TrainingMatrix::key_index() const {
  std::map<RowKey, std::size_t> index;
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (!index.emplace(keys_[i], i).second) {
      fail(ErrorClass::ValidationError,
           "duplicate key in training matrix: " + keys_[i].station_id + " " +
               keys_[i].date.to_string());
    }
  }
  return index;
}

void write_training_matrix(const TrainingMatrix& matrix, const std::string& path) {
  CsvTable table;
  table.header = {"station_id", "date"};
  for (const auto& name : matrix.feature_names()) table.header.push_back(name);
  table.header.push_back("target_pm25");
  for (std::size_t i = 0; i < matrix.n_rows(); ++i) {
    std::vector<std::string> row = {matrix.key(i).station_id,
                                    matrix.key(i).date.to_string()};
    for (double v : matrix.row(i)) row.push_back(format_double(v));
    row.push_back(format_double(matrix.target(i)));
    table.rows.push_back(std::move(row));
  }
  write_csv(path, table);
}

TrainingMatrix load_training_matrix(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 4 || table.header.front() != "station_id" ||
      table.header[1] != "date" || table.header.back() != "target_pm25") {
    fail(ErrorClass::ParseError,
         path + ": expected header station_id,date,<features...>,target_pm25");
  }
  std::vector<std::string> names(table.header.begin() + 2, table.header.end() - 1);
  TrainingMatrix matrix(names);
  std::vector<double> features(names.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string where = path + " row " + std::to_string(i + 2);
    RowKey key{row[0], Date::parse(row[1])};
    for (std::size_t f = 0; f < names.size(); ++f) {
      features[f] = parse_double(row[2 + f], where + " " + names[f]);
    }
    const double target = parse_double(row.back(), where + " target_pm25");
    matrix.add_row(std::move(key), features, target);
  }
  return matrix;
}

BuildResult build_training_matrix(const std::map<RowKey, double>& aod_by_key,
                                  const std::vector<StationRecord>& stations,
                                  const std::map<RowKey, MetRecord>& met_by_key) {
  BuildResult result;
  result.matrix = TrainingMatrix(TrainingMatrix::standard_feature_names());
  std::size_t no_aod = 0, no_met = 0, no_target = 0;
  std::vector<double> features;
  for (const StationRecord& station : stations) {
    const RowKey key{station.station_id, station.date};
    const auto aod_it = aod_by_key.find(key);
    if (aod_it == aod_by_key.end()) {
      ++no_aod;
      continue;
    }
    const auto met_it = met_by_key.find(key);
    if (met_it == met_by_key.end()) {
      ++no_met;
      continue;
    }
    if (!station.pm25_corrected) {
      ++no_target;
      continue;
    }
    const MetRecord& met = met_it->second;
    features.clear();
    features.push_back(aod_it->second);
    features.push_back(station.location.east);
    features.push_back(station.location.north);
    for (std::size_t v = 0; v < MetRecord::kNumVars; ++v) features.push_back(met.var(v));
    features.push_back(static_cast<double>(station.date.day_of_year()));
    result.matrix.add_row(key, features, *station.pm25_corrected);
  }
  result.dropped = no_aod + no_met + no_target;
  if (result.matrix.n_rows() == 0) {
    fail(ErrorClass::PipelineError,
         "empty training matrix: " + std::to_string(stations.size()) +
             " station records, dropped " + std::to_string(no_aod) + " without AOD, " +
             std::to_string(no_met) + " without met, " + std::to_string(no_target) +
             " without corrected target");
  }
  return result;
}

}  // namespace aeromix
