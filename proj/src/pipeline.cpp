#include "aeromix/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "aeromix/corrections.hpp"
#include "aeromix/csv.hpp"
#include "aeromix/error.hpp"
#include "aeromix/kriging.hpp"
#include "aeromix/model_io.hpp"
#include "aeromix/rng.hpp"
#include "aeromix/split.hpp"
#include "aeromix/strings.hpp"
#include "aeromix/version.hpp"

namespace fs = std::filesystem;

namespace aeromix {

namespace {

std::vector<std::string> parse_list(const std::string& value) {
  std::vector<std::string> out;
  for (const auto& token : split(value, ',')) {
    const std::string t = trim(token);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::string format_list(const std::vector<std::string>& items) {
  return join(items, ",");
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::string& path) {
  const std::string text = read_text_file(path);
  std::map<std::string, std::string> kv;
  std::size_t line_no = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorClass::ConfigInvalid,
           path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  PipelineConfig config;
  const auto get = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  const auto get_double = [&](const char* key, double& out) {
    if (const std::string* v = get(key)) out = parse_double(*v, key);
  };
  const auto get_int = [&](const char* key, int& out) {
    if (const std::string* v = get(key)) out = static_cast<int>(parse_long(*v, key));
  };
  const auto get_int_list = [&](const char* key, std::vector<int>& out) {
    if (const std::string* v = get(key)) {
      out.clear();
      for (const auto& t : parse_list(*v)) out.push_back(static_cast<int>(parse_long(t, key)));
    }
  };
  const auto get_double_list = [&](const char* key, std::vector<double>& out) {
    if (const std::string* v = get(key)) {
      out.clear();
      for (const auto& t : parse_list(*v)) out.push_back(parse_double(t, key));
    }
  };

  if (const std::string* v = get("data_dir")) config.data_dir = *v;
  if (const std::string* v = get("products")) {
    config.products.clear();
    for (const auto& t : parse_list(*v)) config.products.push_back(product_from_string(t));
  }
  get_double("std_threshold", config.std_threshold);
  get_double("rh_max", config.rh_max);
  get_double("blh_min", config.blh_min);
  get_double("split_ratio", config.split_ratio);
  get_int("cv_folds", config.cv_folds);
  get_int("min_pairs", config.min_pairs);
  get_double("idw_power", config.idw_power);
  get_int_list("scenarios", config.scenarios);
  get_int_list("gbt_n_trees", config.gbt_n_trees);
  get_int_list("gbt_max_depth", config.gbt_max_depth);
  get_double_list("gbt_learning_rate", config.gbt_learning_rate);
  get_double_list("gbt_subsample", config.gbt_subsample);
  get_int_list("gbt_min_samples_leaf", config.gbt_min_samples_leaf);
  if (const std::string* v = get("variogram_kinds")) {
    config.variogram_kinds.clear();
    for (const auto& t : parse_list(*v)) {
      config.variogram_kinds.push_back(variogram_kind_from_string(t));
    }
  }
  get_int("map_scenario", config.map_scenario);
  get_int("quasi_stride", config.quasi_stride);
  get_double("map_vmin", config.map_vmin);
  get_double("map_vmax", config.map_vmax);
  if (const std::string* v = get("seed")) {
    config.seed = static_cast<std::uint64_t>(parse_long(*v, "seed"));
  }
  config.validate();
  return config;
}

void PipelineConfig::validate() const {
  if (data_dir.empty()) fail(ErrorClass::ConfigInvalid, "config: data_dir is required");
  if (products.empty()) fail(ErrorClass::ConfigInvalid, "config: products must be nonempty");
  if (!(std_threshold >= 0)) fail(ErrorClass::ConfigInvalid, "config: std_threshold must be >= 0");
  if (!(rh_max > 0 && rh_max < 100)) {
    fail(ErrorClass::ConfigInvalid, "config: rh_max must lie in (0, 100)");
  }
  if (!(blh_min > 0)) fail(ErrorClass::ConfigInvalid, "config: blh_min must be > 0");
  if (!(split_ratio > 0 && split_ratio < 1)) {
    fail(ErrorClass::ConfigInvalid, "config: split_ratio must lie in (0, 1)");
  }
  if (cv_folds < 2) fail(ErrorClass::ConfigInvalid, "config: cv_folds must be >= 2");
  if (min_pairs < 3) fail(ErrorClass::ConfigInvalid, "config: min_pairs must be >= 3");
  if (!(idw_power > 0)) fail(ErrorClass::ConfigInvalid, "config: idw_power must be > 0");
  for (int s : scenarios) {
    if (s < 1 || s > 11) {
      fail(ErrorClass::ConfigInvalid, "config: scenario ids must lie in 1..11");
    }
  }
  if (gbt_n_trees.empty() || gbt_max_depth.empty() || gbt_learning_rate.empty() ||
      gbt_subsample.empty() || gbt_min_samples_leaf.empty()) {
    fail(ErrorClass::ConfigInvalid, "config: hyperparameter grid lists must be nonempty");
  }
  if (variogram_kinds.empty()) {
    fail(ErrorClass::ConfigInvalid, "config: variogram_kinds must be nonempty");
  }
  if (map_scenario < 1 || map_scenario > 11) {
    fail(ErrorClass::ConfigInvalid, "config: map_scenario must lie in 1..11");
  }
  if (quasi_stride < 1) fail(ErrorClass::ConfigInvalid, "config: quasi_stride must be >= 1");
  if (!(map_vmax > map_vmin)) {
    fail(ErrorClass::ConfigInvalid, "config: map_vmax must exceed map_vmin");
  }
}

std::string PipelineConfig::format() const {
  std::ostringstream out;
  out << "data_dir = " << data_dir << "\n";
  std::vector<std::string> names;
  for (ProductId p : products) names.push_back(to_string(p));
  out << "products = " << format_list(names) << "\n";
  out << "std_threshold = " << format_g(std_threshold, 17) << "\n";
  out << "rh_max = " << format_g(rh_max, 17) << "\n";
  out << "blh_min = " << format_g(blh_min, 17) << "\n";
  out << "split_ratio = " << format_g(split_ratio, 17) << "\n";
  out << "cv_folds = " << cv_folds << "\n";
  out << "min_pairs = " << min_pairs << "\n";
  out << "idw_power = " << format_g(idw_power, 17) << "\n";
  std::vector<std::string> ids;
  for (int s : scenarios) ids.push_back(std::to_string(s));
  out << "scenarios = " << format_list(ids) << "\n";
  const auto int_list = [](const std::vector<int>& v) {
    std::vector<std::string> s;
    for (int x : v) s.push_back(std::to_string(x));
    return format_list(s);
  };
  const auto double_list = [](const std::vector<double>& v) {
    std::vector<std::string> s;
    for (double x : v) s.push_back(format_g(x, 17));
    return format_list(s);
  };
  out << "gbt_n_trees = " << int_list(gbt_n_trees) << "\n";
  out << "gbt_max_depth = " << int_list(gbt_max_depth) << "\n";
  out << "gbt_learning_rate = " << double_list(gbt_learning_rate) << "\n";
  out << "gbt_subsample = " << double_list(gbt_subsample) << "\n";
  out << "gbt_min_samples_leaf = " << int_list(gbt_min_samples_leaf) << "\n";
  std::vector<std::string> kinds;
  for (VariogramKind k : variogram_kinds) kinds.push_back(to_string(k));
  out << "variogram_kinds = " << format_list(kinds) << "\n";
  out << "map_scenario = " << map_scenario << "\n";
  out << "quasi_stride = " << quasi_stride << "\n";
  out << "map_vmin = " << format_g(map_vmin, 17) << "\n";
  out << "map_vmax = " << format_g(map_vmax, 17) << "\n";
  out << "seed = " << seed << "\n";
  return out.str();
}

std::vector<GbtParams> PipelineConfig::param_grid() const {
  return make_param_grid(gbt_n_trees, gbt_max_depth, gbt_learning_rate, gbt_subsample,
                         gbt_min_samples_leaf, seed);
}

namespace {

struct MetByDate {
  std::map<Date, std::vector<MetRecord>> by_date;
};

// Kriges one met variable of one day to arbitrary targets, with physical
// clamps applied afterwards.
double clamp_met(std::size_t var, double value) {
  if (var == 2) return std::max(1.0, value);                  // blh > 0
  if (var == 10) return std::clamp(value, 0.0, 100.0);        // rh in [0, 100]
  return value;
}

std::vector<VariogramModel> fit_met_variograms(const MetByDate& met,
                                               const std::vector<VariogramKind>& kinds) {
  if (met.by_date.empty()) {
    fail(ErrorClass::PipelineError, "met table holds no records");
  }
  const auto& [first_date, records] = *met.by_date.begin();
  std::vector<VariogramModel> models;
  models.reserve(MetRecord::kNumVars);
  for (std::size_t v = 0; v < MetRecord::kNumVars; ++v) {
    std::vector<PointValue> samples;
    samples.reserve(records.size());
    for (const MetRecord& r : records) samples.push_back({r.location, r.var(v)});
    models.push_back(fit_variogram(samples, kinds));
  }
  return models;
}

}  // namespace

Dataset load_dataset(const PipelineConfig& config) {
  Dataset dataset;
  const fs::path dir(config.data_dir);
  if (!fs::exists(dir)) {
    fail(ErrorClass::InputMissing, "data directory not found: " + config.data_dir);
  }
  dataset.stations = load_station_table((dir / "stations.csv").string());
  dataset.met_records = load_met_table((dir / "met.csv").string());

  std::set<Date> date_set;
  for (const auto& rec : dataset.stations) date_set.insert(rec.date);
  dataset.dates.assign(date_set.begin(), date_set.end());

  MetByDate met;
  for (const MetRecord& r : dataset.met_records) met.by_date[r.date].push_back(r);
  dataset.met_variograms = fit_met_variograms(met, config.variogram_kinds);

  // Station sites (unique by id).
  std::map<std::string, Location> sites;
  for (const auto& rec : dataset.stations) sites.emplace(rec.station_id, rec.location);

  // Met kriged to every (station, date) with met coverage.
  for (const Date& date : dataset.dates) {
    const auto it = met.by_date.find(date);
    if (it == met.by_date.end()) continue;
    for (std::size_t v = 0; v < MetRecord::kNumVars; ++v) {
      std::vector<PointValue> samples;
      samples.reserve(it->second.size());
      for (const MetRecord& r : it->second) samples.push_back({r.location, r.var(v)});
      const OrdinaryKriging kriging(std::move(samples), dataset.met_variograms[v]);
      for (const auto& [id, loc] : sites) {
        const RowKey key{id, date};
        MetRecord& rec = dataset.met_at_stations[key];
        rec.location = loc;
        rec.date = date;
        rec.set_var(v, clamp_met(v, kriging.predict(loc)));
      }
    }
  }

  // Humidity correction of the raw readings.
  for (StationRecord& rec : dataset.stations) {
    const auto it = dataset.met_at_stations.find(RowKey{rec.station_id, rec.date});
    if (it == dataset.met_at_stations.end()) continue;
    rec.pm25_corrected = correct_pm25(rec.pm25_raw, it->second.rh, config.rh_max);
  }
  for (const auto& rec : dataset.stations) {
    dataset.all_keys.push_back(RowKey{rec.station_id, rec.date});
  }
  std::sort(dataset.all_keys.begin(), dataset.all_keys.end());

  // Platform grids and window samples.
  const fs::path grids_dir = dir / "grids";
  if (!fs::exists(grids_dir)) {
    fail(ErrorClass::InputMissing, "grid directory not found: " + grids_dir.string());
  }
  std::vector<std::string> grid_files;
  for (const auto& entry : fs::directory_iterator(grids_dir)) {
    if (entry.path().extension() == ".agf") grid_files.push_back(entry.path().string());
  }
  std::sort(grid_files.begin(), grid_files.end());

  std::set<PlatformProduct> platforms;
  for (ProductId p : config.products) {
    for (Sensor s : product_platforms(p)) platforms.insert({s, product_algorithm(p)});
  }

  bool have_geom = false;
  for (const PlatformProduct& pp : platforms) {
    auto& samples_by_key = dataset.window_samples[pp];
    for (const Date& date : dataset.dates) {
      const std::string prefix = std::string(file_token(pp.sensor)) + "_" +
                                 file_token(pp.algorithm) + "_" + date.to_string();
      std::vector<AODGrid> swaths;
      for (const std::string& file : grid_files) {
        const std::string name = fs::path(file).filename().string();
        if (name.rfind(prefix, 0) == 0) swaths.push_back(load_grid(file));
      }
      if (swaths.empty()) continue;
      const AODGrid grid = swaths.size() == 1 ? std::move(swaths.front())
                                              : merge_swaths(swaths);
      if (!have_geom) {
        dataset.geom = grid.geom;
        have_geom = true;
      } else if (!grid.geom.same_shape(dataset.geom)) {
        fail(ErrorClass::InputInvalid,
             "grids are not co-registered: " + prefix + " differs from the first grid");
      }
      for (const auto& [id, loc] : sites) {
        if (!grid.geom.contains(loc)) continue;
        samples_by_key.emplace(RowKey{id, date},
                               extract_window(grid, loc, config.std_threshold));
      }
    }
  }
  if (!have_geom) {
    fail(ErrorClass::InputInvalid,
         "no grid files matched the configured products in " + grids_dir.string());
  }

  // Cross-platform fill regressions, pooled over stations and dates.
  for (ProductId p : config.products) {
    if (product_platforms(p).size() != 2) continue;
    const PlatformProduct terra{Sensor::ModisTerra, product_algorithm(p)};
    const PlatformProduct aqua{Sensor::ModisAqua, product_algorithm(p)};
    const auto& terra_samples = dataset.window_samples[terra];
    const auto& aqua_samples = dataset.window_samples[aqua];
    std::vector<double> terra_vals, aqua_vals;
    for (const auto& [key, ts] : terra_samples) {
      if (!ts.valid) continue;
      const auto it = aqua_samples.find(key);
      if (it == aqua_samples.end() || !it->second.valid) continue;
      terra_vals.push_back(ts.mean_aod);
      aqua_vals.push_back(it->second.mean_aod);
    }
    CrossFillPair pair;
    try {
      pair.terra_to_aqua = fit_cross_fill(terra_vals, aqua_vals, config.min_pairs);
      pair.aqua_to_terra = fit_cross_fill(aqua_vals, terra_vals, config.min_pairs);
    } catch (const Error&) {
      pair = CrossFillPair{};  // too few pairs or degenerate; no filling
    }
    dataset.crossfill[p] = pair;
  }

  // Daily per-product AOD at the stations.
  for (ProductId p : config.products) {
    auto& daily = dataset.daily_aod[p];
    const Algorithm alg = product_algorithm(p);
    if (product_platforms(p).size() == 2) {
      const auto& terra_samples = dataset.window_samples[{Sensor::ModisTerra, alg}];
      const auto& aqua_samples = dataset.window_samples[{Sensor::ModisAqua, alg}];
      const CrossFillPair& regs = dataset.crossfill[p];
      std::set<RowKey> keys;
      for (const auto& [key, s] : terra_samples) keys.insert(key);
      for (const auto& [key, s] : aqua_samples) keys.insert(key);
      for (const RowKey& key : keys) {
        std::optional<double> aqua, terra;
        if (const auto it = aqua_samples.find(key); it != aqua_samples.end() && it->second.valid) {
          aqua = it->second.mean_aod;
        }
        if (const auto it = terra_samples.find(key); it != terra_samples.end() && it->second.valid) {
          terra = it->second.mean_aod;
        }
        const std::optional<double> value =
            daily_average(aqua, terra, regs.aqua_to_terra, regs.terra_to_aqua);
        if (value) daily.emplace(key, *value);
      }
    } else {
      const auto& samples = dataset.window_samples[{Sensor::ViirsSnpp, alg}];
      for (const auto& [key, s] : samples) {
        if (s.valid) daily.emplace(key, s.mean_aod);
      }
    }
  }

  // Per-product training matrices with BLH-normalized AOD.
  for (ProductId p : config.products) {
    std::map<RowKey, double> normalized;
    for (const auto& [key, aod] : dataset.daily_aod[p]) {
      const auto met_it = dataset.met_at_stations.find(key);
      if (met_it == dataset.met_at_stations.end()) continue;
      normalized.emplace(key, normalize_aod(aod, met_it->second.blh, config.blh_min));
    }
    BuildResult built =
        build_training_matrix(normalized, dataset.stations, dataset.met_at_stations);
    dataset.matrix_drop_counts[p] = built.dropped;
    dataset.product_matrices.emplace(p, std::move(built.matrix));
  }
  return dataset;
}

TrainingMatrix build_fused_matrix(const PipelineConfig& config, const Dataset& dataset,
                                  std::size_t* dropped) {
  std::map<RowKey, double> fused_normalized;
  std::vector<WindowSample> at_key;
  for (const RowKey& key : dataset.all_keys) {
    at_key.clear();
    for (const auto& [pp, samples] : dataset.window_samples) {
      const auto it = samples.find(key);
      if (it != samples.end()) at_key.push_back(it->second);
    }
    const std::optional<double> fused = fuse_data_level(at_key);
    if (!fused) continue;
    const auto met_it = dataset.met_at_stations.find(key);
    if (met_it == dataset.met_at_stations.end()) continue;
    fused_normalized.emplace(key,
                             normalize_aod(*fused, met_it->second.blh, config.blh_min));
  }
  BuildResult built =
      build_training_matrix(fused_normalized, dataset.stations, dataset.met_at_stations);
  if (dropped != nullptr) *dropped = built.dropped;
  return std::move(built.matrix);
}

DataLevelReport run_data_level(const PipelineConfig& config, const Dataset& dataset,
                               GBTModel* out_fused_model,
                               TrainingMatrix* out_fused_matrix) {
  DataLevelReport report;
  TrainingMatrix fused_matrix = build_fused_matrix(config, dataset);

  // One global key split shared by every source.
  const SplitIndices split =
      split_indices(dataset.all_keys.size(), config.split_ratio,
                    derive_seed(config.seed, 7000));
  std::set<RowKey> test_keys;
  for (std::size_t i : split.test) test_keys.insert(dataset.all_keys[i]);

  struct Source {
    std::string name;
    const TrainingMatrix* matrix;
  };
  std::vector<Source> sources;
  sources.push_back({"fused", &fused_matrix});
  for (ProductId p : config.products) {
    sources.push_back({to_string(p), &dataset.product_matrices.at(p)});
  }

  std::map<std::string, GBTModel> models;
  std::map<std::string, std::map<RowKey, double>> test_predictions;
  std::map<std::string, std::map<RowKey, double>> test_targets;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const TrainingMatrix& matrix = *sources[s].matrix;
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < matrix.n_rows(); ++i) {
      (test_keys.count(matrix.key(i)) ? test_rows : train_rows).push_back(i);
    }
    if (train_rows.size() < 8 || test_rows.empty()) {
      fail(ErrorClass::PipelineError,
           "data-level source " + sources[s].name + " has too few rows (" +
               std::to_string(train_rows.size()) + " train / " +
               std::to_string(test_rows.size()) + " test)");
    }
    const TrainingMatrix train = matrix.subset(train_rows);

    std::vector<GbtParams> grid = config.param_grid();
    for (auto& g : grid) g.seed = derive_seed(config.seed, 7100 + s);
    const CvResult cv =
        kfold_cv(train, grid, config.cv_folds, derive_seed(config.seed, 7200 + s));
    const GBTModel model = fit_gbt(train, cv.best_params());

    std::vector<double> y_true, y_pred;
    for (std::size_t i : test_rows) {
      const double pred = model.predict(matrix.row(i));
      y_true.push_back(matrix.target(i));
      y_pred.push_back(pred);
      test_predictions[sources[s].name][matrix.key(i)] = pred;
      test_targets[sources[s].name][matrix.key(i)] = matrix.target(i);
    }
    DataLevelSource out;
    out.name = sources[s].name;
    out.metrics = compute_metrics(y_true, y_pred);
    out.coverage = coverage_percent(matrix.n_rows(), dataset.all_keys.size());
    out.n_train = train_rows.size();
    report.sources.push_back(out);
    if (sources[s].name == "fused") {
      if (out_fused_model != nullptr) *out_fused_model = model;
    }
    models.emplace(sources[s].name, model);
  }

  // Paired comparison on test keys valid for both the fused source and the
  // individual product.
  const auto& fused_pred = test_predictions.at("fused");
  for (ProductId p : config.products) {
    const std::string tag = to_string(p);
    const auto& product_pred = test_predictions.at(tag);
    DataLevelPaired pair;
    pair.product = p;
    std::vector<double> y, f, q;
    for (const auto& [key, pred] : product_pred) {
      const auto it = fused_pred.find(key);
      if (it == fused_pred.end()) continue;
      y.push_back(test_targets.at(tag).at(key));
      f.push_back(it->second);
      q.push_back(pred);
    }
    if (y.empty()) continue;
    const Metrics mf = compute_metrics(y, f);
    const Metrics mp = compute_metrics(y, q);
    pair.n = y.size();
    pair.fused_rmse = mf.rmse;
    pair.product_rmse = mp.rmse;
    pair.fused_mae = mf.mae;
    pair.product_mae = mp.mae;
    report.paired.push_back(pair);
  }

  if (out_fused_matrix != nullptr) *out_fused_matrix = std::move(fused_matrix);
  return report;
}

namespace {

void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::string& config_path, const std::string& config_text,
                    std::uint64_t seed, std::vector<std::string> outputs) {
  std::ostringstream out;
  out << "tool = aeromix " << kVersion << "\n";
  out << "command = " << command << "\n";
  out << "config = " << config_path << "\n";
  out << "config_hash = fnv1a64:" << to_hex(fnv1a64(config_text)) << "\n";
  out << "seed = " << seed << "\n";
  out << "threads_note = outputs are independent of --threads\n";
  std::sort(outputs.begin(), outputs.end());
  for (const auto& o : outputs) out << "output = " << o << "\n";
  write_text_file((fs::path(out_dir) / "manifest.txt").string(), out.str());
}

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorClass::IoError, "cannot create output directory " + out_dir);
}

}  // namespace

void cmd_synth(const std::string& scene_config_path, const std::string& out_dir) {
  const SceneConfig config = load_scene_config(scene_config_path);
  ensure_out_dir(out_dir);
  const Scene scene = generate_scene(config);
  write_scene(scene, out_dir);
  std::vector<std::string> outputs = {"grids/", "stations.csv", "met.csv",
                                      "scene_config.txt"};
  write_manifest(out_dir, "synth", scene_config_path, format_scene_config(config),
                 config.seed, std::move(outputs));
}

void cmd_preprocess(const PipelineConfig& config, const std::string& config_path,
                    const std::string& out_dir) {
  ensure_out_dir(out_dir);
  const Dataset dataset = load_dataset(config);

  std::vector<std::string> outputs;
  for (ProductId p : config.products) {
    const std::string name = std::string("matrix_") + to_string(p) + ".csv";
    write_training_matrix(dataset.product_matrices.at(p),
                          (fs::path(out_dir) / name).string());
    outputs.push_back(name);
  }

  CsvTable crossfill;
  crossfill.header = {"product", "direction", "slope", "intercept", "r", "n_pairs"};
  for (const auto& [p, pair] : dataset.crossfill) {
    const auto add = [&](const char* direction, const std::optional<CrossFillRegression>& reg) {
      if (!reg) {
        crossfill.rows.push_back({to_string(p), direction, "", "", "", "0"});
        return;
      }
      crossfill.rows.push_back({to_string(p), direction, format_g(reg->slope, 9),
                                format_g(reg->intercept, 9), format_g(reg->r, 9),
                                std::to_string(reg->n_pairs)});
    };
    add("aqua_to_terra", pair.aqua_to_terra);
    add("terra_to_aqua", pair.terra_to_aqua);
  }
  write_csv((fs::path(out_dir) / "crossfill.csv").string(), crossfill);
  outputs.push_back("crossfill.csv");

  std::ostringstream summary;
  summary << "station_records = " << dataset.stations.size() << "\n";
  summary << "dates = " << dataset.dates.size() << "\n";
  summary << "key_domain = " << dataset.all_keys.size() << "\n";
  for (ProductId p : config.products) {
    summary << "rows_" << to_string(p) << " = "
            << dataset.product_matrices.at(p).n_rows() << "\n";
    summary << "dropped_" << to_string(p) << " = " << dataset.matrix_drop_counts.at(p)
            << "\n";
  }
  for (std::size_t v = 0; v < MetRecord::kNumVars; ++v) {
    const VariogramModel& m = dataset.met_variograms[v];
    summary << "variogram_" << MetRecord::var_names()[v] << " = " << to_string(m.kind)
            << " nugget=" << format_g(m.nugget, 6) << " sill=" << format_g(m.sill, 6)
            << " range=" << format_g(m.range, 6) << "\n";
  }
  write_text_file((fs::path(out_dir) / "prep_summary.txt").string(), summary.str());
  outputs.push_back("prep_summary.txt");

  write_manifest(out_dir, "preprocess", config_path, config.format(), config.seed,
                 std::move(outputs));
}

void cmd_fuse_data(const PipelineConfig& config, const std::string& config_path,
                   const std::string& out_dir) {
  ensure_out_dir(out_dir);
  const Dataset dataset = load_dataset(config);
  GBTModel fused_model;
  TrainingMatrix fused_matrix;
  const DataLevelReport report =
      run_data_level(config, dataset, &fused_model, &fused_matrix);

  write_training_matrix(fused_matrix, (fs::path(out_dir) / "fused_matrix.csv").string());
  save_model(fused_model, (fs::path(out_dir) / "model_fused.txt").string());

  CsvTable metrics;
  metrics.header = {"source", "r2", "rmse", "mae", "coverage", "n_test", "n_train"};
  for (const DataLevelSource& s : report.sources) {
    metrics.rows.push_back({s.name, format_g(s.metrics.r2, 9), format_g(s.metrics.rmse, 9),
                            format_g(s.metrics.mae, 9), format_g(s.coverage, 9),
                            std::to_string(s.metrics.n), std::to_string(s.n_train)});
  }
  write_csv((fs::path(out_dir) / "data_level_metrics.csv").string(), metrics);

  CsvTable paired;
  paired.header = {"product", "n",          "fused_rmse", "product_rmse",
                   "fused_mae", "product_mae"};
  for (const DataLevelPaired& p : report.paired) {
    paired.rows.push_back({to_string(p.product), std::to_string(p.n),
                           format_g(p.fused_rmse, 9), format_g(p.product_rmse, 9),
                           format_g(p.fused_mae, 9), format_g(p.product_mae, 9)});
  }
  write_csv((fs::path(out_dir) / "data_level_paired.csv").string(), paired);

  write_manifest(out_dir, "fuse-data", config_path, config.format(), config.seed,
                 {"fused_matrix.csv", "model_fused.txt", "data_level_metrics.csv",
                  "data_level_paired.csv"});
}

namespace {

void save_fusion_bundle(const DecisionFusionModel& model, const std::string& dir) {
  ensure_out_dir(dir);
  for (const auto& [p, base] : model.base_models) {
    save_model(base, (fs::path(dir) / (std::string("base_") + to_string(p) + ".txt")).string());
  }
  std::ostringstream out;
  out << "aeromix-fusion v1\n";
  out << "scenario = " << model.scenario_id << "\n";
  std::vector<std::string> names;
  for (ProductId p : model.products) names.push_back(to_string(p));
  out << "products = " << join(names, ",") << "\n";
  for (const auto& [mask, combiner] : model.combiners) {
    std::vector<std::string> members;
    for (std::size_t i = 0; i < model.products.size(); ++i) {
      if (mask & (1u << i)) members.push_back(to_string(model.products[i]));
    }
    std::vector<std::string> coefs;
    for (double c : combiner.coefficients) coefs.push_back(format_double(c));
    out << "COMBINER mask=" << mask << " products=" << join(members, ",")
        << " bias=" << format_double(combiner.bias) << " coefs=" << join(coefs, ",")
        << "\n";
  }
  out << "END\n";
  write_text_file((fs::path(dir) / "combiners.txt").string(), out.str());
}

}  // namespace

void cmd_fuse_decision(const PipelineConfig& config, const std::string& config_path,
                       const std::vector<int>& scenario_ids, const std::string& out_dir) {
  ensure_out_dir(out_dir);
  const Dataset dataset = load_dataset(config);

  ScenarioRunParams run;
  run.split_ratio = config.split_ratio;
  run.cv_folds = config.cv_folds;
  run.grid = config.param_grid();
  run.seed = config.seed;

  std::vector<int> ids = scenario_ids.empty() ? config.scenarios : scenario_ids;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<ScenarioReport> reports;
  std::vector<std::string> outputs;
  for (int id : ids) {
    const FusionScenario scenario = scenario_by_id(id);
    for (ProductId p : scenario.products) {
      if (!dataset.product_matrices.count(p)) {
        fail(ErrorClass::PipelineError,
             "scenario " + std::to_string(id) + " needs product " +
                 std::string(to_string(p)) + " which the config does not provide");
      }
    }
    DecisionFusionModel model;
    reports.push_back(run_scenario(scenario, dataset.product_matrices, dataset.all_keys,
                                   run, &model));
    const std::string bundle = "scenario_" + std::to_string(id);
    save_fusion_bundle(model, (fs::path(out_dir) / bundle).string());
    outputs.push_back(bundle + "/");
  }

  write_scenario_reports_csv(reports, (fs::path(out_dir) / "scenario_reports.csv").string());
  write_text_file((fs::path(out_dir) / "scenario_table.txt").string(),
                  format_scenario_table(reports));
  outputs.push_back("scenario_reports.csv");
  outputs.push_back("scenario_table.txt");
  write_manifest(out_dir, "fuse-decision", config_path, config.format(), config.seed,
                 std::move(outputs));
}

void cmd_map(const PipelineConfig& config, const std::string& config_path,
             const Date& date, const std::string& out_dir) {
  ensure_out_dir(out_dir);
  const Dataset dataset = load_dataset(config);
  const FusionScenario scenario = scenario_by_id(config.map_scenario);
  for (ProductId p : scenario.products) {
    if (!dataset.product_matrices.count(p)) {
      fail(ErrorClass::PipelineError,
           std::string("map scenario needs product ") + to_string(p));
    }
  }

  // Tune and train the fusion stack on the full dataset (maps are a
  // production artifact, not an evaluation).
  std::map<ProductId, GbtParams> tuned;
  for (ProductId p : scenario.products) {
    const TrainingMatrix& matrix = dataset.product_matrices.at(p);
    std::vector<GbtParams> grid = config.param_grid();
    for (auto& g : grid) {
      g.seed = derive_seed(config.seed, 8000 + static_cast<std::uint64_t>(p));
    }
    const CvResult cv = kfold_cv(matrix, grid, config.cv_folds,
                                 derive_seed(config.seed, 8100 + static_cast<std::uint64_t>(p)));
    tuned[p] = cv.best_params();
  }
  const DecisionFusionModel model = train_decision_fusion(
      scenario, dataset.product_matrices, tuned, derive_seed(config.seed, 8200));

  // Met kriged to every cell for the map date.
  std::vector<MetRecord> day_met;
  for (const MetRecord& r : dataset.met_records) {
    if (r.date == date) day_met.push_back(r);
  }
  if (day_met.empty()) {
    fail(ErrorClass::InputInvalid, "no met records for map date " + date.to_string());
  }
  const GridGeometry& geom = dataset.geom;
  std::vector<MetRecord> cell_met(geom.size());
  for (std::size_t v = 0; v < MetRecord::kNumVars; ++v) {
    std::vector<PointValue> samples;
    for (const MetRecord& r : day_met) samples.push_back({r.location, r.var(v)});
    const OrdinaryKriging kriging(std::move(samples), dataset.met_variograms[v]);
    for (int r = 0; r < geom.nrows; ++r) {
      for (int c = 0; c < geom.ncols; ++c) {
        const std::size_t i = geom.index(r, c);
        cell_met[i].set_var(v, clamp_met(v, kriging.predict(geom.cell_center(r, c))));
      }
    }
  }

  // Per-cell daily product AODs from the platform grids of the map date.
  std::map<PlatformProduct, AODGrid> day_grids;
  const fs::path grids_dir = fs::path(config.data_dir) / "grids";
  for (ProductId p : scenario.products) {
    for (Sensor s : product_platforms(p)) {
      const PlatformProduct pp{s, product_algorithm(p)};
      if (day_grids.count(pp)) continue;
      const std::string prefix = std::string(file_token(s)) + "_" +
                                 file_token(product_algorithm(p)) + "_" +
                                 date.to_string();
      std::vector<AODGrid> swaths;
      std::vector<std::string> files;
      for (const auto& entry : fs::directory_iterator(grids_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind(prefix, 0) == 0 && entry.path().extension() == ".agf") {
          files.push_back(entry.path().string());
        }
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) swaths.push_back(load_grid(f));
      if (swaths.empty()) continue;
      day_grids.emplace(pp, swaths.size() == 1 ? std::move(swaths.front())
                                               : merge_swaths(swaths));
    }
  }

  std::vector<CellFeatures> cells;
  cells.reserve(geom.size());
  for (int r = 0; r < geom.nrows; ++r) {
    for (int c = 0; c < geom.ncols; ++c) {
      CellFeatures cell;
      cell.row = r;
      cell.col = c;
      cell.center = geom.cell_center(r, c);
      cell.met = cell_met[geom.index(r, c)];
      for (ProductId p : scenario.products) {
        const Algorithm alg = product_algorithm(p);
        std::optional<double> value;
        if (product_platforms(p).size() == 2) {
          std::optional<double> aqua, terra;
          const auto t_it = day_grids.find({Sensor::ModisTerra, alg});
          const auto a_it = day_grids.find({Sensor::ModisAqua, alg});
          if (t_it != day_grids.end()) {
            const WindowSample s = extract_window(t_it->second, cell.center,
                                                  config.std_threshold);
            if (s.valid) terra = s.mean_aod;
          }
          if (a_it != day_grids.end()) {
            const WindowSample s = extract_window(a_it->second, cell.center,
                                                  config.std_threshold);
            if (s.valid) aqua = s.mean_aod;
          }
          const CrossFillPair& regs = dataset.crossfill.count(p)
                                          ? dataset.crossfill.at(p)
                                          : CrossFillPair{};
          value = daily_average(aqua, terra, regs.aqua_to_terra, regs.terra_to_aqua);
        } else {
          const auto it = day_grids.find({Sensor::ViirsSnpp, alg});
          if (it != day_grids.end()) {
            const WindowSample s =
                extract_window(it->second, cell.center, config.std_threshold);
            if (s.valid) value = s.mean_aod;
          }
        }
        if (value) {
          cell.aod[p] = normalize_aod(*value, cell.met.blh, config.blh_min);
        }
      }
      cells.push_back(std::move(cell));
    }
  }

  const std::vector<QuasiStation> quasi =
      generate_quasi_stations(model, cells, date, config.quasi_stride);

  // Ground measurements for the date, humidity corrected.
  std::vector<PointValue> points;
  std::size_t n_ground = 0;
  for (const StationRecord& rec : dataset.stations) {
    if (rec.date != date || !rec.pm25_corrected) continue;
    points.push_back({rec.location, *rec.pm25_corrected});
    ++n_ground;
  }
  for (const QuasiStation& q : quasi) points.push_back({q.location, q.pm25_estimate});
  if (points.empty()) {
    fail(ErrorClass::PipelineError,
         "no ground or quasi-station points available for " + date.to_string());
  }

  PM25Map map = idw_interpolate(points, geom, date, config.idw_power);
  map.n_ground = n_ground;
  map.n_quasi = quasi.size();

  const std::string stem = "map_" + date.to_string();
  write_pm25_map(map, (fs::path(out_dir) / (stem + ".agf")).string());
  render_map(map, Palette::standard(config.map_vmin, config.map_vmax),
             (fs::path(out_dir) / (stem + ".ppm")).string());

  CsvTable quasi_csv;
  quasi_csv.header = {"east", "north", "date", "pm25", "source"};
  for (const QuasiStation& q : quasi) {
    quasi_csv.rows.push_back({format_double(q.location.east),
                              format_double(q.location.north), q.date.to_string(),
                              format_double(q.pm25_estimate), q.source});
  }
  write_csv((fs::path(out_dir) / "quasi_stations.csv").string(), quasi_csv);

  write_manifest(out_dir, "map", config_path, config.format(), config.seed,
                 {stem + ".agf", stem + ".ppm", stem + ".ppm.wld", stem + ".ppm.log",
                  "quasi_stations.csv"});
}

void cmd_eval(const PipelineConfig& config, const std::string& config_path,
              const std::string& out_dir) {
  ensure_out_dir(out_dir);
  const Dataset dataset = load_dataset(config);

  CsvTable table;
  table.header = {"product", "model", "r2", "rmse", "mae", "n_test"};
  for (ProductId p : config.products) {
    const TrainingMatrix& matrix = dataset.product_matrices.at(p);
    const auto [train, test] =
        train_test_split(matrix, config.split_ratio,
                         derive_seed(config.seed, 9000 + static_cast<std::uint64_t>(p)));

    std::vector<GbtParams> grid = config.param_grid();
    for (auto& g : grid) {
      g.seed = derive_seed(config.seed, 9100 + static_cast<std::uint64_t>(p));
    }
    const CvResult cv = kfold_cv(train, grid, config.cv_folds,
                                 derive_seed(config.seed, 9200 + static_cast<std::uint64_t>(p)));
    const GBTModel gbt = fit_gbt(train, cv.best_params());

    RfParams rf_params;
    rf_params.n_trees = 200;
    rf_params.seed = derive_seed(config.seed, 9300 + static_cast<std::uint64_t>(p));
    const RFModel rf = fit_rf(train, rf_params);

    const LinearModel lin = fit_linear(train);

    const auto evaluate = [&](auto&& predict_fn) {
      std::vector<double> y_true, y_pred;
      for (std::size_t i = 0; i < test.n_rows(); ++i) {
        y_true.push_back(test.target(i));
        y_pred.push_back(predict_fn(test.row(i)));
      }
      return compute_metrics(y_true, y_pred);
    };
    const Metrics m_gbt = evaluate([&](std::span<const double> r) { return gbt.predict(r); });
    const Metrics m_rf = evaluate([&](std::span<const double> r) { return rf.predict(r); });
    const Metrics m_lin = evaluate([&](std::span<const double> r) { return predict(lin, r); });

    const auto add = [&](const char* name, const Metrics& m) {
      table.rows.push_back({to_string(p), name, format_g(m.r2, 9), format_g(m.rmse, 9),
                            format_g(m.mae, 9), std::to_string(m.n)});
    };
    add("gbt", m_gbt);
    add("rf", m_rf);
    add("linear", m_lin);
  }
  write_csv((fs::path(out_dir) / "model_selection.csv").string(), table);
  write_manifest(out_dir, "eval", config_path, config.format(), config.seed,
                 {"model_selection.csv"});
}

}  // namespace aeromix
