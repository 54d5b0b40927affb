#include "aeromix/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include "aeromix/csv.hpp"
#include "aeromix/error.hpp"
#include "aeromix/strings.hpp"

namespace aeromix {

void SceneConfig::validate() const {
  if (nrows < 8 || ncols < 8) {
    fail(ErrorClass::ConfigInvalid, "scene grid must be at least 8x8");
  }
  if (cellsize <= 0) fail(ErrorClass::ConfigInvalid, "cellsize must be positive");
  if (n_days < 1) fail(ErrorClass::ConfigInvalid, "n_days must be >= 1");
  if (n_stations < 1) fail(ErrorClass::ConfigInvalid, "n_stations must be >= 1");
  if (met_stride < 1) fail(ErrorClass::ConfigInvalid, "met_stride must be >= 1");
  if (aod_sd < 0 || target_noise_sd < 0) {
    fail(ErrorClass::ConfigInvalid, "standard deviations must be >= 0");
  }
  if (products.empty()) fail(ErrorClass::ConfigInvalid, "scene needs >= 1 product");
  if (!(mask_correlation >= -1.0 && mask_correlation <= 1.0)) {
    fail(ErrorClass::ConfigInvalid, "mask_correlation must lie in [-1, 1]");
  }
  for (const auto& [p, d] : degradation) {
    if (!(d.validity >= 0.0 && d.validity <= 1.0)) {
      fail(ErrorClass::ConfigInvalid,
           std::string("validity for ") + to_string(p) + " must lie in [0, 1]");
    }
    if (!(d.qa_fidelity >= 0.0 && d.qa_fidelity <= 1.0)) {
      fail(ErrorClass::ConfigInvalid,
           std::string("qa_fidelity for ") + to_string(p) + " must lie in [0, 1]");
    }
    if (d.noise_sd < 0.0) {
      fail(ErrorClass::ConfigInvalid,
           std::string("noise_sd for ") + to_string(p) + " must be >= 0");
    }
  }
  if (!seed_set) fail(ErrorClass::ConfigInvalid, "scene config must state a seed");
}

std::vector<Sensor> product_platforms(ProductId p) {
  switch (p) {
    case ProductId::MDB:
    case ProductId::MDT:
      return {Sensor::ModisTerra, Sensor::ModisAqua};
    case ProductId::VDB:
    case ProductId::VDT:
      return {Sensor::ViirsSnpp};
  }
  return {};
}

Algorithm product_algorithm(ProductId p) {
  return (p == ProductId::MDB || p == ProductId::VDB) ? Algorithm::DeepBlue
                                                      : Algorithm::DarkTarget;
}

namespace {

// Circular box blur along rows, radius r, equal weights.
void box_blur_rows(std::vector<double>& field, int nrows, int ncols, int r) {
  std::vector<double> row(static_cast<std::size_t>(ncols));
  const double inv = 1.0 / (2.0 * r + 1.0);
  for (int i = 0; i < nrows; ++i) {
    double* data = field.data() + static_cast<std::size_t>(i) * ncols;
    double sum = 0.0;
    for (int k = -r; k <= r; ++k) {
      sum += data[((k % ncols) + ncols) % ncols];
    }
    for (int j = 0; j < ncols; ++j) {
      row[static_cast<std::size_t>(j)] = sum * inv;
      const int out = ((j - r) % ncols + ncols) % ncols;
      const int in = (j + r + 1) % ncols;
      sum += data[in] - data[out];
    }
    for (int j = 0; j < ncols; ++j) data[j] = row[static_cast<std::size_t>(j)];
  }
}

void transpose(std::vector<double>& field, int nrows, int ncols) {
  std::vector<double> out(field.size());
  for (int i = 0; i < nrows; ++i) {
    for (int j = 0; j < ncols; ++j) {
      out[static_cast<std::size_t>(j) * nrows + i] =
          field[static_cast<std::size_t>(i) * ncols + j];
    }
  }
  field.swap(out);
}

int blur_radius_for(double corr_length_cells) {
  if (corr_length_cells <= 0.0) return 0;
  const double q2 = corr_length_cells * corr_length_cells;
  return static_cast<int>(std::lround((-1.0 + std::sqrt(1.0 + 4.0 * q2)) / 2.0));
}

// L2 norm of the 1D kernel equal to three convolved boxes of radius r,
// folded onto a circle of n cells. Folding makes the variance bookkeeping
// exact even when the kernel support exceeds the grid (wrap-around reuse).
double kernel_l2(int r, int n) {
  const int width = 2 * r + 1;
  std::vector<double> k = {1.0};
  for (int pass = 0; pass < 3; ++pass) {
    std::vector<double> next(k.size() + static_cast<std::size_t>(width) - 1, 0.0);
    for (std::size_t i = 0; i < k.size(); ++i) {
      for (int j = 0; j < width; ++j) {
        next[i + static_cast<std::size_t>(j)] += k[i] / width;
      }
    }
    k.swap(next);
  }
  std::vector<double> folded(static_cast<std::size_t>(n), 0.0);
  for (std::size_t i = 0; i < k.size(); ++i) {
    folded[i % static_cast<std::size_t>(n)] += k[i];
  }
  double sum_sq = 0.0;
  for (double v : folded) sum_sq += v * v;
  return std::sqrt(sum_sq);
}

constexpr double kInvSqrt2 = 0.70710678118654752440;

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

}  // namespace

std::vector<double> gaussian_field(int nrows, int ncols, double corr_length_cells,
                                   Rng& rng) {
  std::vector<double> field(static_cast<std::size_t>(nrows) *
                            static_cast<std::size_t>(ncols));
  for (double& v : field) v = rng.normal();

  const int r = blur_radius_for(corr_length_cells);
  if (r < 1) return field;

  for (int pass = 0; pass < 3; ++pass) {
    box_blur_rows(field, nrows, ncols, r);
    transpose(field, nrows, ncols);
    box_blur_rows(field, ncols, nrows, r);
    transpose(field, ncols, nrows);
  }
  const double scale = 1.0 / (kernel_l2(r, ncols) * kernel_l2(r, nrows));
  for (double& v : field) v *= scale;
  return field;
}

namespace {

// Marginally Uniform(0,1) field with spatial correlation.
std::vector<double> uniform_field(int nrows, int ncols, double corr_length_cells,
                                  Rng& rng) {
  std::vector<double> field = gaussian_field(nrows, ncols, corr_length_cells, rng);
  for (double& v : field) v = normal_cdf(v);
  return field;
}

struct MetSpec {
  double mid;
  double amp;
  double lo;
  double hi;
};

const std::array<MetSpec, MetRecord::kNumVars>& met_specs() {
  static const std::array<MetSpec, MetRecord::kNumVars> specs = {{
      {278.0, 4.0, 260.0, 295.0},      // dpt
      {288.0, 6.0, 255.0, 310.0},      // t
      {800.0, 350.0, 60.0, 2000.0},    // blh
      {88000.0, 1200.0, 80000.0, 95000.0},  // sp
      {1.2, 0.5, 0.0, 4.0},            // lai_hv
      {0.8, 0.4, 0.0, 4.0},            // lai_lv
      {3.5, 1.5, 0.0, 15.0},           // ws
      {3.14159265, 1.2, 0.0, 6.28318531},   // wd
      {1.6e6, 5e5, 0.0, 3.5e6},        // cdir
      {2.5e5, 8e4, 0.0, 6.0e5},        // uvb
      {45.0, 18.0, 3.0, 97.0},         // rh
  }};
  return specs;
}

}  // namespace

Scene generate_scene(const SceneConfig& config) {
  config.validate();
  Scene scene;
  scene.config = config;
  scene.geom.nrows = config.nrows;
  scene.geom.ncols = config.ncols;
  scene.geom.origin_east = config.origin_east;
  scene.geom.origin_north = config.origin_north;
  scene.geom.cellsize = config.cellsize;

  const double corr_aod = config.aod_corr_length / config.cellsize;
  const double corr_noise = config.noise_corr_length / config.cellsize;
  const double corr_mask = config.mask_corr_length / config.cellsize;
  const double corr_met = config.met_corr_length / config.cellsize;
  const std::size_t n_cells = scene.geom.size();

  // Platform grid roster in a fixed order.
  struct GridSlot {
    ProductId product;
    Sensor sensor;
    Algorithm algorithm;
  };
  std::vector<GridSlot> slots;
  std::vector<ProductId> products = config.products;
  std::sort(products.begin(), products.end());
  for (ProductId p : products) {
    for (Sensor s : product_platforms(p)) {
      slots.push_back({p, s, product_algorithm(p)});
    }
  }

  // Stations drawn once, uniform with a small interior margin.
  {
    Rng rng(derive_seed(config.seed, 500));
    for (int s = 0; s < config.n_stations; ++s) {
      const double u = 0.02 + 0.96 * rng.uniform();
      const double v = 0.02 + 0.96 * rng.uniform();
      char id[16];
      std::snprintf(id, sizeof(id), "s%03d", s + 1);
      StationRecord rec;
      rec.station_id = id;
      rec.location.east = config.origin_east + u * config.ncols * config.cellsize;
      rec.location.north = config.origin_north + v * config.nrows * config.cellsize;
      scene.stations.push_back(rec);  // one placeholder per station; dated below
    }
  }
  const std::vector<StationRecord> station_sites = scene.stations;
  scene.stations.clear();

  const auto degradation_of = [&](ProductId p) {
    const auto it = config.degradation.find(p);
    return it != config.degradation.end() ? it->second : ProductDegradation{};
  };

  for (int day = 0; day < config.n_days; ++day) {
    const Date date = config.start_date.plus_days(day);
    scene.dates.push_back(date);
    const std::uint64_t day_seed = derive_seed(config.seed, static_cast<std::uint64_t>(day));

    // True AOD field.
    Rng true_rng(derive_seed(day_seed, 0));
    const std::vector<double> z_true =
        gaussian_field(config.nrows, config.ncols, corr_aod, true_rng);
    std::vector<float> true_field(n_cells);
    for (std::size_t i = 0; i < n_cells; ++i) {
      true_field[i] =
          static_cast<float>(std::max(0.0, config.aod_mean + config.aod_sd * z_true[i]));
    }

    // Shared validity driver for cross-product mask correlation.
    Rng shared_rng(derive_seed(day_seed, 1));
    const std::vector<double> shared_mask =
        uniform_field(config.nrows, config.ncols, corr_mask, shared_rng);

    for (std::size_t g = 0; g < slots.size(); ++g) {
      const GridSlot& slot = slots[g];
      const ProductDegradation deg = degradation_of(slot.product);

      Rng noise_rng(derive_seed(day_seed, 100 + g));
      const std::vector<double> noise =
          gaussian_field(config.nrows, config.ncols, corr_noise, noise_rng);

      Rng select_rng(derive_seed(day_seed, 300 + g));
      const double c = config.mask_correlation;
      const bool use_shared = select_rng.uniform() < std::abs(c);
      std::vector<double> own_mask;
      if (!use_shared) {
        Rng mask_rng(derive_seed(day_seed, 200 + g));
        own_mask = uniform_field(config.nrows, config.ncols, corr_mask, mask_rng);
      }

      AODGrid grid;
      grid.geom = scene.geom;
      grid.sensor = slot.sensor;
      grid.algorithm = slot.algorithm;
      grid.date = date;
      grid.values.assign(n_cells, grid.geom.nodata);
      grid.qa.assign(n_cells, 0);

      for (std::size_t i = 0; i < n_cells; ++i) {
        double mask_u;
        if (use_shared) {
          mask_u = c >= 0.0 ? shared_mask[i] : 1.0 - shared_mask[i];
        } else {
          mask_u = own_mask[i];
        }
        if (mask_u >= deg.validity) continue;  // not retrieved

        const double eps = deg.noise_sd * noise[i];
        grid.values[i] =
            static_cast<float>(std::max(0.0, true_field[i] + deg.bias + eps));

        // Quality bands follow the noise magnitude: the quantile of |eps|
        // is uniform, so a fidelity-f share of valid pixels lands at 3 and
        // the rest spreads evenly over 2, 1, 0.
        double p_val = 0.0;
        if (deg.noise_sd > 0.0) {
          p_val = std::erf(std::abs(noise[i]) * kInvSqrt2);
        }
        if (p_val <= deg.qa_fidelity || deg.qa_fidelity >= 1.0) {
          grid.qa[i] = 3;
        } else {
          const double t = (p_val - deg.qa_fidelity) / (1.0 - deg.qa_fidelity);
          const int band = std::min(2, static_cast<int>(t * 3.0));
          grid.qa[i] = static_cast<std::uint8_t>(2 - band);
        }
      }
      scene.product_grids.push_back(std::move(grid));
    }

    // Met fields sampled on the coarse met grid.
    std::vector<std::vector<double>> met_fields(MetRecord::kNumVars);
    for (std::size_t v = 0; v < MetRecord::kNumVars; ++v) {
      Rng met_rng(derive_seed(day_seed, 400 + v));
      met_fields[v] = gaussian_field(config.nrows, config.ncols, corr_met, met_rng);
    }
    const auto met_value = [&](std::size_t v, std::size_t cell) {
      const MetSpec& spec = met_specs()[v];
      return std::clamp(spec.mid + spec.amp * met_fields[v][cell], spec.lo, spec.hi);
    };
    for (int r = config.met_stride / 2; r < config.nrows; r += config.met_stride) {
      for (int ccol = config.met_stride / 2; ccol < config.ncols; ccol += config.met_stride) {
        MetRecord rec;
        rec.location = scene.geom.cell_center(r, ccol);
        rec.date = date;
        const std::size_t cell = scene.geom.index(r, ccol);
        for (std::size_t v = 0; v < MetRecord::kNumVars; ++v) {
          rec.set_var(v, met_value(v, cell));
        }
        scene.met.push_back(rec);
      }
    }

    // Station PM2.5 from the true field and true met at the station cell.
    Rng target_rng(derive_seed(day_seed, 600));
    for (const StationRecord& site : station_sites) {
      int r = 0, cidx = 0;
      scene.geom.cell_of(site.location, r, cidx);
      const std::size_t cell = scene.geom.index(r, cidx);
      const double blh = met_value(2, cell);
      const double rh = met_value(10, cell);
      const double t = met_value(1, cell);
      const double aod_n = static_cast<double>(true_field[cell]) / blh;
      double target = config.target_aod_coef * aod_n + config.target_rh_coef * rh +
                      config.target_t_coef * (t - 273.15) +
                      config.target_interaction_coef * aod_n * rh + config.target_bias +
                      config.target_noise_sd * target_rng.normal();
      target = std::max(1.0, target);

      StationRecord rec = site;
      rec.date = date;
      // Raw reading is the dry mass: invert the humidity growth so the
      // correction recovers the target exactly at the true rh.
      rec.pm25_raw = target * (1.0 - std::min(rh, 99.0) / 100.0);
      scene.stations.push_back(std::move(rec));
    }

    scene.true_aod.push_back(std::move(true_field));
  }
  return scene;
}

std::string format_scene_config(const SceneConfig& config) {
  std::ostringstream out;
  out << "nrows = " << config.nrows << "\n";
  out << "ncols = " << config.ncols << "\n";
  out << "cellsize = " << format_g(config.cellsize, 17) << "\n";
  out << "origin_east = " << format_g(config.origin_east, 17) << "\n";
  out << "origin_north = " << format_g(config.origin_north, 17) << "\n";
  out << "start_date = " << config.start_date.to_string() << "\n";
  out << "n_days = " << config.n_days << "\n";
  out << "n_stations = " << config.n_stations << "\n";
  out << "met_stride = " << config.met_stride << "\n";
  out << "aod_mean = " << format_g(config.aod_mean, 17) << "\n";
  out << "aod_sd = " << format_g(config.aod_sd, 17) << "\n";
  out << "aod_corr_length = " << format_g(config.aod_corr_length, 17) << "\n";
  out << "noise_corr_length = " << format_g(config.noise_corr_length, 17) << "\n";
  out << "mask_corr_length = " << format_g(config.mask_corr_length, 17) << "\n";
  out << "mask_correlation = " << format_g(config.mask_correlation, 17) << "\n";
  out << "met_corr_length = " << format_g(config.met_corr_length, 17) << "\n";
  std::vector<std::string> names;
  std::vector<ProductId> products = config.products;
  std::sort(products.begin(), products.end());
  for (ProductId p : products) names.push_back(to_string(p));
  out << "products = " << join(names, ",") << "\n";
  for (ProductId p : products) {
    const auto it = config.degradation.find(p);
    const ProductDegradation d =
        it != config.degradation.end() ? it->second : ProductDegradation{};
    const std::string tag = to_string(p);
    out << "bias_" << tag << " = " << format_g(d.bias, 17) << "\n";
    out << "noise_sd_" << tag << " = " << format_g(d.noise_sd, 17) << "\n";
    out << "validity_" << tag << " = " << format_g(d.validity, 17) << "\n";
    out << "qa_fidelity_" << tag << " = " << format_g(d.qa_fidelity, 17) << "\n";
  }
  out << "target_aod_coef = " << format_g(config.target_aod_coef, 17) << "\n";
  out << "target_rh_coef = " << format_g(config.target_rh_coef, 17) << "\n";
  out << "target_t_coef = " << format_g(config.target_t_coef, 17) << "\n";
  out << "target_interaction_coef = " << format_g(config.target_interaction_coef, 17)
      << "\n";
  out << "target_bias = " << format_g(config.target_bias, 17) << "\n";
  out << "target_noise_sd = " << format_g(config.target_noise_sd, 17) << "\n";
  out << "seed = " << config.seed << "\n";
  return out.str();
}

SceneConfig load_scene_config(const std::string& path) {
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

  SceneConfig config;
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

  get_int("nrows", config.nrows);
  get_int("ncols", config.ncols);
  get_double("cellsize", config.cellsize);
  get_double("origin_east", config.origin_east);
  get_double("origin_north", config.origin_north);
  if (const std::string* v = get("start_date")) config.start_date = Date::parse(*v);
  get_int("n_days", config.n_days);
  get_int("n_stations", config.n_stations);
  get_int("met_stride", config.met_stride);
  get_double("aod_mean", config.aod_mean);
  get_double("aod_sd", config.aod_sd);
  get_double("aod_corr_length", config.aod_corr_length);
  get_double("noise_corr_length", config.noise_corr_length);
  get_double("mask_corr_length", config.mask_corr_length);
  get_double("mask_correlation", config.mask_correlation);
  get_double("met_corr_length", config.met_corr_length);
  if (const std::string* v = get("products")) {
    config.products.clear();
    for (const auto& token : split(*v, ',')) {
      config.products.push_back(product_from_string(trim(token)));
    }
  }
  for (ProductId p :
       {ProductId::MDB, ProductId::MDT, ProductId::VDB, ProductId::VDT}) {
    const std::string tag = to_string(p);
    ProductDegradation d;
    bool any = false;
    for (const auto& [prefix, field] :
         std::vector<std::pair<std::string, double*>>{{"bias_", &d.bias},
                                                      {"noise_sd_", &d.noise_sd},
                                                      {"validity_", &d.validity},
                                                      {"qa_fidelity_", &d.qa_fidelity}}) {
      if (const std::string* v = get((prefix + tag).c_str())) {
        *field = parse_double(*v, prefix + tag);
        any = true;
      }
    }
    if (any) config.degradation[p] = d;
  }
  get_double("target_aod_coef", config.target_aod_coef);
  get_double("target_rh_coef", config.target_rh_coef);
  get_double("target_t_coef", config.target_t_coef);
  get_double("target_interaction_coef", config.target_interaction_coef);
  get_double("target_bias", config.target_bias);
  get_double("target_noise_sd", config.target_noise_sd);
  if (const std::string* v = get("seed")) {
    config.seed = static_cast<std::uint64_t>(parse_long(*v, "seed"));
    config.seed_set = true;
  }
  config.validate();
  return config;
}

void write_scene(const Scene& scene, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "grids");
  for (const AODGrid& grid : scene.product_grids) {
    const std::string name = std::string(file_token(grid.sensor)) + "_" +
                             file_token(grid.algorithm) + "_" +
                             grid.date.to_string() + ".agf";
    write_grid(grid, (fs::path(dir) / "grids" / name).string());
  }
  write_station_table(scene.stations, (fs::path(dir) / "stations.csv").string());
  write_met_table(scene.met, (fs::path(dir) / "met.csv").string());
  write_text_file((fs::path(dir) / "scene_config.txt").string(),
                  format_scene_config(scene.config));
}

}  // namespace aeromix
