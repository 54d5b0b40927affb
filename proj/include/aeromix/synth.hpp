#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aeromix/aod_grid.hpp"
#include "aeromix/fusion.hpp"
#include "aeromix/rng.hpp"
#include "aeromix/tables.hpp"

namespace aeromix {

// Degradation applied to one product relative to the true field. Noise and
// validity masks are spatially correlated fields, so retrieval artifacts
// form patches the way clouds and bright-surface failures do.
struct ProductDegradation {
  double bias = 0.0;        // additive AOD offset
  double noise_sd = 0.0;    // AOD noise standard deviation
  double validity = 1.0;    // marginal probability a pixel is retrieved
  double qa_fidelity = 1.0; // fraction of valid pixels at best quality
};

struct SceneConfig {
  int nrows = 100;
  int ncols = 100;
  double cellsize = 1000.0;       // m
  double origin_east = 500000.0;  // m
  double origin_north = 3950000.0;
  Date start_date{2015, 1, 1};
  int n_days = 30;
  int n_stations = 30;
  int met_stride = 16;  // met sample every met_stride cells

  double aod_mean = 0.4;
  double aod_sd = 0.2;
  double aod_corr_length = 25000.0;    // m, true-field smoothness
  double noise_corr_length = 20000.0;  // m, product-noise smoothness
  double mask_corr_length = 10000.0;   // m, validity patch scale
  double mask_correlation = 0.0;       // cross-product mask correlation, [-1, 1]
  double met_corr_length = 30000.0;    // m

  std::vector<ProductId> products = {ProductId::MDB, ProductId::MDT, ProductId::VDB,
                                     ProductId::VDT};
  std::map<ProductId, ProductDegradation> degradation;

  // Station-level target:
  //   pm = aod_coef * (aod_true / blh) + rh_coef * rh + t_coef * (t - 273.15)
  //      + interaction_coef * (aod_true / blh) * rh + bias + noise
  double target_aod_coef = 60000.0;
  double target_rh_coef = 0.15;
  double target_t_coef = -0.2;
  double target_interaction_coef = 600.0;
  double target_bias = 10.0;
  double target_noise_sd = 2.0;

  std::uint64_t seed = 0;
  bool seed_set = false;  // the config file must state a seed

  void validate() const;
};

SceneConfig load_scene_config(const std::string& path);
std::string format_scene_config(const SceneConfig& config);

struct Scene {
  SceneConfig config;
  GridGeometry geom;
  std::vector<Date> dates;
  std::vector<std::vector<float>> true_aod;  // per day, row-major
  std::vector<AODGrid> product_grids;        // per (day, platform-product)
  std::vector<StationRecord> stations;
  std::vector<MetRecord> met;
};

// Platform grids making up a daily product: Terra+Aqua for MODIS products,
// SNPP for VIIRS ones.
std::vector<Sensor> product_platforms(ProductId p);
Algorithm product_algorithm(ProductId p);

// Pure function of the config; identical configs give identical scenes.
Scene generate_scene(const SceneConfig& config);

// Writes grids/<sensor>_<alg>_<date>.agf, stations.csv, met.csv and a
// scene_config.txt echo under dir.
void write_scene(const Scene& scene, const std::string& dir);

// Marginally standard-normal random field with the given correlation length
// (meters), generated by iterated box blur of white noise on a torus. Three
// blur passes of radius r give a kernel variance of r(r+1) cells^2, so r
// solves r(r+1) = (length/cellsize)^2; the exact kernel L2 norm rescales the
// output back to unit variance. Exposed for tests.
std::vector<double> gaussian_field(int nrows, int ncols, double corr_length_cells,
                                   Rng& rng);

}  // namespace aeromix
