#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "aeromix/date.hpp"
#include "aeromix/geo.hpp"

namespace aeromix {

// One ground PM2.5 observation.
struct StationRecord {
  std::string station_id;
  Location location;
  Date date;
  double pm25_raw = 0.0;                 // µg/m³
  std::optional<double> pm25_corrected;  // set once humidity correction ran
};

// Meteorological covariates at one location and day.
struct MetRecord {
  Location location;
  Date date;
  double dpt = 0.0;     // dewpoint temperature, K
  double t = 0.0;       // air temperature, K
  double blh = 0.0;     // boundary layer height, m
  double sp = 0.0;      // surface pressure, Pa
  double lai_hv = 0.0;  // leaf area index, high vegetation
  double lai_lv = 0.0;  // leaf area index, low vegetation
  double ws = 0.0;      // wind speed, m/s
  double wd = 0.0;      // wind direction, rad
  double cdir = 0.0;    // clear-sky direct solar radiation, J/m²
  double uvb = 0.0;     // downward UV radiation, J/m²
  double rh = 0.0;      // relative humidity, percent 0..100

  static constexpr std::size_t kNumVars = 11;
  static const std::array<const char*, kNumVars>& var_names();  // csv order
  double var(std::size_t i) const;
  void set_var(std::size_t i, double v);
};

// CSV columns: station_id,east,north,date,pm25. Duplicate (station_id, date)
// pairs are rejected.
std::vector<StationRecord> load_station_table(const std::string& path);
void write_station_table(const std::vector<StationRecord>& records,
                         const std::string& path);

// CSV columns: east,north,date,dpt,t,blh,sp,lai_hv,lai_lv,ws,wd,cdir,uvb,rh.
// Duplicate (location, date) rows are rejected.
std::vector<MetRecord> load_met_table(const std::string& path);
void write_met_table(const std::vector<MetRecord>& records, const std::string& path);

}  // namespace aeromix
