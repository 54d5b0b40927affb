#include "aeromix/tables.hpp"

#include <cmath>
#include <set>
#include <tuple>

#include "aeromix/csv.hpp"
#include "aeromix/error.hpp"
#include "aeromix/strings.hpp"

namespace aeromix {

const std::array<const char*, MetRecord::kNumVars>& MetRecord::var_names() {
  static const std::array<const char*, kNumVars> names = {
      "dpt", "t", "blh", "sp", "lai_hv", "lai_lv", "ws", "wd", "cdir", "uvb", "rh"};
  return names;
}

double MetRecord::var(std::size_t i) const {
  switch (i) {
    case 0: return dpt;
    case 1: return t;
    case 2: return blh;
    case 3: return sp;
    case 4: return lai_hv;
    case 5: return lai_lv;
    case 6: return ws;
    case 7: return wd;
    case 8: return cdir;
    case 9: return uvb;
    case 10: return rh;
  }
  fail(ErrorClass::Internal, "met variable index out of range");
}

void MetRecord::set_var(std::size_t i, double v) {
  switch (i) {
    case 0: dpt = v; return;
    case 1: t = v; return;
    case 2: blh = v; return;
    case 3: sp = v; return;
    case 4: lai_hv = v; return;
    case 5: lai_lv = v; return;
    case 6: ws = v; return;
    case 7: wd = v; return;
    case 8: cdir = v; return;
    case 9: uvb = v; return;
    case 10: rh = v; return;
  }
  fail(ErrorClass::Internal, "met variable index out of range");
}

std::vector<StationRecord> load_station_table(const std::string& path) {
  const CsvTable table = read_csv(path);
  const std::size_t c_id = table.column("station_id", path);
  const std::size_t c_east = table.column("east", path);
  const std::size_t c_north = table.column("north", path);
  const std::size_t c_date = table.column("date", path);
  const std::size_t c_pm = table.column("pm25", path);

  std::vector<StationRecord> out;
  out.reserve(table.rows.size());
  std::set<std::pair<std::string, std::int64_t>> seen;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string where = path + " row " + std::to_string(i + 2);
    StationRecord rec;
    rec.station_id = row[c_id];
    if (rec.station_id.empty()) fail(ErrorClass::ValidationError, where + ": empty station_id");
    rec.location.east = parse_double(row[c_east], where + " east");
    rec.location.north = parse_double(row[c_north], where + " north");
    rec.date = Date::parse(row[c_date]);
    rec.pm25_raw = parse_double(row[c_pm], where + " pm25");
    if (!std::isfinite(rec.pm25_raw) || rec.pm25_raw < 0) {
      fail(ErrorClass::ValidationError, where + ": pm25 must be finite and >= 0");
    }
    if (!seen.insert({rec.station_id, rec.date.serial()}).second) {
      fail(ErrorClass::ValidationError,
           where + ": duplicate (station_id, date) = (" + rec.station_id + ", " +
               rec.date.to_string() + ")");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void write_station_table(const std::vector<StationRecord>& records,
                         const std::string& path) {
  CsvTable table;
  table.header = {"station_id", "east", "north", "date", "pm25"};
  for (const auto& r : records) {
    table.rows.push_back({r.station_id, format_double(r.location.east),
                          format_double(r.location.north), r.date.to_string(),
                          format_double(r.pm25_raw)});
  }
  write_csv(path, table);
}

std::vector<MetRecord> load_met_table(const std::string& path) {
  const CsvTable table = read_csv(path);
  const std::size_t c_east = table.column("east", path);
  const std::size_t c_north = table.column("north", path);
  const std::size_t c_date = table.column("date", path);
  std::array<std::size_t, MetRecord::kNumVars> cols{};
  for (std::size_t v = 0; v < MetRecord::kNumVars; ++v) {
    cols[v] = table.column(MetRecord::var_names()[v], path);
  }

  std::vector<MetRecord> out;
  out.reserve(table.rows.size());
  std::set<std::tuple<double, double, std::int64_t>> seen;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string where = path + " row " + std::to_string(i + 2);
    MetRecord rec;
    rec.location.east = parse_double(row[c_east], where + " east");
    rec.location.north = parse_double(row[c_north], where + " north");
    rec.date = Date::parse(row[c_date]);
    for (std::size_t v = 0; v < MetRecord::kNumVars; ++v) {
      const double value = parse_double(row[cols[v]], where + " " + MetRecord::var_names()[v]);
      if (!std::isfinite(value)) {
        fail(ErrorClass::ValidationError,
             where + ": non-finite " + MetRecord::var_names()[v]);
      }
      rec.set_var(v, value);
    }
    if (rec.blh <= 0) fail(ErrorClass::ValidationError, where + ": blh must be > 0");
    if (rec.rh < 0 || rec.rh > 100) {
      fail(ErrorClass::ValidationError, where + ": rh outside [0, 100]");
    }
    if (!seen.insert({rec.location.east, rec.location.north, rec.date.serial()}).second) {
      fail(ErrorClass::ValidationError, where + ": duplicate (location, date)");
    }
    out.push_back(rec);
  }
  return out;
}

void write_met_table(const std::vector<MetRecord>& records, const std::string& path) {
  CsvTable table;
  table.header = {"east", "north", "date"};
  for (auto* name : MetRecord::var_names()) table.header.push_back(name);
  for (const auto& r : records) {
    std::vector<std::string> row = {format_double(r.location.east),
                                    format_double(r.location.north),
                                    r.date.to_string()};
    for (std::size_t v = 0; v < MetRecord::kNumVars; ++v) {
      row.push_back(format_double(r.var(v)));
    }
    table.rows.push_back(std::move(row));
  }
  write_csv(path, table);
}

}  // namespace aeromix
