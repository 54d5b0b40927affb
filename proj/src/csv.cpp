#include "aeromix/csv.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "aeromix/error.hpp"
#include "aeromix/strings.hpp"

namespace aeromix {

std::size_t CsvTable::column(const std::string& name, const std::string& path) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  fail(ErrorClass::ParseError, path + ": missing column '" + name + "'");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(std::filesystem::exists(path) ? ErrorClass::IoError : ErrorClass::InputMissing,
         "cannot open " + path);
  }
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    fail(ErrorClass::ParseError, path + ": empty file, expected a header row");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  for (auto& f : split(line, ',')) table.header.push_back(trim(f));

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != table.header.size()) {
      fail(ErrorClass::ParseError,
           path + ":" + std::to_string(line_no) + ": expected " +
               std::to_string(table.header.size()) + " fields, got " +
               std::to_string(fields.size()));
    }
    for (auto& f : fields) f = trim(f);
    table.rows.push_back(std::move(fields));
  }
  return table;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ostringstream out;
  out << join(table.header, ",") << "\n";
  for (const auto& row : table.rows) out << join(row, ",") << "\n";
  write_text_file(path, out.str());
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail(std::filesystem::exists(path) ? ErrorClass::IoError : ErrorClass::InputMissing,
         "cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorClass::IoError, "cannot write " + path);
  out << content;
  if (!out) fail(ErrorClass::IoError, "write failed: " + path);
}

}  // namespace aeromix
