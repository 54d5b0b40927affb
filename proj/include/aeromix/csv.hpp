#pragma once

#include <string>
#include <vector>

namespace aeromix {

// Minimal CSV: comma separated, no quoting or escapes (the formats handled
// here never need them). First line is the header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a required column; throws parse-error if absent.
  std::size_t column(const std::string& name, const std::string& path) const;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

// Whole-file helpers used by manifests and report writers.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace aeromix
