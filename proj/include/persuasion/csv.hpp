#pragma once

#include <string>
#include <vector>

namespace persuasion {

// Minimal CSV support for the project's text formats: comma-separated,
// header row required, no quoting (ids and numbers only). Lines starting
// with '#' are metadata comments and are collected separately.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> comments;

  // Column index by name, -1 if absent.
  int column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text, const std::string& origin = "<string>");

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace persuasion
