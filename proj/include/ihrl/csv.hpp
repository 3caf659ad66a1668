#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace ihrl {

/// Fixed-precision decimal text, identical across runs for identical input.
std::string format_double(double v, int precision = 6);

/// Plain comma-separated table; fields never contain commas or quotes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a named column; throws ConfigError when absent.
  std::size_t column(const std::string& name) const;
  std::string text() const;
};

CsvTable read_csv(const std::string& path);
void write_csv(const CsvTable& table, const std::string& path);

}  // namespace ihrl
