#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace treadmill {

/// Column-major numeric table read from a header-first CSV file.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  /// Index of a named column, or -1.
  int find(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const;
};

/// Strict dialect: comma separator, '.' decimal point, mandatory header,
/// LF line endings. Violations raise ParseError naming the row and column.
CsvTable parse_csv(const std::string& text, const std::string& source = "<memory>");
CsvTable read_csv(const std::filesystem::path& path);

/// Writes numbers in shortest round-trip form so identical inputs give
/// byte-identical files.
std::string format_csv(const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

std::string format_number(double v);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace treadmill
