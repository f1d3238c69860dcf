#pragma once

// Comma-separated output with one header row. Numbers are written with 17
// significant digits so values round-trip exactly.

#include <string>
#include <vector>

namespace cavboost {

std::string format_number(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }

  /// Throws ConfigError when the row width differs from the header.
  void add_row(const std::vector<double>& values);
  void add_row(std::vector<std::string> cells);

  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct CsvCheck {
  std::size_t rows = 0;
  std::size_t columns = 0;
};

/// Re-reads a written file and checks the header names and that every row
/// has the header's column count. Throws ConfigError on mismatch.
CsvCheck validate_csv(const std::string& path, const std::vector<std::string>& expected_header);

/// Parses a file written by CsvTable into a header and numeric rows.
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvData read_csv(const std::string& path);

}  // namespace cavboost
