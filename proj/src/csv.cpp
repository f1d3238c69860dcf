#include "cavboost/csv.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "cavboost/errors.hpp"

namespace cavboost {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw ConfigError("CSV header must not be empty");
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  add_row(std::move(cells));
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    std::ostringstream os;
    os << "CSV row has " << cells.size() << " cells, header has " << header_.size();
    throw ConfigError(os.str());
  }
  rows_.push_back(std::move(cells));
}

namespace {

void join(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::string CsvTable::str() const {
  std::ostringstream os;
  join(os, header_);
  for (const auto& r : rows_) join(os, r);
  return os.str();
}

void CsvTable::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << str();
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

CsvCheck validate_csv(const std::string& path, const std::vector<std::string>& expected) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read back '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("'" + path + "' is empty");
  if (split(line) != expected) throw ConfigError("'" + path + "' header does not match its schema");
  CsvCheck check;
  check.columns = expected.size();
  while (std::getline(in, line)) {
    ++check.rows;
    if (split(line).size() != expected.size()) {
      std::ostringstream os;
      os << "'" << path << "' row " << check.rows << " has the wrong column count";
      throw ConfigError(os.str());
    }
  }
  return check;
}

CsvData read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  CsvData data;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("'" + path + "' is empty");
  data.header = split(line);
  while (std::getline(in, line)) {
    std::vector<double> row;
    for (const auto& cell : split(line)) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      }
    }
    data.rows.push_back(std::move(row));
  }
  return data;
}

}  // namespace cavboost
