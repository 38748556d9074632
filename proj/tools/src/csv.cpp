#include "copreg_cli/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace copreg::cli {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_cell(const std::string& text, std::size_t row, const std::string& column) {
  double v = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw UsageError("row " + std::to_string(row) + ", column '" + column +
                     "': '" + text + "' is not a number");
  }
  return v;
}

}  // namespace

std::optional<Eigen::Index> CsvTable::column(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return static_cast<Eigen::Index>(j);
  }
  return std::nullopt;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw UsageError("'" + path.string() + "' is empty");
  for (std::string& h : split(line)) table.header.push_back(trim(h));
  const std::size_t cols = table.header.size();

  std::vector<double> cells;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++rows;
    const std::vector<std::string> parts = split(line);
    if (parts.size() != cols) {
      throw UsageError("row " + std::to_string(rows) + " has " + std::to_string(parts.size()) +
                       " cells, header has " + std::to_string(cols));
    }
    for (std::size_t j = 0; j < cols; ++j) {
      cells.push_back(parse_cell(trim(parts[j]), rows, table.header[j]));
    }
  }
  if (in.bad()) throw IoError("read error on '" + path.string() + "'");
  table.values = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      cells.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  return table;
}

Dataset to_dataset(const CsvTable& table, bool need_y, bool binary) {
  std::vector<Eigen::Index> xcols;
  while (auto c = table.column("x" + std::to_string(xcols.size() + 1))) xcols.push_back(*c);
  if (xcols.empty()) throw UsageError("no covariate columns (expected x1, x2, ...)");
  Dataset data;
  data.binary = binary;
  data.x.resize(table.values.rows(), static_cast<Eigen::Index>(xcols.size()));
  for (std::size_t j = 0; j < xcols.size(); ++j) {
    data.x.col(static_cast<Eigen::Index>(j)) = table.values.col(xcols[j]);
  }
  const auto ycol = table.column("y");
  if (need_y && !ycol) throw UsageError("missing response column 'y'");
  if (ycol) {
    data.y = table.values.col(*ycol);
    if (binary) {
      for (Eigen::Index i = 0; i < data.y.size(); ++i) {
        if (data.y[i] != 0.0 && data.y[i] != 1.0) {
          throw UsageError("column 'y' must hold 0 or 1 (row " + std::to_string(i + 1) + ")");
        }
      }
    }
  } else {
    data.y = Eigen::VectorXd::Zero(table.values.rows());
  }
  return data;
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot write '" + path.string() + "'");
  }
}

std::string format_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j) out += ',';
    out += table.header[j];
  }
  out += '\n';
  for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
      if (c) out += ',';
      out += format_double(table.values(r, c));
    }
    out += '\n';
  }
  return out;
}

}  // namespace copreg::cli
