#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "copreg/dataset.hpp"
#include "copreg/error.hpp"

namespace copreg::cli {

// Bad flags, bad file contents, schema violations: exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;  // rows x header.size()

  // Index of the named column, or nullopt.
  std::optional<Eigen::Index> column(const std::string& name) const;
};

// Comma-separated numeric table with one header row. Throws IoError when the
// file cannot be read and UsageError for ragged rows, empty cells or
// non-numeric values.
CsvTable read_csv(const std::filesystem::path& path);

// x1..xd (d >= 1, consecutive from x1) and, if `need_y`, a y column. With
// `binary` every y must be exactly 0 or 1.
Dataset to_dataset(const CsvTable& table, bool need_y, bool binary);

// Writes `text` to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& text);

// Shortest decimal that reads back to the same double.
std::string format_double(double v);

std::string to_csv(const CsvTable& table);

}  // namespace copreg::cli
