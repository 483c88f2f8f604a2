#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace idx {

enum class ColumnType { Categorical, Numeric };

// Rectangular table of strings with per-column type detection. A column is
// numeric iff every cell parses as a finite double; everything else is
// categorical. Missing cells were already rejected by the CSV layer.
class Dataset {
public:
  Dataset() = default;
  Dataset(std::vector<std::string> columns, std::vector<std::vector<std::string>> rows);

  static Dataset from_csv(const std::string& path);

  std::size_t row_count() const { return rows_.size(); }
  std::size_t column_count() const { return columns_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::size_t column_index(const std::string& name) const;  // throws DataError if absent
  bool has_column(const std::string& name) const;
  ColumnType column_type(std::size_t col) const { return types_[col]; }
  const std::string& cell(std::size_t row, std::size_t col) const { return rows_[row][col]; }
  double numeric_cell(std::size_t row, std::size_t col) const;

  // Distinct values of a categorical column in first-appearance order; this
  // order becomes the fitted Domain order (and thus the argmax tie-break).
  std::vector<std::string> distinct_values(std::size_t col) const;

  // Replaces a column's cells (used by discretization); type re-detected.
  void replace_column(std::size_t col, std::vector<std::string> cells);

  Dataset select_rows(const std::vector<std::size_t>& idx) const;

private:
  void detect_types();

  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<ColumnType> types_;
};

std::optional<double> parse_double(const std::string& s);

}  // namespace idx
