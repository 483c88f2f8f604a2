#include "idx/dataset.hpp"

#include <charconv>
#include <cmath>
#include <unordered_set>

#include "idx/csv.hpp"
#include "idx/errors.hpp"

namespace idx {

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double value = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

Dataset::Dataset(std::vector<std::string> columns, std::vector<std::vector<std::string>> rows)
    : columns_(std::move(columns)), rows_(std::move(rows)) {
  std::unordered_set<std::string> seen;
  for (const auto& c : columns_) {
    if (!seen.insert(c).second) throw DataError("duplicate column name: " + c);
  }
  for (const auto& r : rows_) {
    if (r.size() != columns_.size()) throw DataError("ragged dataset row");
  }
  detect_types();
}

Dataset Dataset::from_csv(const std::string& path) {
  auto t = csv::read(path);
  return Dataset(std::move(t.header), std::move(t.rows));
}

void Dataset::detect_types() {
  types_.assign(columns_.size(), ColumnType::Numeric);
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (rows_.empty()) {
      types_[c] = ColumnType::Categorical;
      continue;
    }
    for (const auto& row : rows_) {
      if (!parse_double(row[c])) {
        types_[c] = ColumnType::Categorical;
        break;
      }
    }
  }
}

std::size_t Dataset::column_index(const std::string& name) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c] == name) return c;
  }
  throw DataError("unknown column: " + name);
}

bool Dataset::has_column(const std::string& name) const {
  for (const auto& c : columns_) {
    if (c == name) return true;
  }
  return false;
}

double Dataset::numeric_cell(std::size_t row, std::size_t col) const {
  auto v = parse_double(rows_[row][col]);
  if (!v) {
    throw DataError("column '" + columns_[col] + "' has non-numeric value '" +
                    rows_[row][col] + "'");
  }
  return *v;
}

std::vector<std::string> Dataset::distinct_values(std::size_t col) const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& row : rows_) {
    if (seen.insert(row[col]).second) out.push_back(row[col]);
  }
  return out;
}

void Dataset::replace_column(std::size_t col, std::vector<std::string> cells) {
  if (cells.size() != rows_.size()) throw DataError("replacement column has wrong length");
  for (std::size_t r = 0; r < rows_.size(); ++r) rows_[r][col] = std::move(cells[r]);
  detect_types();
}

Dataset Dataset::select_rows(const std::vector<std::size_t>& idx) const {
  std::vector<std::vector<std::string>> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(rows_[i]);
  Dataset d;
  d.columns_ = columns_;
  d.rows_ = std::move(out);
  d.detect_types();
  return d;
}

}  // namespace idx
