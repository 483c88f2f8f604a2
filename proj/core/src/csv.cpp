#include "idx/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "idx/errors.hpp"

namespace idx::csv {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

Table parse(const std::string& text, const std::string& origin) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field.empty() && !field_started) {
          in_quotes = true;
          field_started = true;
        } else {
          field += c;  // stray quote inside unquoted field, keep literally
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field += c;
        field_started = true;
        break;
    }
  }
  if (in_quotes) throw DataError(origin + ": unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();

  if (records.empty()) throw DataError(origin + ": empty CSV");

  Table t;
  t.header = records.front();
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& row = records[r];
    if (row.size() == 1 && row[0].empty()) continue;  // trailing blank line
    if (row.size() != t.header.size()) {
      throw DataError(origin + ": row " + std::to_string(r) + " has " +
                      std::to_string(row.size()) + " cells, expected " +
                      std::to_string(t.header.size()));
    }
    for (std::size_t cidx = 0; cidx < row.size(); ++cidx) {
      if (row[cidx].empty()) {
        throw DataError(origin + ": row " + std::to_string(r) + " column '" +
                        t.header[cidx] + "' is empty (missing values are not allowed)");
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table read(const std::string& path) { return parse(read_file(path), path); }

std::string escape(const std::string& field) {
  bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string format_row(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += escape(cells[i]);
  }
  line += '\n';
  return line;
}

void write(const std::string& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << format_row(table.header);
  for (const auto& row : table.rows) out << format_row(row);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw DataError("cannot format double");
  return std::string(buf, ptr);
}

}  // namespace idx::csv
