#pragma once

#include <string>
#include <vector>

namespace idx::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC-4180-ish: quoted fields may contain commas, quotes ("" escape) and
// newlines; CRLF and LF both accepted. Every row must have exactly as many
// cells as the header and no cell may be empty (missing values are rejected
// at ingestion).
Table read(const std::string& path);
Table parse(const std::string& text, const std::string& origin = "<string>");

std::string escape(const std::string& field);
std::string format_row(const std::vector<std::string>& cells);
void write(const std::string& path, const Table& table);

// Shortest representation that round-trips the double exactly.
std::string format_double(double v);

}  // namespace idx::csv
