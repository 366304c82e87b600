#pragma once

// Tabular output. Numbers are written in the shortest form that parses back
// to the same double, so every file round-trips bit for bit.

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mcm::io {

std::string format_double(double v);
// Throws std::invalid_argument unless the whole string is one number
// (also accepts nan, inf, -inf).
double parse_double(std::string_view s);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// RFC 4180: CRLF line ends; header cells are quoted when they need it.
void write_csv(std::ostream& os, const CsvTable& table);
CsvTable read_csv(std::istream& is);

// "index,value" table for a vector of samples.
CsvTable samples_table(std::span<const double> samples);

}  // namespace mcm::io
