#include "mcm/io.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcm::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

namespace {

std::string quote_cell(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char ch : cell) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

// Splits one record; handles quoted cells, including embedded line breaks.
bool read_record(std::istream& is, std::vector<std::string>& cells) {
  cells.clear();
  if (is.peek() == std::char_traits<char>::eof()) return false;
  std::string cell;
  bool quoted = false;
  char ch;
  while (is.get(ch)) {
    if (quoted) {
      if (ch == '"') {
        if (is.peek() == '"') {
          is.get(ch);
          cell += '"';
        } else {
          quoted = false;
        }
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (ch == '\r') {
      if (is.peek() == '\n') is.get(ch);
      break;
    } else if (ch == '\n') {
      break;
    } else {
      cell += ch;
    }
  }
  if (quoted) throw std::invalid_argument("csv: unterminated quoted cell");
  cells.push_back(std::move(cell));
  return true;
}

}  // namespace

void write_csv(std::ostream& os, const CsvTable& table) {
  for (std::size_t j = 0; j < table.header.size(); ++j)
    os << (j ? "," : "") << quote_cell(table.header[j]);
  os << "\r\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw std::invalid_argument("csv: row width does not match header");
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << format_double(row[j]);
    os << "\r\n";
  }
}

CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::vector<std::string> cells;
  if (!read_record(is, table.header)) throw std::invalid_argument("csv: missing header");
  std::size_t line = 1;
  while (read_record(is, cells)) {
    ++line;
    if (cells.size() == 1 && cells[0].empty()) continue;  // trailing blank line
    if (cells.size() != table.header.size())
      throw std::invalid_argument("csv: record " + std::to_string(line) + " has " +
                                  std::to_string(cells.size()) + " fields, expected " +
                                  std::to_string(table.header.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c));
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable samples_table(std::span<const double> samples) {
  CsvTable t{{"index", "value"}, {}};
  t.rows.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    t.rows.push_back({static_cast<double>(i), samples[i]});
  return t;
}

}  // namespace mcm::io
