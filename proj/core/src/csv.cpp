#include "metapop/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace metapop {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) return static_cast<int>(c);
  }
  return -1;
}

int CsvTable::require_column(const std::string& name) const {
  const int c = column(name);
  if (c < 0) {
    throw std::invalid_argument(path + ": missing required column '" + name +
                                "'");
  }
  return c;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = (b == std::string::npos) ? std::string() : f.substr(b, e - b + 1);
  }
  return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  CsvTable table;
  table.path = path;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = split_fields(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected " +
                                  std::to_string(table.header.size()) +
                                  " fields, got " +
                                  std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(lineno);
  }
  if (table.header.empty()) {
    throw std::invalid_argument(path + ": empty file (missing header)");
  }
  return table;
}

double parse_double_field(const std::string& text, const CsvTable& table,
                          std::size_t row, int col) {
  double v = 0;
  const char* b = text.data();
  const char* e = b + text.size();
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e || !std::isfinite(v)) {
    throw std::invalid_argument(
        table.path + ":" + std::to_string(table.line_numbers[row]) +
        ": column '" + table.header[col] + "': not a finite number: '" + text +
        "'");
  }
  return v;
}

long long parse_int_field(const std::string& text, const CsvTable& table,
                          std::size_t row, int col) {
  long long v = 0;
  const char* b = text.data();
  const char* e = b + text.size();
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) {
    throw std::invalid_argument(
        table.path + ":" + std::to_string(table.line_numbers[row]) +
        ": column '" + table.header[col] + "': not an integer: '" + text +
        "'");
  }
  return v;
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : out_(path) {
  if (!out_) throw std::invalid_argument("cannot write file: " + path);
  bool first = true;
  for (const auto& h : header) {
    if (!first) out_ << ',';
    out_ << h;
    first = false;
  }
  out_ << '\n';
}

void CsvWriter::sep() {
  if (!first_in_row_) out_ << ',';
  first_in_row_ = false;
}

void CsvWriter::begin_row() { first_in_row_ = true; }
void CsvWriter::field(double v) { sep(); out_ << format_double(v); }
void CsvWriter::field(long long v) { sep(); out_ << v; }
void CsvWriter::field(int v) { sep(); out_ << v; }
void CsvWriter::field(const std::string& v) { sep(); out_ << v; }
void CsvWriter::end_row() { out_ << '\n'; }

}  // namespace metapop
