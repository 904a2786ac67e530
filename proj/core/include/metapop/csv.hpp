#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace metapop {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

struct CsvTable {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  // Column index by name; -1 when absent.
  int column(const std::string& name) const;
  // Column index by name; throws naming the file when absent.
  int require_column(const std::string& name) const;
};

// Comma-separated, mandatory header, no quoting. Errors carry file and line.
CsvTable read_csv(const std::string& path);

double parse_double_field(const std::string& text, const CsvTable& table,
                          std::size_t row, int col);
long long parse_int_field(const std::string& text, const CsvTable& table,
                          std::size_t row, int col);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void begin_row();
  void field(double v);
  void field(long long v);
  void field(int v);
  void field(const std::string& v);
  void end_row();

 private:
  std::ofstream out_;
  bool first_in_row_ = true;
  void sep();
};

}  // namespace metapop
