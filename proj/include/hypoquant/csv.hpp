#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hypoquant {

/// Formats a real with 12 significant digits ("%.12g"), '.' decimal point.
std::string format_real(double value);

/// Row-major CSV table with a header row. Output uses LF line endings;
/// fields containing a comma, quote or newline are quoted.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> fields);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::string to_string() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Parses CSV text produced by CsvTable (or any simple RFC 4180 file).
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace hypoquant
