#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ssrs {

/// Decimal float with 17 significant digits (round-trips a double exactly).
std::string format_real(double v);

/// RFC-4180 field quoting: fields containing a comma, quote, CR or LF are quoted.
std::string csv_field(std::string_view s);

/// Accumulates rows in memory; `\n` line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& row(const std::vector<std::string>& fields);
  std::string str() const { return text_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t width_;
  std::string text_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::size_t column(std::string_view name) const;  // throws FormatError when missing
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace ssrs
