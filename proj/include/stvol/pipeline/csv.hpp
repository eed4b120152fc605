#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stvol::pipeline {

/// Minimal CSV reader for the numeric tables this project exchanges: comma
/// separated, no quoting, `#` comment lines and blank lines skipped, first
/// remaining line is the header. Tracks 1-based physical line numbers.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::string path);

  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::string& path() const noexcept { return path_; }

  /// Index of the named column; throws ParseError if it is absent.
  std::size_t column(std::string_view name) const;
  std::optional<std::size_t> find_column(std::string_view name) const;

  /// Advances to the next data row; false at end of file. Throws ParseError
  /// when the field count differs from the header.
  bool next();
  const std::vector<std::string_view>& fields() const noexcept { return fields_; }
  std::size_t line() const noexcept { return line_; }

  double number(std::size_t col) const;
  std::string_view text(std::size_t col) const { return fields_.at(col); }

 private:
  bool read_line();
  std::istream& in_;
  std::string path_;
  std::string buffer_;
  std::vector<std::string> header_;
  std::vector<std::string_view> fields_;
  std::size_t line_ = 0;
  std::size_t header_line_ = 1;
};

/// Parses a full string as a finite double.
std::optional<double> parse_double(std::string_view s);

/// %.17g, the lossless round-trip format used in every CSV we write.
std::string format_double(double v);

}  // namespace stvol::pipeline
