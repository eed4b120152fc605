#include "stvol/pipeline/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "stvol/error.hpp"

namespace stvol::pipeline {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

void split(std::string_view line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
}

}  // namespace

CsvReader::CsvReader(std::istream& in, std::string path) : in_(in), path_(std::move(path)) {
  if (!read_line()) throw ParseError(path_, 1, "header", "empty file");
  header_line_ = line_;
  split(buffer_, fields_);
  for (auto f : fields_) header_.emplace_back(f);
  fields_.clear();
}

bool CsvReader::read_line() {
  while (std::getline(in_, buffer_)) {
    // Tolerate a UTF-8 byte order mark.
    if (++line_ == 1 && buffer_.starts_with("\xEF\xBB\xBF")) buffer_.erase(0, 3);
    const auto t = trim(buffer_);
    if (t.empty() || t.front() == '#') continue;
    return true;
  }
  return false;
}

std::optional<std::size_t> CsvReader::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t CsvReader::column(std::string_view name) const {
  if (auto c = find_column(name)) return *c;
  throw ParseError(path_, header_line_, std::string(name), "missing column in header");
}

bool CsvReader::next() {
  if (!read_line()) return false;
  split(buffer_, fields_);
  if (fields_.size() != header_.size()) {
    throw ParseError(path_, line_, "row", "expected " + std::to_string(header_.size()) + " fields, found " +
                                              std::to_string(fields_.size()));
  }
  return true;
}

double CsvReader::number(std::size_t col) const {
  if (auto v = parse_double(fields_.at(col))) return *v;
  throw ParseError(path_, line_, header_.at(col), "not a finite number: '" + std::string(fields_.at(col)) + "'");
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace stvol::pipeline
