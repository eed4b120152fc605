#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "stvol/error.hpp"
#include "stvol/pipeline/csv.hpp"

#ifndef STVOL_VERSION
#define STVOL_VERSION "0.0.0"
#endif

namespace stvol::cli {

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw ContractError("table row width does not match the header");
  rows.push_back(std::move(row));
}

std::string tool_version() { return STVOL_VERSION; }

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const nlohmann::json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

namespace {

struct CsvCell {
  std::string operator()(std::monostate) const { return ""; }
  std::string operator()(double v) const { return std::isfinite(v) ? pipeline::format_double(v) : (std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf")); }
  std::string operator()(std::int64_t v) const { return std::to_string(v); }
  std::string operator()(std::uint64_t v) const { return std::to_string(v); }
  std::string operator()(bool v) const { return v ? "1" : "0"; }
  std::string operator()(const std::string& v) const { return v; }
};

using Ordered = nlohmann::ordered_json;

struct JsonCell {
  Ordered operator()(std::monostate) const { return nullptr; }
  Ordered operator()(double v) const { return std::isfinite(v) ? Ordered(v) : Ordered(nullptr); }
  Ordered operator()(std::int64_t v) const { return v; }
  Ordered operator()(std::uint64_t v) const { return v; }
  Ordered operator()(bool v) const { return v; }
  Ordered operator()(const std::string& v) const { return v; }
};

}  // namespace

std::string metadata_lines(const Document& doc) {
  std::ostringstream out;
  out << "# tool: stvol " << tool_version() << '\n';
  out << "# command: " << doc.command << '\n';
  out << "# config_hash: fnv1a64:" << config_hash(doc.config) << '\n';
  if (doc.uses_seed) out << "# seed: " << doc.seed << '\n';
  out << "# config: " << doc.config.dump() << '\n';
  return out.str();
}

std::string render(const Document& doc, Format format) {
  if (format == Format::csv) {
    std::ostringstream out;
    out << metadata_lines(doc);
    if (!doc.summary.empty()) out << "# summary: " << doc.summary.dump() << '\n';
    for (std::size_t i = 0; i < doc.table.columns.size(); ++i) out << (i ? "," : "") << doc.table.columns[i];
    out << '\n';
    for (const auto& row : doc.table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << std::visit(CsvCell{}, row[i]);
      out << '\n';
    }
    return out.str();
  }
  Ordered j;
  j["tool"] = "stvol";
  j["version"] = tool_version();
  j["command"] = doc.command;
  j["config"] = Ordered::parse(doc.config.dump());
  j["config_hash"] = "fnv1a64:" + config_hash(doc.config);
  if (doc.uses_seed) j["seed"] = doc.seed;
  if (!doc.summary.empty()) j["summary"] = Ordered::parse(doc.summary.dump());
  auto rows = Ordered::array();
  for (const auto& row : doc.table.rows) {
    Ordered r = Ordered::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[doc.table.columns[i]] = std::visit(JsonCell{}, row[i]);
    rows.push_back(std::move(r));
  }
  j["data"] = std::move(rows);
  return j.dump(2) + "\n";
}

}  // namespace stvol::cli
