#pragma once

// Result tables and their CSV / JSON renderings. Every rendering carries the
// run metadata (tool version, command, config, config hash, seed) and nothing
// time-dependent, so identical inputs give identical bytes.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace stvol::cli {

using Cell = std::variant<std::monostate, double, std::int64_t, std::uint64_t, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

enum class Format { csv, json };

struct Document {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  bool uses_seed = false;
  Table table;
  nlohmann::json summary = nlohmann::json::object();
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string config_hash(const nlohmann::json& config);

std::string render(const Document& doc, Format format);
/// `# key: value` lines shared by every CSV we emit.
std::string metadata_lines(const Document& doc);

std::string tool_version();

}  // namespace stvol::cli
