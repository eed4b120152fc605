#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "output.hpp"
#include "stvol/maxent.hpp"

namespace CLI {
class App;
}

namespace stvol::cli {

struct Globals {
  std::uint64_t seed = 1;
  std::string output = "-";
  std::string format;  ///< empty: the command's default
  int threads = 0;
  std::ostream* err = nullptr;  ///< warnings
};

struct ModelArgs {
  std::string model = "st11";
  std::optional<double> mean_w, mean_q, w0, lambda;
  double default_mean_w = 1.0;

  maxent::ModelParams params() const;
  maxent::VolScale scale() const;
  /// The same scale option applied to another model.
  maxent::VolScale scale_for(const maxent::ModelParams& model) const;
  nlohmann::json config() const;
};

void add_model_options(CLI::App& sub, ModelArgs& m, bool with_scale = true);

struct Command {
  std::string name;
  Format default_format = Format::csv;
  bool seeded = false;
  CLI::App* app = nullptr;
  /// Builds the output document from the parsed options.
  std::function<Document()> run;
};

void register_model_commands(CLI::App& root, std::vector<Command>& out, const Globals& g);
void register_data_commands(CLI::App& root, std::vector<Command>& out, const Globals& g);

}  // namespace stvol::cli
