#include "stvol/cli.hpp"

#include <fstream>
#include <ostream>

#include "CLI11.hpp"

#include "commands.hpp"
#include "stvol/error.hpp"
#include "stvol/parallel.hpp"

namespace stvol::cli {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maximum-entropy stochastic volatility model of stock returns", "stvol"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "stvol " + tool_version());

  Globals g;
  g.err = &err;
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--output,-o", g.output, "Output path, '-' for stdout")->capture_default_str();
  app.add_option("--format", g.format, "csv or json (default depends on the command)")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", g.threads, "Worker threads (0: runtime default)")->check(CLI::NonNegativeNumber);

  std::vector<Command> commands;
  register_model_commands(app, commands, g);
  register_data_commands(app, commands, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }
  set_threads(g.threads);

  const Command* cmd = nullptr;
  for (const auto& c : commands)
    if (c.app->parsed()) cmd = &c;
  if (!cmd) {
    err << "error: no command given\n";
    return 2;
  }

  try {
    Document doc = cmd->run();
    doc.command = cmd->name;
    doc.seed = g.seed;
    doc.uses_seed = cmd->seeded;
    const Format fmt = g.format.empty() ? cmd->default_format : (g.format == "json" ? Format::json : Format::csv);
    const std::string text = render(doc, fmt);
    if (g.output == "-") {
      out << text;
      out.flush();
    } else {
      std::ofstream f(g.output, std::ios::binary);
      if (!f) throw DomainError("cannot write '" + g.output + "'");
      f << text;
      if (!f) throw DomainError("failed writing '" + g.output + "'");
    }
    return 0;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace stvol::cli
