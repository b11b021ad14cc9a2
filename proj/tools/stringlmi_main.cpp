#include <CLI11.hpp>
#include <iostream>

#include "stringlmi/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stability certification for an ODE coupled to a damped string"};
  app.set_version_flag("--version", stringlmi::cli::tool_version());
  app.require_subcommand(1);

  stringlmi::cli::CommandLine cmd;
  std::string config;
  std::string out;
  std::string certificate;

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"check", "solve the LMI at analysis.order and write a certificate"},
      {"cmin", "minimum certified wave speed for each order in analysis.orders"},
      {"chart", "c_min over analysis.c0_grid x analysis.orders"},
      {"simulate", "finite-difference co-simulation (plus Lyapunov checks)"},
      {"verify", "re-check a certificate file against the configured system"},
      {"export", "write the LMI as a sparse SDPA file"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides the config)");
    if (std::string(name) == "verify") {
      sub->add_option("--certificate", certificate, "certificate JSON (default <out>/certificate.json)");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : stringlmi::cli::kConfigError;
  }

  cmd.command = app.get_subcommands().front()->get_name();
  cmd.config = config;
  if (!out.empty()) cmd.out = out;
  if (!certificate.empty()) cmd.certificate = certificate;
  return stringlmi::cli::run(cmd, std::cout, std::cerr);
}
