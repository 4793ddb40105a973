// Command-line front end: wflow <subcommand> --config run.toml [flags]

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wflow/commands.hpp"
#include "wflow/errors.hpp"

namespace {

struct Flags {
  std::string config;
  wflow::ConfigOverrides overrides;
};

void add_common(CLI::App* sub, Flags& flags) {
  sub->add_option("--config", flags.config, "Run configuration file")->required();
  sub->add_option_function<std::string>(
      "--out", [&](const std::string& v) { flags.overrides.output_dir = v; },
      "Output directory");
  sub->add_option_function<std::string>(
      "--grid", [&](const std::string& v) { flags.overrides.grid = v; },
      "Phase-space grid as nx,nk,xmax,kmax");
  sub->add_option_function<int>(
      "--eta-max", [&](int v) { flags.overrides.eta_max = v; },
      "Highest series order");
  sub->add_option_function<std::string>(
         "--format", [&](const std::string& v) { flags.overrides.format = v; },
         "Field/table format")
      ->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wigner flow field engine"};
  app.require_subcommand(1);
  Flags flags;

  struct Entry {
    const char* name;
    const char* help;
    wflow::CommandResult (*run)(const wflow::RunConfig&);
  };
  const Entry entries[] = {
      {"flow-field", "Export Wigner currents, divergence and Liouvillianity",
       &wflow::cmd_flow_field},
      {"camouflage-verify", "Certify stationarity and the zero mode of a camouflage Hamiltonian",
       &wflow::cmd_camouflage_verify},
      {"scan", "Certify the simplified camouflage family over zeta and gamma lists",
       &wflow::cmd_scan},
      {"zero-mode", "Pseudospectral zero-mode residual", &wflow::cmd_zero_mode},
  };
  for (const auto& e : entries) add_common(app.add_subcommand(e.name, e.help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : wflow::kExitUsage;
  }

  for (const auto& e : entries) {
    if (!app.got_subcommand(e.name)) continue;
    try {
      const wflow::RunConfig config = wflow::load_config(flags.config, flags.overrides);
      const wflow::CommandResult result = e.run(config);
      for (const auto& f : result.files) std::cout << f.string() << '\n';
      return result.exit_code;
    } catch (const wflow::ConfigError& err) {
      std::cerr << "wflow: configuration error: " << err.what() << '\n';
      return wflow::kExitUsage;
    } catch (const wflow::InputError& err) {
      std::cerr << "wflow: " << err.what() << '\n';
      return wflow::kExitUsage;
    } catch (const std::exception& err) {
      std::cerr << "wflow: " << err.what() << '\n';
      return wflow::kExitFailure;
    }
  }
  return wflow::kExitUsage;
}
