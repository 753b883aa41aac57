// Command-line front end: run/validate flat key=value scenario configs,
// or list the available scenario kinds.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cavtun/scenario.hpp"
#include "cavtun/version.hpp"

namespace {

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int report_config_error(const std::string& path, const cavtun::ConfigError& e) {
  std::cerr << "config error: " << path << ':' << e.line() << ':' << e.column()
            << ": " << e.what() << '\n';
  return 2;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"coupled cavity-tunneling dynamics"};
  app.set_version_flag("--version", std::string("cavtun ") + cavtun::version);
  app.require_subcommand(1);

  std::string run_config, validate_config_path;
  CLI::App* run = app.add_subcommand("run", "run a scenario config");
  run->add_option("config", run_config, "path to a key=value scenario config")
      ->required();
  CLI::App* validate =
      app.add_subcommand("validate", "check a config without running it");
  validate->add_option("config", validate_config_path, "path to check")
      ->required();
  app.add_subcommand("list", "describe every scenario kind and its keys");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) {
      cavtun::ScenarioOutcome outcome = cavtun::run_scenario(run_config);
      print_warnings(outcome.warnings);
      for (const auto& f : outcome.files_written)
        std::cout << "wrote " << f << '\n';
      return 0;
    }
    if (validate->parsed()) {
      print_warnings(cavtun::validate_config(validate_config_path));
      std::cout << "ok: " << validate_config_path << '\n';
      return 0;
    }
    std::cout << cavtun::scenario_catalog();
    return 0;
  } catch (const cavtun::ConfigError& e) {
    return report_config_error(run->parsed() ? run_config
                                             : validate_config_path,
                               e);
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
