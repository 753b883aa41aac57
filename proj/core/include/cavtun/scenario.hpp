#ifndef CAVTUN_SCENARIO_HPP
#define CAVTUN_SCENARIO_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace cavtun {

// Config-file failure (unreadable file, syntax, unknown/duplicate/missing
// keys, malformed values) with a 1-based source position. The CLI reports
// these as exit code 2; physics-domain violations raised by the modules
// (std::domain_error) map to exit code 3.
class ConfigError : public std::runtime_error {
public:
  ConfigError(int line, int column, const std::string& message)
      : std::runtime_error(message), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

struct ScenarioOutcome {
  std::vector<std::string> files_written;
  std::vector<std::string> warnings;
};

// Parses the flat key=value config at `config_path`, runs the scenario it
// describes, and writes `<prefix>_series.csv` plus `<prefix>_report.txt`
// (`<prefix>_spectrum.csv` for the spectrum kind; grid validation adds
// `<prefix>_analytic_series.csv`). Output is deterministic: two runs of
// the same config produce byte-identical files.
ScenarioOutcome run_scenario(const std::string& config_path);

// Same validation pass as run_scenario (including precondition checks that
// need no simulation) without executing or writing anything. Returns the
// warnings that a run would print.
std::vector<std::string> validate_config(const std::string& config_path);

// Human-readable description of every scenario kind and its keys.
std::string scenario_catalog();

} // namespace cavtun

#endif
