#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dnlab_cli/config.hpp"

namespace dnlab::cli {

struct Check {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string anchor;
};

/// Named file contents held in memory until the run has finished.
class Artifacts {
 public:
  void add(std::string name, std::string content);
  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }
  /// Each file goes to `<name>.tmp` first and is renamed into place.
  void commit(const std::filesystem::path& dir) const;

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

struct RunOptions {
  std::optional<std::string> out_dir;
  int resolution_scale = 1;
  double tol_scale = 1.0;
};

struct RunOutcome {
  std::vector<Check> checks;
  Json report;
  Artifacts artifacts;  // report.json last
  bool pass = false;
};

/// Executes the scenario in memory. Throws ConfigError, PreconditionViolation
/// or NumericalFailure; nothing is written.
RunOutcome run_scenario(ScenarioConfig cfg, const RunOptions& opts);

/// Exit codes: 0 all checks pass, 1 some check fails, 2 bad command line or
/// config, 3 precondition violated, 4 numerical or I/O failure.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dnlab::cli
