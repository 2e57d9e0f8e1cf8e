#include <CLI11.hpp>
#include <ostream>

#include "dnlab_cli/runner.hpp"

namespace dnlab::cli {

namespace {

void print_checks(std::ostream& out, const RunOutcome& r) {
  char buf[64];
  for (const Check& c : r.checks) {
    std::snprintf(buf, sizeof buf, "measured %.6e, tolerance %.3e", c.measured, c.tolerance);
    out << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << buf << '\n';
  }
}

}  // namespace

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dirichlet-to-Neumann experiments on warped cylinders", "dnlab"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  RunOptions opts;

  auto* run = app.add_subcommand("run", "Run a scenario and write report.json plus CSV artifacts");
  run->add_option("--config", config_path, "Scenario config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides output_dir in the config)");
  run->add_option("--resolution-scale", opts.resolution_scale, "Refine every grid by this integer factor")
      ->check(CLI::PositiveNumber);
  run->add_option("--tol-scale", opts.tol_scale, "Multiply every upper-bound tolerance by this factor")
      ->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "Parse a config and check scenario preconditions");
  validate->add_option("--config", config_path, "Scenario config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    ScenarioConfig cfg = load_config(config_path);
    if (validate->parsed()) {
      check_preconditions(cfg);
      out << "config ok: scenario " << to_string(cfg.scenario) << '\n';
      return 0;
    }
    if (!out_dir.empty()) opts.out_dir = out_dir;
    const std::string dir = opts.out_dir.value_or(cfg.output_dir);
    const RunOutcome r = run_scenario(std::move(cfg), opts);
    r.artifacts.commit(dir);
    print_checks(out, r);
    const auto& s = r.report["summary"];
    out << s["passed"].get<std::size_t>() << "/" << s["total"].get<std::size_t>() << " checks passed; report: "
        << (std::filesystem::path(dir) / "report.json").string() << '\n';
    return r.pass ? 0 : 1;
  } catch (const InvalidInput& e) {
    err << "error: invalid config: " << e.what() << '\n';
    return 2;
  } catch (const Json::exception& e) {
    err << "error: invalid config: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionViolation& e) {
    err << "error: precondition violated: " << e.what() << '\n';
    return 3;
  } catch (const NumericalFailure& e) {
    err << "error: numerical failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  }
}

}  // namespace dnlab::cli
