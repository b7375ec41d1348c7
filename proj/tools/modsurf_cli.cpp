// Command-line driver: loads a gluing pattern and a group model, runs one of
// the verification suites, and writes a machine-readable JSON report.
//
// Exit codes: 0 all checks pass, 1 tolerance failure (report still written),
// 2 configuration or parse error, 3 internal solve failure.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "modsurf/dynamics.hpp"
#include "modsurf/report.hpp"
#include "modsurf/stock.hpp"
#include "modsurf/surface.hpp"

namespace {

std::string load_pattern_text(const std::string& spec) {
  if (spec.rfind("stock:", 0) == 0)
    return modsurf::print_pattern(modsurf::stock::pattern(spec.substr(6)));
  std::ifstream in(spec);
  if (!in) throw modsurf::ReportError("cannot open pattern file: " + spec);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "modsurf: moduli spaces of flat bundles over glued surfaces -- "
      "2-form, flow, groupoid and Dirac verification suites"};
  app.require_subcommand(1);

  modsurf::RunConfig config;
  std::string pattern_spec;
  std::string out_path;
  std::vector<std::string> tol_args;

  auto add_common = [&](CLI::App* cmd, bool needs_pattern) {
    auto* opt = cmd->add_option(
        "--pattern", pattern_spec,
        "pattern file, or stock:<name> (see README for the stock list)");
    if (needs_pattern) opt->required();
    cmd->add_option("--group", config.group_name,
                    "group model name (SU2, SL2R, T2)");
    cmd->add_option("--seed", config.seed, "RNG seed");
    cmd->add_option("--samples", config.n_samples, "sample count")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--fd-step", config.fd_step,
                    "finite-difference step in (0, 1e-2]");
    cmd->add_option("--tol", tol_args,
                    "tolerance override KEY=VALUE (repeatable)");
    cmd->add_option("--out", out_path, "report output path (default stdout)");
  };

  add_common(app.add_subcommand("surface", "combinatorial surface report"),
             true);
  add_common(app.add_subcommand(
                 "verify", "2-form suite: d-omega, moment, kernel, rank, "
                           "degeneracy, pattern comparison"),
             true);
  add_common(app.add_subcommand("flow", "Hamiltonian flow scenarios"), true);
  add_common(app.add_subcommand("bracket", "Goldman vs numeric brackets"),
             true);
  auto* groupoid_cmd = app.add_subcommand(
      "groupoid", "cylinder quasi-symplectic groupoid suite");
  add_common(groupoid_cmd, false);
  auto* dirac_cmd =
      app.add_subcommand("dirac", "Courant fiber and Dirac-morphism suite");
  add_common(dirac_cmd, true);
  dirac_cmd->add_option("--perturb-omega", config.perturb_omega,
                        "negative control: symmetric noise amplitude");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    config.command = app.get_subcommands().front()->get_name();
    if (!pattern_spec.empty()) {
      config.pattern_name = pattern_spec;
      config.pattern_text = load_pattern_text(pattern_spec);
    }
    for (const std::string& kv : tol_args) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw modsurf::ReportError("bad --tol argument: " + kv);
      config.tolerances[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    }
    if (config.n_samples < 1)
      throw modsurf::ReportError("--samples must be at least 1");
    if (config.fd_step <= 0.0 || config.fd_step > 1e-2)
      throw modsurf::ReportError("--fd-step must lie in (0, 1e-2]");

    const auto result = modsurf::run_suite(config);
    const std::string text = modsurf::serialize_report(result.report);
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out)
        throw modsurf::ReportError("cannot write report: " + out_path);
      out << text;
    }
    for (const auto& check : result.report.at("checks"))
      std::cerr << (check.at("pass").get<bool>() ? "[pass] " : "[FAIL] ")
                << check.at("name").get<std::string>() << " = "
                << check.at("value").get<double>() << "\n";
    return result.pass ? 0 : 1;
  } catch (const modsurf::ReportError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const modsurf::SurfaceError& e) {
    std::cerr << "pattern error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
