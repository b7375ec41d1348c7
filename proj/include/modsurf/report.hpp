#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "json.hpp"

namespace modsurf {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;       // surface|verify|flow|bracket|groupoid|dirac
  std::string pattern_name;  // label recorded in the report
  std::string pattern_text;  // parsed pattern description
  std::string group_name = "SU2";
  std::uint64_t seed = 0xC0FFEE;
  int n_samples = 100;
  double fd_step = 1e-4;
  std::map<std::string, double> tolerances;  // per-check overrides
  double perturb_omega = 0.0;                // negative-control knob
};

struct RunResult {
  nlohmann::json report;
  bool pass = false;
};

// Runs one verification suite. Deterministic for a fixed config: the same
// seed yields byte-identical report serializations. Throws ReportError for
// configuration problems (unknown command/group, unusable pattern).
RunResult run_suite(const RunConfig& config);

std::string serialize_report(const nlohmann::json& report);

}  // namespace modsurf
