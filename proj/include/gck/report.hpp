#pragma once

#include "gck/scenario.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gck {

enum class Command {
  kValidate,
  kGamma,
  kTorsion,
  kCurvature,
  kBundleCheck,
  kGaugeApply,
  kReport,
};

std::optional<Command> parse_command(std::string_view name);
std::string_view command_name(Command cmd);

struct RunOptions {
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;  // overrides every per-check default
};

struct CheckRecord {
  std::string name;
  std::string tag;
  double residual = 0.0;
  ChartPoint worst = ChartPoint::Zero();
  double tolerance = 0.0;
  bool pass = true;
};

// Machine-readable run result. render() is deterministic for a fixed
// scenario and seed: one `check` line per record in a fixed order, one
// `comp` line per requested component, no timestamps.
struct Report {
  std::string echo;
  std::vector<CheckRecord> checks;
  std::vector<std::string> components;

  int failed_count() const;
  std::string render() const;
};

Report run_command(Command cmd, const Scenario& scenario, const RunOptions& options = {});

}  // namespace gck
