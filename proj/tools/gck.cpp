#include "CLI11.hpp"

#include "gck/report.hpp"

#include <fstream>
#include <iostream>

namespace {

struct Args {
  std::string scenario;
  std::string out;
  std::optional<double> tolerance;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
};

int run(gck::Command cmd, const Args& args) {
  gck::Scenario scenario;
  try {
    scenario = gck::load_scenario(args.scenario);
  } catch (const gck::ScenarioError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  gck::RunOptions options;
  options.tolerance = args.tolerance;
  options.samples = args.samples;
  options.seed = args.seed;

  gck::Report report;
  try {
    report = gck::run_command(cmd, scenario, options);
  } catch (const gck::ScenarioError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  std::string body = report.render();
  std::cout << body;
  if (!args.out.empty()) {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << args.out << "'\n";
      return 2;
    }
    out << body;
  }
  return report.failed_count() == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frame-relative connection calculus: concordance, curvature and gauge checks "
               "over a four-coordinate chart"};
  app.require_subcommand(1);

  static const char* names[] = {"validate",     "gamma",       "torsion", "curvature",
                                "bundle-check", "gauge-apply", "report"};
  static const char* blurbs[] = {
      "run every structural invariant check",
      "print the metric connection components",
      "print the torsion components of the metric connection",
      "curvature checks plus tangent/bundle curvature components",
      "bundle tensor and connection concordance checks",
      "apply the gauge blocks and re-check the transformed connections",
      "run every check suite",
  };

  Args args;
  double tolerance_val = 0.0;
  int samples_val = 0;
  std::uint64_t seed_val = 0;
  std::vector<CLI::App*> subs;
  for (int n = 0; n < 7; ++n) {
    CLI::App* sub = app.add_subcommand(names[n], blurbs[n]);
    sub->add_option("--scenario", args.scenario, "scenario file")->required();
    sub->add_option("--tolerance", tolerance_val, "override every per-check tolerance")
        ->each([&args](const std::string& v) { args.tolerance = std::stod(v); });
    sub->add_option("--samples", samples_val, "override the scenario sample count")
        ->each([&args](const std::string& v) { args.samples = std::stoi(v); });
    sub->add_option("--seed", seed_val, "override the scenario sampling seed")
        ->each([&args](const std::string& v) {
          args.seed = static_cast<std::uint64_t>(std::stoull(v));
        });
    sub->add_option("--out", args.out, "also write the report to this file");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (int n = 0; n < 7; ++n) {
    if (subs[static_cast<std::size_t>(n)]->parsed())
      return run(*gck::parse_command(names[n]), args);
  }
  return 2;
}
