#pragma once

#include "gck/bundle.hpp"

#include <map>
#include <optional>
#include <string>

namespace gck {

struct ScenarioIssue {
  int line = 0;  // 0 when the issue is not tied to a line
  std::string message;
};

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<ScenarioIssue> issues);
  const std::vector<ScenarioIssue>& issues() const { return issues_; }

 private:
  std::vector<ScenarioIssue> issues_;
};

struct ChartSpec {
  int samples = 100;
  std::uint64_t seed = 1;
  Box box;
  std::vector<Expr> avoid;
  double avoid_margin = 0.05;
};

// One bundle block: the basic tensors plus optional connection entries.
struct BundleSpec {
  int q = 1;
  ExprMatrix hermitian;
  Expr skew_seed;               // d entry; ignored for q=1
  std::array<ExprMatrix, 4> a;  // A components, zero when not given
  bool has_connection = false;
};

struct GaugeSpec {
  int q = 1;
  Expr phi;       // q = 1
  ExprMatrix s;   // q >= 2
};

// Parsed and validated scenario file. Line-oriented sectioned text:
// `[section]` headers and `key = expression` entries; see README for
// the full key set.
struct Scenario {
  std::string path;
  ChartSpec chart;
  ExprMatrix4 frame_coeff;   // defaults to the identity
  ExprMatrix4 metric_g;      // defaults to diag(1,-1,-1,-1)
  std::map<int, BundleSpec> bundles;  // keyed by rank
  std::map<int, GaugeSpec> gauges;    // keyed by rank

  SampleSet make_samples(std::optional<int> samples_override,
                         std::optional<std::uint64_t> seed_override) const;
  FrameField make_frame(const SampleSet& samples) const;
  MetricField make_metric(const SampleSet& samples) const;
  BundleStructure make_bundle(int q) const;
  ConnectionTriple make_connection(int q, const GammaField& gamma) const;
  GaugeMap make_gauge(int q) const;
};

// Parses and validates. Collects parse problems, rank inconsistencies,
// frame degeneracy and metric singularity into a ScenarioError.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& path_label);

}  // namespace gck
