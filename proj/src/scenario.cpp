#include "gck/scenario.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace gck {
namespace {

std::string join_issues(const std::vector<ScenarioIssue>& issues) {
  std::ostringstream out;
  out << "scenario validation failed:";
  for (const ScenarioIssue& i : issues) {
    out << "\n  ";
    if (i.line > 0) out << "line " << i.line << ": ";
    out << i.message;
  }
  return out.str();
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  std::size_t b = s.find_last_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

bool parse_int(const std::string& text, long& out) {
  try {
    std::size_t used = 0;
    out = std::stol(text, &used);
    return used == text.size();
  } catch (...) {
    return false;
  }
}

bool parse_double(const std::string& text, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(text, &used);
    return used == text.size();
  } catch (...) {
    return false;
  }
}

struct Collector {
  std::vector<ScenarioIssue> issues;
  void add(int line, std::string message) { issues.push_back({line, std::move(message)}); }
  bool ok() const { return issues.empty(); }
};

int digit(char c) { return c - '0'; }

// A<i>_<k><j> with bundle indices printed 1-based and the tangent index 0-based.
bool parse_connection_key(const std::string& key, int q, int& i, int& k, int& j) {
  if (key.size() != 5 || key[0] != 'A' || key[2] != '_') return false;
  if (!std::isdigit(static_cast<unsigned char>(key[1])) ||
      !std::isdigit(static_cast<unsigned char>(key[3])) ||
      !std::isdigit(static_cast<unsigned char>(key[4])))
    return false;
  i = digit(key[1]) - 1;
  k = digit(key[3]);
  j = digit(key[4]) - 1;
  return i >= 0 && i < q && j >= 0 && j < q && k >= 0 && k < 4;
}

ExprMatrix zero_matrix(int q) { return ExprMatrix::Constant(q, q, Expr(0.0)); }

}  // namespace

ScenarioError::ScenarioError(std::vector<ScenarioIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

SampleSet Scenario::make_samples(std::optional<int> samples_override,
                                 std::optional<std::uint64_t> seed_override) const {
  return SampleSet::generate(chart.box, samples_override.value_or(chart.samples),
                             seed_override.value_or(chart.seed), chart.avoid,
                             chart.avoid_margin);
}

FrameField Scenario::make_frame(const SampleSet& samples) const {
  return FrameField::from_components(frame_coeff, samples);
}

MetricField Scenario::make_metric(const SampleSet& samples) const {
  return MetricField::from_components(metric_g, samples);
}

BundleStructure Scenario::make_bundle(int q) const {
  const BundleSpec& spec = bundles.at(q);
  if (q == 1) return BundleStructure::u1(spec.hermitian(0, 0));
  if (q == 2) return BundleStructure::su2(spec.hermitian, spec.skew_seed);
  return BundleStructure::su3(spec.hermitian, spec.skew_seed);
}

ConnectionTriple Scenario::make_connection(int q, const GammaField& gamma) const {
  const BundleSpec& spec = bundles.at(q);
  return ConnectionTriple::real_connection(q, gamma, spec.a);
}

GaugeMap Scenario::make_gauge(int q) const {
  const GaugeSpec& spec = gauges.at(q);
  if (q == 1) return GaugeMap::phase(spec.phi);
  return GaugeMap::matrix(spec.s);
}

Scenario parse_scenario_text(const std::string& text, const std::string& path_label) {
  Scenario sc;
  sc.path = path_label;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) sc.frame_coeff(j, i) = Expr(j == i ? 1.0 : 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) sc.metric_g(i, j) = Expr(i == j ? (i == 0 ? 1.0 : -1.0) : 0.0);

  Collector errs;
  std::map<int, std::map<std::string, int>> bundle_keys;  // for presence checks
  std::map<std::string, int> metric_seen;                 // key -> line

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  std::string section;

  auto parse_entry_expr = [&](int line, const std::string& value) -> std::optional<Expr> {
    try {
      return parse_expr(value);
    } catch (const ParseError& e) {
      errs.add(line, std::string("expression error: ") + e.what());
      return std::nullopt;
    }
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (std::size_t hash = line.find('#'); hash != std::string::npos)
      line = trim(line.substr(0, hash));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        errs.add(line_no, "malformed section header '" + line + "'");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"chart",     "frame",    "metric",    "u1",       "su2",
                                    "su3",       "gauge:u1", "gauge:su2", "gauge:su3"};
      bool ok = false;
      for (const char* k : known) ok = ok || section == k;
      if (!ok) {
        errs.add(line_no, "unknown section '" + section + "'");
        section.clear();
        continue;
      }
      if (section == "u1" || section == "su2" || section == "su3") {
        int q = section == "u1" ? 1 : (section == "su2" ? 2 : 3);
        BundleSpec spec;
        spec.q = q;
        spec.hermitian = zero_matrix(q);
        spec.skew_seed = Expr(q >= 2 ? 1.0 : 0.0);
        for (int k = 0; k < 4; ++k) spec.a[k] = zero_matrix(q);
        sc.bundles.emplace(q, std::move(spec));
      }
      if (section.rfind("gauge:", 0) == 0) {
        int q = section == "gauge:u1" ? 1 : (section == "gauge:su2" ? 2 : 3);
        GaugeSpec g;
        g.q = q;
        g.phi = Expr(0.0);
        g.s = zero_matrix(std::max(q, 1));
        sc.gauges.emplace(q, std::move(g));
      }
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      errs.add(line_no, "expected 'key = value', got '" + line + "'");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      errs.add(line_no, "entry outside of any section");
      continue;
    }

    if (section == "chart") {
      if (key == "samples") {
        long n;
        if (!parse_int(value, n) || n <= 0 || n > 100000)
          errs.add(line_no, "samples must be a positive integer");
        else
          sc.chart.samples = static_cast<int>(n);
      } else if (key == "seed") {
        long n;
        if (!parse_int(value, n) || n < 0)
          errs.add(line_no, "seed must be a nonnegative integer");
        else
          sc.chart.seed = static_cast<std::uint64_t>(n);
      } else if (key.size() == 4 && key.rfind("box", 0) == 0 &&
                 std::isdigit(static_cast<unsigned char>(key[3]))) {
        int axis = digit(key[3]);
        std::istringstream pair(value);
        double lo, hi;
        if (axis > 3 || !(pair >> lo >> hi) || !(pair >> std::ws).eof() || lo >= hi)
          errs.add(line_no, "box entries are 'box<axis> = lo hi' with lo < hi");
        else {
          sc.chart.box.lo[axis] = lo;
          sc.chart.box.hi[axis] = hi;
        }
      } else if (key == "avoid") {
        if (auto e = parse_entry_expr(line_no, value)) sc.chart.avoid.push_back(*e);
      } else if (key == "avoid_margin") {
        double m;
        if (!parse_double(value, m) || m <= 0)
          errs.add(line_no, "avoid_margin must be a positive number");
        else
          sc.chart.avoid_margin = m;
      } else {
        errs.add(line_no, "unknown [chart] key '" + key + "'");
      }
    } else if (section == "frame") {
      if (key.size() == 3 && key[0] == 'u' && std::isdigit(static_cast<unsigned char>(key[1])) &&
          std::isdigit(static_cast<unsigned char>(key[2])) && digit(key[1]) < 4 &&
          digit(key[2]) < 4) {
        if (auto e = parse_entry_expr(line_no, value))
          sc.frame_coeff(digit(key[1]), digit(key[2])) = *e;
      } else {
        errs.add(line_no, "unknown [frame] key '" + key + "' (expected u<j><i>, indices 0..3)");
      }
    } else if (section == "metric") {
      if (key.size() == 3 && key[0] == 'g' && std::isdigit(static_cast<unsigned char>(key[1])) &&
          std::isdigit(static_cast<unsigned char>(key[2])) && digit(key[1]) < 4 &&
          digit(key[2]) < 4) {
        int i = digit(key[1]);
        int j = digit(key[2]);
        std::string canon = std::string("g") + char('0' + std::min(i, j)) + char('0' + std::max(i, j));
        if (metric_seen.count(canon))
          errs.add(line_no, "metric entry '" + canon + "' given twice (it is mirrored)");
        metric_seen[canon] = line_no;
        if (auto e = parse_entry_expr(line_no, value)) {
          sc.metric_g(i, j) = *e;
          sc.metric_g(j, i) = *e;
        }
      } else {
        errs.add(line_no, "unknown [metric] key '" + key + "' (expected g<i><j>, indices 0..3)");
      }
    } else if (section == "u1" || section == "su2" || section == "su3") {
      int q = section == "u1" ? 1 : (section == "su2" ? 2 : 3);
      BundleSpec& spec = sc.bundles.at(q);
      if (key.size() == 3 && key[0] == 'D' && std::isdigit(static_cast<unsigned char>(key[1])) &&
          std::isdigit(static_cast<unsigned char>(key[2]))) {
        int i = digit(key[1]) - 1;
        int j = digit(key[2]) - 1;
        if (i < 0 || i >= q || j < 0 || j >= q) {
          errs.add(line_no, "[" + section + "] key '" + key +
                                "': index out of range for a rank-" + std::to_string(q) +
                                " bundle");
        } else if (auto e = parse_entry_expr(line_no, value)) {
          spec.hermitian(i, j) = *e;
          bundle_keys[q][key] = line_no;
        }
      } else if ((q == 2 && key == "d12") || (q == 3 && key == "d123")) {
        if (auto e = parse_entry_expr(line_no, value)) spec.skew_seed = *e;
      } else if (key.rfind("d", 0) == 0 && key.size() >= 3) {
        errs.add(line_no, "[" + section + "] key '" + key + "': only the canonical entry " +
                              (q >= 3 ? "d123" : "d12") +
                              " is stored; the rest follow by skew-symmetry");
      } else if (key.size() == 5 && key[0] == 'A') {
        int i, k, j;
        if (!parse_connection_key(key, q, i, k, j)) {
          errs.add(line_no, "[" + section + "] key '" + key +
                                "': expected A<i>_<k><j> with bundle indices 1.." +
                                std::to_string(q) + " and tangent index 0..3");
        } else if (auto e = parse_entry_expr(line_no, value)) {
          spec.a[k](i, j) = *e;
          spec.has_connection = true;
        }
      } else {
        errs.add(line_no, "unknown [" + section + "] key '" + key + "'");
      }
    } else if (section.rfind("gauge:", 0) == 0) {
      int q = section == "gauge:u1" ? 1 : (section == "gauge:su2" ? 2 : 3);
      GaugeSpec& g = sc.gauges.at(q);
      if (q == 1 && key == "phi") {
        if (auto e = parse_entry_expr(line_no, value)) g.phi = *e;
      } else if (q >= 2 && key.size() == 3 && key[0] == 'S' &&
                 std::isdigit(static_cast<unsigned char>(key[1])) &&
                 std::isdigit(static_cast<unsigned char>(key[2]))) {
        int i = digit(key[1]) - 1;
        int j = digit(key[2]) - 1;
        if (i < 0 || i >= q || j < 0 || j >= q)
          errs.add(line_no, "[" + section + "] key '" + key +
                                "': index out of range for a rank-" + std::to_string(q) + " map");
        else if (auto e = parse_entry_expr(line_no, value))
          g.s(i, j) = *e;
      } else {
        errs.add(line_no, "unknown [" + section + "] key '" + key + "'");
      }
    }
  }

  // Hermitian blocks must be completely specified.
  for (const auto& [q, spec] : sc.bundles) {
    (void)spec;
    for (int i = 1; i <= q; ++i)
      for (int j = 1; j <= q; ++j) {
        std::string key = std::string("D") + char('0' + i) + char('0' + j);
        if (!bundle_keys[q].count(key))
          errs.add(0, "[" + std::string(q == 1 ? "u1" : (q == 2 ? "su2" : "su3")) +
                          "] missing entry '" + key + "'");
      }
  }

  if (!errs.ok()) throw ScenarioError(std::move(errs.issues));

  // Numeric validation: the frame and metric must be usable over both
  // the declared sample set and a denser probe of the same box (the
  // probe catches loci the sparse set straddles without touching).
  SampleSet samples = sc.make_samples(std::nullopt, std::nullopt);
  SampleSet probe = SampleSet::generate(sc.chart.box, 2048, sc.chart.seed + 7,
                                        sc.chart.avoid, sc.chart.avoid_margin);
  auto probe_floor = [&](const ExprMatrix4& m, const char* what) {
    double d = min_abs_determinant4(m, probe);
    if (d <= 1e-6)
      errs.add(0, std::string(what) + ": determinant reaches " + std::to_string(d) +
                      " inside the sample box; declare the locus in [chart] avoid entries");
  };
  try {
    sc.make_frame(samples);
    probe_floor(sc.frame_coeff, "degenerate frame");
  } catch (const GeometryError& e) {
    errs.add(0, e.what());
  }
  try {
    sc.make_metric(samples);
    probe_floor(sc.metric_g, "singular metric");
  } catch (const GeometryError& e) {
    errs.add(0, e.what());
  }
  if (!errs.ok()) throw ScenarioError(std::move(errs.issues));
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError({{0, "cannot open scenario file '" + path + "'"}});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

}  // namespace gck
