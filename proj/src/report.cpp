#include "gck/report.hpp"

#include <Eigen/Eigenvalues>

#include <cstdio>
#include <sstream>

namespace gck {
namespace {

constexpr double kTolConstant = 1e-10;  // structural identities on given data
constexpr double kTolDerived = 1e-9;    // identities through derivatives/inverses
constexpr double kTolExact = 1e-12;     // identities that fold to exact zeros
constexpr double kTolCovariance = 1e-8; // transformed-curvature comparison

std::string prefix_of(int q) { return q == 1 ? "u1" : (q == 2 ? "su2" : "su3"); }

std::string fmt_point(const ChartPoint& p) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "(%.9g,%.9g,%.9g,%.9g)", p[0], p[1], p[2], p[3]);
  return buf;
}

// Everything the commands share, computed once per run.
struct Pipeline {
  SampleSet samples;
  FrameField frame;
  MetricField metric;
  StructureConstants c;
  GammaField gamma;

  Pipeline(const Scenario& sc, const RunOptions& opt)
      : samples(sc.make_samples(opt.samples, opt.seed)),
        frame(sc.make_frame(samples)),
        metric(sc.make_metric(samples)),
        c(structure_constants(frame)),
        gamma(christoffel(metric, frame, c)) {}
};

class Builder {
 public:
  Builder(const Scenario& sc, const RunOptions& opt) : sc_(sc), opt_(opt), pipe_(sc, opt) {}

  Report take() { return std::move(report_); }

  void echo(Command cmd) {
    char tol_text[48] = "default";
    if (opt_.tolerance) std::snprintf(tol_text, sizeof tol_text, "%.6e", *opt_.tolerance);
    char buf[512];
    std::snprintf(buf, sizeof buf, "# gck %s scenario=%s samples=%d seed=%llu tolerance=%s",
                  std::string(command_name(cmd)).c_str(), sc_.path.c_str(),
                  static_cast<int>(pipe_.samples.size()),
                  static_cast<unsigned long long>(opt_.seed.value_or(sc_.chart.seed)),
                  tol_text);
    report_.echo = buf;
  }

  // --- record helpers ---------------------------------------------------

  void add(const NamedResidual& r, double default_tol) {
    CheckRecord rec;
    rec.name = r.name;
    rec.tag = r.tag;
    rec.residual = r.stat.max_abs;
    rec.worst = r.stat.worst;
    rec.tolerance = opt_.tolerance.value_or(default_tol);
    rec.pass = rec.residual <= rec.tolerance;
    report_.checks.push_back(std::move(rec));
  }

  void add(const ResidualReport& rs, double default_tol) {
    for (const NamedResidual& r : rs) add(r, default_tol);
  }

  void add_floor(std::string name, std::string tag, double floor, double min_value,
                 const ChartPoint& worst) {
    CheckRecord rec;
    rec.name = std::move(name);
    rec.tag = std::move(tag);
    rec.residual = std::max(0.0, floor - min_value);
    rec.worst = worst;
    rec.tolerance = 0.0;
    rec.pass = rec.residual <= rec.tolerance;
    report_.checks.push_back(std::move(rec));
  }

  void component(const std::string& name, const Expr& e) {
    report_.components.push_back("comp " + name + " = " + e.str());
  }

  // --- geometry ----------------------------------------------------------

  void validate_geometry() {
    // frame determinant floor
    double min_det = std::numeric_limits<double>::infinity();
    ChartPoint worst = pipe_.samples.points().front();
    for (const ChartPoint& p : pipe_.samples.points()) {
      double d = std::abs(eval_matrix4(pipe_.frame.coeff, p).determinant());
      if (d < min_det) {
        min_det = d;
        worst = p;
      }
    }
    add_floor("frame.nondegenerate", "eq:2.3", 1e-9, min_det, worst);

    std::vector<Expr> antisym, c_im;
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          antisym.push_back(pipe_.c(k, i, j) + pipe_.c(k, j, i));
          c_im.push_back(imag(pipe_.c(k, i, j)));
        }
    add(evaluate_residual("structure.antisymmetry", "eq:2.4", antisym, pipe_.samples),
        kTolConstant);
    add(evaluate_residual("structure.real", "eq:2.4", c_im, pipe_.samples), kTolExact);

    std::vector<Expr> sym, g_im;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        sym.push_back(pipe_.metric.g(i, j) - pipe_.metric.g(j, i));
        g_im.push_back(imag(pipe_.metric.g(i, j)));
      }
    add(evaluate_residual("metric.symmetric", "eq:2.9", sym, pipe_.samples), kTolExact);
    add(evaluate_residual("metric.real", "eq:2.9", g_im, pipe_.samples), kTolExact);

    std::vector<Expr> inv_res;
    ExprMatrix gg = to_dynamic(pipe_.metric.g) * to_dynamic(pipe_.metric.g_inv);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) inv_res.push_back(gg(i, j) - Expr(i == j ? 1.0 : 0.0));
    add(evaluate_residual("metric.inverse", "eq:2.9", inv_res, pipe_.samples), kTolConstant);

    // signature count at sample points
    int bad = 0;
    ChartPoint worst_sig = pipe_.samples.points().front();
    for (const ChartPoint& p : pipe_.samples.points()) {
      Eigen::Matrix4cd m = eval_matrix4(pipe_.metric.g, p);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m.real());
      int pos = 0, neg = 0;
      for (int k = 0; k < 4; ++k) {
        if (es.eigenvalues()[k] > 1e-9) ++pos;
        if (es.eigenvalues()[k] < -1e-9) ++neg;
      }
      if (pos != 1 || neg != 3) {
        ++bad;
        worst_sig = p;
      }
    }
    CheckRecord sig;
    sig.name = "metric.signature";
    sig.tag = "eq:2.9";
    sig.residual = static_cast<double>(bad);
    sig.worst = worst_sig;
    sig.tolerance = 0.0;
    sig.pass = bad == 0;
    report_.checks.push_back(std::move(sig));

    std::vector<Expr> gamma_im;
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) gamma_im.push_back(imag(pipe_.gamma(k, i, j)));
    add(evaluate_residual("gamma.real", "eq:2.7", gamma_im, pipe_.samples), kTolExact);

    TorsionTensor t = torsion(pipe_.gamma, pipe_.c);
    std::vector<Expr> t_res;
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) t_res.push_back(t(k, i, j));
    add(evaluate_residual("torsion.free", "eq:2.8", t_res, pipe_.samples), kTolDerived);

    TensorField gt(TensorType{0, 0, 0, 0, 0, 2}, 1);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) gt.at({i, j}) = pipe_.metric.g(i, j);
    TensorField ng =
        covariant_differential(gt, ConnectionTriple::zero(1, pipe_.gamma), pipe_.frame);
    std::vector<Expr> ng_res;
    for (std::size_t n = 0; n < ng.component_count(); ++n) ng_res.push_back(ng.flat(n));
    add(evaluate_residual("metricity.nabla_g", "def:2.2", ng_res, pipe_.samples), kTolDerived);
  }

  void validate_bundles() {
    for (const auto& [q, spec] : sc_.bundles) {
      (void)spec;
      BundleStructure b = sc_.make_bundle(q);
      const std::string p = prefix_of(q);
      const std::string tag = q == 1 ? "eq:1.5" : (q == 2 ? "eq:1.6" : "eq:1.7");

      std::vector<Expr> herm;
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
          herm.push_back(b.hermitian()(i, j) - conj(b.hermitian()(j, i)));
      add(evaluate_residual(p + ".hermitian", tag, herm, pipe_.samples), kTolExact);

      double min_eig = std::numeric_limits<double>::infinity();
      ChartPoint worst = pipe_.samples.points().front();
      for (const ChartPoint& pt : pipe_.samples.points()) {
        Eigen::MatrixXcd m = eval_matrix(b.hermitian(), pt);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
        double lo = es.eigenvalues().minCoeff();
        if (lo < min_eig) {
          min_eig = lo;
          worst = pt;
        }
      }
      add_floor(p + ".positive", tag, 1e-9, min_eig, worst);

      if (q >= 2) {
        double min_seed = std::numeric_limits<double>::infinity();
        ChartPoint worst_seed = pipe_.samples.points().front();
        Tape tape(std::span<const Expr>(&b.skew_seed(), 1));
        for (const ChartPoint& pt : pipe_.samples.points()) {
          double v = std::abs(tape.eval(pt)[0]);
          if (v < min_seed) {
            min_seed = v;
            worst_seed = pt;
          }
        }
        add_floor(p + ".skew_nondegenerate", "eq:1.8", 1e-9, min_seed, worst_seed);
      }
    }
    for (const auto& [q, gspec] : sc_.gauges) {
      (void)gspec;
      add(sc_.make_gauge(q).validate(pipe_.samples), kTolConstant);
    }
  }

  void bundle_checks() {
    for (const auto& [q, spec] : sc_.bundles) {
      BundleStructure b = sc_.make_bundle(q);
      add(check_orthonormal(b, pipe_.samples), kTolConstant);
      if (q >= 2) add(d_concordance(b, pipe_.samples), kTolConstant);
      if (q == 3) add(epsilon_identities(b, pipe_.samples), kTolExact);

      ConnectionTriple conn = sc_.make_connection(q, pipe_.gamma);
      add(connection_concordance(b, conn, pipe_.frame), kTolConstant);
      if (q >= 2) add(su_algebra_check(conn, pipe_.samples), kTolConstant);
      if (q == 1) {
        std::vector<Expr> res;
        for (int k = 0; k < 4; ++k)
          res.push_back(real(conn.a[k](0, 0)) - u1_real_part(b, pipe_.frame, k));
        add(evaluate_residual("u1.real_part", "eq:3.2", res, pipe_.samples), kTolConstant);
      }
      (void)spec;
    }
  }

  void curvature_checks() {
    CurvatureTensor r = tangent_curvature(pipe_.gamma, pipe_.frame, pipe_.c);
    std::vector<Expr> antisym, im;
    for (int p = 0; p < 4; ++p)
      for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) {
            antisym.push_back(r(p, k, i, j) + r(p, k, j, i));
            im.push_back(imag(r(p, k, i, j)));
          }
    add(evaluate_residual("curvature.antisymmetry", "eq:2.10", antisym, pipe_.samples),
        kTolConstant);
    add(evaluate_residual("curvature.real", "eq:2.13", im, pipe_.samples), kTolExact);

    for (const auto& [q, spec] : sc_.bundles) {
      (void)spec;
      ConnectionTriple conn = sc_.make_connection(q, pipe_.gamma);
      RealityReport rep = reality_check(conn, pipe_.frame, pipe_.c);
      NamedResidual abar = rep.a_bar_conjugate;
      NamedResidual rbar = rep.bundle_curvature_conjugate;
      abar.name = prefix_of(q) + ".a_bar_conjugate";
      rbar.name = prefix_of(q) + ".curvature_conjugate";
      add(abar, kTolExact);
      add(rbar, kTolDerived);
    }
  }

  void gauge_checks(bool with_components) {
    for (const auto& [q, gspec] : sc_.gauges) {
      (void)gspec;
      if (!sc_.bundles.count(q)) continue;
      BundleStructure b = sc_.make_bundle(q);
      GaugeMap map = sc_.make_gauge(q);
      ConnectionTriple conn = sc_.make_connection(q, pipe_.gamma);
      ConnectionTriple moved = gauge_transform(conn, map, pipe_.frame);
      const std::string p = prefix_of(q);

      if (q >= 2) {
        std::array<ExprMatrix, 4> ta = theta_params(map, pipe_.frame);
        std::array<ExprMatrix, 4> tb = theta_params_alt(map, pipe_.frame);
        std::vector<Expr> agree;
        for (int k = 0; k < 4; ++k)
          for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j) agree.push_back(ta[k](i, j) - tb[k](i, j));
        add(evaluate_residual("theta." + p + ".forms_agree", q == 2 ? "eq:4.8" : "eq:5.8", agree,
                              pipe_.samples),
            kTolConstant);
      }

      // transformed connection still concordant / in the algebra / real
      ResidualReport conc = connection_concordance(b, moved, pipe_.frame);
      for (NamedResidual& r : conc) r.name = "transformed." + r.name;
      add(conc, kTolDerived);
      if (q >= 2) {
        ResidualReport alg = su_algebra_check(moved, pipe_.samples);
        for (NamedResidual& r : alg) r.name = "transformed." + r.name;
        add(alg, kTolDerived);
      }
      std::vector<Expr> reality;
      for (int k = 0; k < 4; ++k)
        for (int i = 0; i < q; ++i)
          for (int j = 0; j < q; ++j)
            reality.push_back(moved.a_bar[k](i, j) - conj(moved.a[k](i, j)));
      add(evaluate_residual("transformed." + p + ".a_bar_conjugate", "eq:2.7", reality,
                            pipe_.samples),
          kTolExact);

      // covariance of the field strength
      CurvatureTensor before = bundle_curvature(conn, pipe_.frame, pipe_.c);
      CurvatureTensor after = bundle_curvature(moved, pipe_.frame, pipe_.c);
      if (q == 1) {
        std::vector<Expr> inv;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) inv.push_back(after(0, 0, i, j) - before(0, 0, i, j));
        add(evaluate_residual("u1.curvature_invariance", "eq:3.8", inv, pipe_.samples),
            kTolConstant);
      } else {
        std::vector<Expr> cov;
        for (int i = 0; i < 4; ++i) {
          for (int j = 0; j < 4; ++j) {
            ExprMatrix adj = map.s() * before.f[i][j] * map.t();
            for (int pp = 0; pp < q; ++pp)
              for (int kk = 0; kk < q; ++kk) cov.push_back(after(pp, kk, i, j) - adj(pp, kk));
          }
        }
        add(evaluate_residual(p + ".curvature_covariance", q == 2 ? "eq:4.9" : "eq:5.9", cov,
                              pipe_.samples),
            kTolCovariance);
      }

      if (with_components) {
        for (int k = 0; k < 4; ++k)
          for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j)
              component("transformed." + p + ".A[" + std::to_string(i + 1) + "][" +
                            std::to_string(k) + "][" + std::to_string(j + 1) + "]",
                        moved.a[k](i, j));
      }
    }
  }

  void gamma_components() {
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          component("gamma[" + std::to_string(k) + "][" + std::to_string(i) + "][" +
                        std::to_string(j) + "]",
                    pipe_.gamma(k, i, j));
  }

  void torsion_components() {
    TorsionTensor t = torsion(pipe_.gamma, pipe_.c);
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          component("torsion[" + std::to_string(k) + "][" + std::to_string(i) + "][" +
                        std::to_string(j) + "]",
                    t(k, i, j));
  }

  void curvature_components() {
    CurvatureTensor r = tangent_curvature(pipe_.gamma, pipe_.frame, pipe_.c);
    for (int p = 0; p < 4; ++p)
      for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            component("R[" + std::to_string(p) + "][" + std::to_string(k) + "][" +
                          std::to_string(i) + "][" + std::to_string(j) + "]",
                      r(p, k, i, j));
    for (const auto& [q, spec] : sc_.bundles) {
      (void)spec;
      ConnectionTriple conn = sc_.make_connection(q, pipe_.gamma);
      CurvatureTensor f = bundle_curvature(conn, pipe_.frame, pipe_.c);
      const std::string p = prefix_of(q);
      for (int pp = 0; pp < q; ++pp)
        for (int kk = 0; kk < q; ++kk)
          for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
              component(p + ".r[" + std::to_string(pp + 1) + "][" + std::to_string(kk + 1) +
                            "][" + std::to_string(i) + "][" + std::to_string(j) + "]",
                        f(pp, kk, i, j));
      if (q == 1) {
        // one-dimensional bundles: the same values as a plain two-form
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            component("u1.r[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                      f(0, 0, i, j));
      }
    }
  }

 private:
  const Scenario& sc_;
  RunOptions opt_;
  Pipeline pipe_;
  Report report_;
};

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
  if (name == "validate") return Command::kValidate;
  if (name == "gamma") return Command::kGamma;
  if (name == "torsion") return Command::kTorsion;
  if (name == "curvature") return Command::kCurvature;
  if (name == "bundle-check") return Command::kBundleCheck;
  if (name == "gauge-apply") return Command::kGaugeApply;
  if (name == "report") return Command::kReport;
  return std::nullopt;
}

std::string_view command_name(Command cmd) {
  switch (cmd) {
    case Command::kValidate:
      return "validate";
    case Command::kGamma:
      return "gamma";
    case Command::kTorsion:
      return "torsion";
    case Command::kCurvature:
      return "curvature";
    case Command::kBundleCheck:
      return "bundle-check";
    case Command::kGaugeApply:
      return "gauge-apply";
    case Command::kReport:
      return "report";
  }
  return "?";
}

int Report::failed_count() const {
  int n = 0;
  for (const CheckRecord& c : checks)
    if (!c.pass) ++n;
  return n;
}

std::string Report::render() const {
  std::ostringstream out;
  out << echo << "\n";
  for (const CheckRecord& c : checks) {
    char buf[320];
    std::snprintf(buf, sizeof buf, "check %s %s %.6e worst=%s %s", c.name.c_str(), c.tag.c_str(),
                  c.residual, fmt_point(c.worst).c_str(), c.pass ? "PASS" : "FAIL");
    out << buf << "\n";
  }
  for (const std::string& line : components) out << line << "\n";
  char buf[96];
  std::snprintf(buf, sizeof buf, "summary checks=%zu failed=%d components=%zu", checks.size(),
                failed_count(), components.size());
  out << buf << "\n";
  return out.str();
}

Report run_command(Command cmd, const Scenario& scenario, const RunOptions& options) {
  if (cmd == Command::kGaugeApply && scenario.gauges.empty())
    throw ScenarioError({{0, "gauge-apply requires a [gauge:*] block in the scenario"}});
  if ((cmd == Command::kBundleCheck || cmd == Command::kGaugeApply) && scenario.bundles.empty())
    throw ScenarioError(
        {{0, std::string(command_name(cmd)) + " requires a bundle block in the scenario"}});

  Builder b(scenario, options);
  b.echo(cmd);
  switch (cmd) {
    case Command::kValidate:
      b.validate_geometry();
      b.validate_bundles();
      break;
    case Command::kGamma:
      b.gamma_components();
      break;
    case Command::kTorsion:
      b.torsion_components();
      break;
    case Command::kCurvature:
      b.curvature_checks();
      b.curvature_components();
      break;
    case Command::kBundleCheck:
      b.bundle_checks();
      break;
    case Command::kGaugeApply:
      b.gauge_checks(true);
      break;
    case Command::kReport:
      b.validate_geometry();
      b.validate_bundles();
      b.curvature_checks();
      b.bundle_checks();
      b.gauge_checks(false);
      break;
  }
  return b.take();
}

}  // namespace gck
