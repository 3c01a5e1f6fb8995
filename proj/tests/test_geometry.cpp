#include "doctest.h"

#include "gck/geometry.hpp"
#include "gck/tensor.hpp"
#include "support/random_fields.hpp"

#include <cmath>
#include <random>

using namespace gck;

namespace {

SampleSet default_samples(int n = 30, std::uint64_t seed = 5) {
  return SampleSet::generate(Box{}, n, seed);
}

// Sampling box keeping x1 away from zero for 1/x1 closed forms.
SampleSet polar_samples(int n = 30, std::uint64_t seed = 5) {
  Box box;
  box.lo = {-1.0, 0.2, -1.0, -1.0};
  box.hi = {1.0, 1.2, 1.0, 1.0};
  return SampleSet::generate(box, n, seed);
}

ExprMatrix4 diag_metric(const Expr& a, const Expr& b, const Expr& c, const Expr& d) {
  ExprMatrix4 g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = Expr(0.0);
  g(0, 0) = a;
  g(1, 1) = b;
  g(2, 2) = c;
  g(3, 3) = d;
  return g;
}

double max_cube_abs(const TorsionTensor& t, const SampleSet& pts) {
  std::vector<Expr> flat;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) flat.push_back(t(k, i, j));
  return max_abs_residual(flat, pts).max_abs;
}

double max_curv_abs(const CurvatureTensor& r, const SampleSet& pts) {
  std::vector<Expr> flat;
  const int n = r.dim();
  for (int p = 0; p < n; ++p)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) flat.push_back(r(p, k, i, j));
  return max_abs_residual(flat, pts).max_abs;
}

// nabla g for the pure tangent type (0,0|0,0|0,2).
double metricity_residual(const MetricField& metric, const FrameField& frame,
                          const StructureConstants& c, const GammaField& gamma) {
  TensorField gt(TensorType{0, 0, 0, 0, 0, 2}, 1);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) gt.at({i, j}) = metric.g(i, j);
  ConnectionTriple conn = ConnectionTriple::zero(1, gamma);
  TensorField ng = covariant_differential(gt, conn, frame);
  std::vector<Expr> flat;
  for (std::size_t n = 0; n < ng.component_count(); ++n) flat.push_back(ng.flat(n));
  return max_abs_residual(flat, frame.samples).max_abs;
}

}  // namespace

TEST_CASE("lie derivative examples") {
  SampleSet pts = default_samples();
  FrameField coord = FrameField::coordinate(pts);

  Expr f = parse_expr("x2^3");
  Expr lf = lie_derivative(f, coord, 2);
  Expr expected = parse_expr("3*x2^2");
  for (const ChartPoint& p : pts.points())
    CHECK(std::abs(lf.eval(p) - expected.eval(p)) < 1e-13);

  // frame vector 1 scaled by x1: L_1(x1^2) = x1 * 2*x1 = 2*x1^2
  ExprMatrix4 u = coord.coeff;
  u(1, 1) = parse_expr("x1");
  FrameField scaled = FrameField::from_components(u, polar_samples());
  Expr lg = lie_derivative(parse_expr("x1^2"), scaled, 1);
  Expr oracle = parse_expr("2*x1^2");
  for (const ChartPoint& p : scaled.samples.points())
    CHECK(std::abs(lg.eval(p) - oracle.eval(p)) < 1e-13);

  CHECK(lie_derivative(Expr(4.25), coord, 0).is_zero());
}

TEST_CASE("structure constants: coordinate frame commutes") {
  FrameField coord = FrameField::coordinate(default_samples());
  StructureConstants c = structure_constants(coord);
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(c(k, i, j).is_zero());
}

TEST_CASE("structure constants: direct commutator oracle") {
  // frame_1 = d/dx1, frame_2 = x1 d/dx1 + d/dx2  =>  [frame_1, frame_2] = frame_1
  SampleSet pts = default_samples();
  ExprMatrix4 u = FrameField::coordinate(pts).coeff;
  u(1, 2) = parse_expr("x1");
  FrameField frame = FrameField::from_components(u, pts);
  StructureConstants c = structure_constants(frame);
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        double expected = 0.0;
        if (k == 1 && i == 1 && j == 2) expected = 1.0;
        if (k == 1 && i == 2 && j == 1) expected = -1.0;
        ResidualStat s = max_abs_residual(c(k, i, j) - Expr(expected), pts);
        CHECK(s.max_abs < 1e-12);
      }
    }
  }
}

TEST_CASE("structure constants are antisymmetric and real for random frames") {
  std::mt19937_64 rng(2024);
  SampleSet pts = SampleSet::generate(Box{}, 50, 17);
  for (int trial = 0; trial < 3; ++trial) {
    FrameField frame = testing::random_frame(rng, pts);
    StructureConstants c = structure_constants(frame);
    std::vector<Expr> antisym;
    std::vector<Expr> im;
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          antisym.push_back(c(k, i, j) + c(k, j, i));
          im.push_back(imag(c(k, i, j)));
        }
    CHECK(max_abs_residual(antisym, pts).max_abs < 1e-10);
    CHECK(max_abs_residual(im, pts).max_abs < 1e-12);
  }
}

TEST_CASE("degenerate frame raises") {
  SampleSet pts = default_samples();  // box straddles x1 = 0
  ExprMatrix4 u = FrameField::coordinate(pts).coeff;
  u(1, 1) = parse_expr("x1");
  CHECK_THROWS_AS(FrameField::from_components(u, pts), GeometryError);
}

TEST_CASE("christoffel: flat metric in a coordinate frame vanishes") {
  FrameField coord = FrameField::coordinate(default_samples());
  StructureConstants c = structure_constants(coord);
  MetricField flat = MetricField::minkowski();
  GammaField gamma = christoffel(flat, coord, c);
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(gamma(k, i, j).is_zero());
}

TEST_CASE("christoffel: polar-type closed form") {
  SampleSet pts = polar_samples(100, 3);
  FrameField coord = FrameField::coordinate(pts);
  StructureConstants c = structure_constants(coord);
  MetricField metric = MetricField::from_components(
      diag_metric(Expr(1.0), Expr(-1.0), -pow(parse_expr("x1"), 2), Expr(-1.0)), pts);
  GammaField gamma = christoffel(metric, coord, c);

  Expr one_over_x1 = parse_expr("1/x1");
  CHECK(max_abs_residual(gamma(2, 1, 2) - one_over_x1, pts).max_abs < 1e-12);
  CHECK(max_abs_residual(gamma(2, 2, 1) - one_over_x1, pts).max_abs < 1e-12);
  CHECK(max_abs_residual(gamma(1, 2, 2) - parse_expr("-x1"), pts).max_abs < 1e-12);
  // everything else vanishes
  std::vector<Expr> rest;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        bool named = (k == 2 && i == 1 && j == 2) || (k == 2 && i == 2 && j == 1) ||
                     (k == 1 && i == 2 && j == 2);
        if (!named) rest.push_back(gamma(k, i, j));
      }
  CHECK(max_abs_residual(rest, pts).max_abs < 1e-12);
}

TEST_CASE("christoffel: flat metric in a scaled frame stays flat") {
  // frame vector 2 scaled by x1; the frame-relative flat metric picks up
  // x1 dependence and nonzero anholonomy, yet nabla g and T vanish.
  SampleSet pts = polar_samples(100, 11);
  ExprMatrix4 u = FrameField::coordinate(pts).coeff;
  u(2, 2) = parse_expr("x1");
  FrameField frame = FrameField::from_components(u, pts);
  StructureConstants c = structure_constants(frame);
  MetricField metric = MetricField::from_components(
      diag_metric(Expr(1.0), Expr(-1.0), -pow(parse_expr("x1"), 2), Expr(-1.0)), pts);
  GammaField gamma = christoffel(metric, frame, c);

  CHECK(metricity_residual(metric, frame, c, gamma) < 1e-9);
  CHECK(max_cube_abs(torsion(gamma, c), pts) < 1e-9);

  CurvatureTensor r = tangent_curvature(gamma, frame, c);
  CHECK(max_curv_abs(r, pts) < 1e-9);
}

TEST_CASE("torsion: direct formula cases") {
  SampleSet pts = default_samples();
  FrameField coord = FrameField::coordinate(pts);
  StructureConstants c0 = structure_constants(coord);

  GammaField gamma;
  gamma.at(0, 0, 1) = Expr(1.0);
  TorsionTensor t = torsion(gamma, c0);
  CHECK(t(0, 0, 1).constant_value() == Complex{1.0, 0.0});
  CHECK(t(0, 1, 0).constant_value() == Complex{-1.0, 0.0});

  // zero Gamma with c(1,1,2) = 1 gives T(1,1,2) = -1
  StructureConstants c1 = c0;
  c1.cube[1](1, 2) = Expr(1.0);
  c1.cube[1](2, 1) = Expr(-1.0);
  GammaField zero;
  TorsionTensor t1 = torsion(zero, c1);
  CHECK(t1(1, 1, 2).constant_value() == Complex{-1.0, 0.0});
}

TEST_CASE("torsion of the metric connection vanishes") {
  std::mt19937_64 rng(77);
  SampleSet pts = SampleSet::generate(Box{}, 40, 23);
  FrameField frame = testing::random_frame(rng, pts);
  StructureConstants c = structure_constants(frame);
  MetricField metric = testing::random_metric(rng, pts);
  GammaField gamma = christoffel(metric, frame, c);
  CHECK(max_cube_abs(torsion(gamma, c), pts) < 1e-9);
}

TEST_CASE("metricity for random metric and frame") {
  std::mt19937_64 rng(3131);
  SampleSet pts = SampleSet::generate(Box{}, 40, 29);
  FrameField frame = testing::random_frame(rng, pts);
  StructureConstants c = structure_constants(frame);
  MetricField metric = testing::random_metric(rng, pts);
  GammaField gamma = christoffel(metric, frame, c);
  CHECK(metricity_residual(metric, frame, c, gamma) < 1e-9);
}

TEST_CASE("curvature: zero connection, sphere block, antisymmetry, reality") {
  SampleSet pts = polar_samples(60, 13);
  FrameField coord = FrameField::coordinate(pts);
  StructureConstants c = structure_constants(coord);

  GammaField zero;
  CHECK(max_curv_abs(tangent_curvature(zero, coord, c), pts) == 0.0);

  // metric block of the unit 2-sphere in (x1, x2)
  MetricField sphere = MetricField::from_components(
      diag_metric(Expr(1.0), Expr(-1.0), -pow(sin(parse_expr("x1")), 2), Expr(-1.0)), pts);
  GammaField gamma = christoffel(sphere, coord, c);
  CurvatureTensor r = tangent_curvature(gamma, coord, c);

  Expr oracle = pow(sin(parse_expr("x1")), 2);
  CHECK(max_abs_residual(r(1, 2, 1, 2) - oracle, pts).max_abs < 1e-11);

  std::vector<Expr> antisym;
  std::vector<Expr> im;
  for (int p = 0; p < 4; ++p)
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          antisym.push_back(r(p, k, i, j) + r(p, k, j, i));
          im.push_back(imag(r(p, k, i, j)));
        }
  CHECK(max_abs_residual(antisym, pts).max_abs < 1e-11);
  CHECK(max_abs_residual(im, pts).max_abs < 1e-12);
}

TEST_CASE("polar-type metric is flat") {
  SampleSet pts = polar_samples(100, 19);
  FrameField coord = FrameField::coordinate(pts);
  StructureConstants c = structure_constants(coord);
  MetricField metric = MetricField::from_components(
      diag_metric(Expr(1.0), Expr(-1.0), -pow(parse_expr("x1"), 2), Expr(-1.0)), pts);
  GammaField gamma = christoffel(metric, coord, c);
  CHECK(max_curv_abs(tangent_curvature(gamma, coord, c), pts) < 1e-12);
}

TEST_CASE("singular metric raises") {
  std::vector<ChartPoint> raw = default_samples().points();
  raw.push_back(ChartPoint(0.1, 1e-6, 0.2, 0.3));  // right next to the x1 = 0 locus
  SampleSet pts{std::move(raw)};
  ExprMatrix4 g = diag_metric(Expr(1.0), Expr(-1.0), -pow(parse_expr("x1"), 2), Expr(-1.0));
  CHECK_THROWS_AS(MetricField::from_components(g, pts), GeometryError);
}
