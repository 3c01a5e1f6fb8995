#include "doctest.h"

#include "gck/tensor.hpp"
#include "support/nabla_oracle.hpp"
#include "support/random_fields.hpp"

#include <random>

using namespace gck;

namespace {

SampleSet small_samples(int n = 20, std::uint64_t seed = 31) {
  return SampleSet::generate(Box{}, n, seed);
}

TensorField random_tensor(TensorType t, int q, std::mt19937_64& rng) {
  TensorField x(t, q);
  for (std::size_t n = 0; n < x.component_count(); ++n)
    x.flat(n) = testing::random_complex_expr(rng, 1.0);
  return x;
}

// Test-layer tensor product: concatenates each slot group in order.
TensorField tensor_product(const TensorField& x, const TensorField& y) {
  const TensorType &a = x.type(), &b = y.type();
  TensorType t{a.bundle_up + b.bundle_up, a.bundle_dn + b.bundle_dn, a.conj_up + b.conj_up,
               a.conj_dn + b.conj_dn, a.tan_up + b.tan_up, a.tan_dn + b.tan_dn};
  TensorField out(t, x.q());
  std::vector<int> oidx(static_cast<std::size_t>(t.rank()));
  std::vector<int> xi(static_cast<std::size_t>(a.rank()));
  std::vector<int> yi(static_cast<std::size_t>(b.rank()));
  const int agroups[6] = {a.bundle_up, a.bundle_dn, a.conj_up, a.conj_dn, a.tan_up, a.tan_dn};
  const int bgroups[6] = {b.bundle_up, b.bundle_dn, b.conj_up, b.conj_dn, b.tan_up, b.tan_dn};
  for (std::size_t n = 0; n < out.component_count(); ++n) {
    out.decode(n, oidx);
    int o = 0, xa = 0, yb = 0;
    for (int g = 0; g < 6; ++g) {
      for (int s = 0; s < agroups[g]; ++s) xi[static_cast<std::size_t>(xa++)] = oidx[o++];
      for (int s = 0; s < bgroups[g]; ++s) yi[static_cast<std::size_t>(yb++)] = oidx[o++];
    }
    out.flat(n) = x.at(xi) * y.at(yi);
  }
  return out;
}

}  // namespace

TEST_CASE("tensor field shape and indexing") {
  TensorField x(TensorType{1, 1, 1, 1, 1, 1}, 2);
  CHECK(x.component_count() == 2u * 2u * 2u * 2u * 4u * 4u);
  x.at({1, 0, 1, 0, 3, 2}) = Expr(7.0);
  CHECK(x.at({1, 0, 1, 0, 3, 2}).constant_value() == Complex{7.0, 0.0});
  std::vector<int> idx(6);
  x.decode(x.offset(std::array{1, 0, 1, 0, 3, 2}), idx);
  CHECK(idx == std::vector<int>{1, 0, 1, 0, 3, 2});
  CHECK_THROWS_AS(TensorField(TensorType{3, 3, 3, 0, 0, 0}, 3), TensorError);
  CHECK_THROWS_AS(x.at({2, 0, 0, 0, 0, 0}), TensorError);
}

TEST_CASE("tau: real tensor fixed point and conjugation") {
  SampleSet pts = small_samples();
  TensorField x(TensorType{0, 0, 0, 0, 1, 1}, 1);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) x.at({i, j}) = Expr(0.5 * (i + 1) * (j + 2));
  TensorField tx = tau_conjugate(x);
  CHECK(tx.type() == x.type());
  for (std::size_t n = 0; n < x.component_count(); ++n)
    CHECK(max_abs_residual(tx.flat(n) - x.flat(n), pts).max_abs == 0.0);

  TensorField psi(TensorType{1, 0, 0, 0, 0, 0}, 1);
  psi.at({0}) = Expr::i();
  TensorField tpsi = tau_conjugate(psi);
  CHECK(tpsi.type() == TensorType{0, 0, 1, 0, 0, 0});
  CHECK(tpsi.at({0}).constant_value() == Complex{0.0, -1.0});
}

TEST_CASE("tau is an involution on random tensors") {
  std::mt19937_64 rng(404);
  SampleSet pts = small_samples();
  for (int q = 1; q <= 3; ++q) {
    TensorField x = random_tensor(TensorType{1, 0, 0, 1, 1, 0}, q, rng);
    TensorField back = tau_conjugate(tau_conjugate(x));
    REQUIRE(back.type() == x.type());
    std::vector<Expr> res;
    for (std::size_t n = 0; n < x.component_count(); ++n)
      res.push_back(back.flat(n) - x.flat(n));
    CHECK(max_abs_residual(res, pts).max_abs < 1e-15);
  }
}

TEST_CASE("covariant differential of a scalar is the lie derivative") {
  std::mt19937_64 rng(11);
  SampleSet pts = small_samples();
  FrameField frame = testing::random_frame(rng, pts);
  ConnectionTriple conn = ConnectionTriple::zero(2);
  TensorField f(TensorType{}, 2);
  f.flat(0) = parse_expr("sin(x0)*x2 + x1^3");
  TensorField df = covariant_differential(f, conn, frame);
  CHECK(df.type() == TensorType{0, 0, 0, 0, 0, 1});
  for (int k = 0; k < 4; ++k) {
    Expr expected = lie_derivative(f.flat(0), frame, k);
    CHECK(max_abs_residual(df.at({k}) - expected, pts).max_abs == 0.0);
  }
}

TEST_CASE("covariant differential of a section with zero connection") {
  SampleSet pts = small_samples();
  FrameField coord = FrameField::coordinate(pts);
  ConnectionTriple conn = ConnectionTriple::zero(1);
  TensorField psi(TensorType{1, 0, 0, 0, 0, 0}, 1);
  psi.at({0}) = parse_expr("exp(i*x0)*x3");
  TensorField dpsi = covariant_differential(psi, conn, coord);
  for (int k = 0; k < 4; ++k) {
    Expr expected = psi.at({0}).derivative(k);
    CHECK(max_abs_residual(dpsi.at({0, k}) - expected, pts).max_abs < 1e-15);
  }
}

TEST_CASE("covariant differential matches the independent assembly") {
  std::mt19937_64 rng(2718);
  SampleSet pts = small_samples(20, 41);
  FrameField frame = testing::random_frame(rng, pts);
  StructureConstants c = structure_constants(frame);
  MetricField metric = testing::random_metric(rng, pts);
  GammaField gamma = christoffel(metric, frame, c);

  ConnectionTriple conn =
      ConnectionTriple::real_connection(2, gamma, testing::random_complex_connection(rng, 2, 0.4));

  TensorField x = random_tensor(TensorType{1, 1, 1, 1, 1, 1}, 2, rng);
  TensorField dx = covariant_differential(x, conn, frame);

  std::vector<int> oidx(7);
  std::mt19937_64 pick(5);
  std::uniform_int_distribution<std::size_t> comp(0, dx.component_count() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = comp(pick);
    dx.decode(n, oidx);
    for (const ChartPoint& p : pts.points()) {
      Complex engine = dx.flat(n).eval(p);
      Complex oracle = testing::nabla_component_oracle(x, conn, frame, oidx, p);
      double scale = std::max(1.0, std::abs(engine));
      CHECK(std::abs(engine - oracle) / scale < 1e-12);
    }
  }
}

TEST_CASE("covariant differential rank mismatch raises") {
  SampleSet pts = small_samples();
  FrameField coord = FrameField::coordinate(pts);
  ConnectionTriple conn = ConnectionTriple::zero(2);
  TensorField x(TensorType{1, 0, 0, 0, 0, 0}, 3);
  CHECK_THROWS_AS(covariant_differential(x, conn, coord), TensorError);
}

TEST_CASE("leibniz rule over tensor products") {
  std::mt19937_64 rng(909);
  SampleSet pts = small_samples(12, 47);
  FrameField frame = testing::random_frame(rng, pts);
  StructureConstants c = structure_constants(frame);
  MetricField metric = testing::random_metric(rng, pts);
  GammaField gamma = christoffel(metric, frame, c);
  ConnectionTriple conn =
      ConnectionTriple::real_connection(2, gamma, testing::random_complex_connection(rng, 2, 0.4));

  TensorField x = random_tensor(TensorType{1, 0, 0, 0, 0, 1}, 2, rng);
  TensorField y = random_tensor(TensorType{0, 1, 0, 0, 1, 0}, 2, rng);

  TensorField lhs = covariant_differential(tensor_product(x, y), conn, frame);
  TensorField dx = covariant_differential(x, conn, frame);
  TensorField dy = covariant_differential(y, conn, frame);

  // Slot bookkeeping: lhs index order is the product's with k appended;
  // dx appends k to x's tangent lowers, so dx (x) y needs k moved past
  // y's groups. Compare component-wise through explicit indices.
  const TensorType& xt = x.type();
  const TensorType& yt = y.type();
  std::vector<int> lidx(static_cast<std::size_t>(lhs.type().rank()));
  std::vector<int> xidx(static_cast<std::size_t>(xt.rank()) + 1);
  std::vector<int> yidx(static_cast<std::size_t>(yt.rank()) + 1);
  std::vector<int> xonly(static_cast<std::size_t>(xt.rank()));
  std::vector<int> yonly(static_cast<std::size_t>(yt.rank()));
  std::vector<Expr> residuals;
  // product slot order: [x.bu][y.bu][x.bd][y.bd][x.cu][y.cu][x.cd][y.cd]
  //                     [x.tu][y.tu][x.td][y.td][k]
  const int xg[6] = {xt.bundle_up, xt.bundle_dn, xt.conj_up, xt.conj_dn, xt.tan_up, xt.tan_dn};
  const int yg[6] = {yt.bundle_up, yt.bundle_dn, yt.conj_up, yt.conj_dn, yt.tan_up, yt.tan_dn};
  for (std::size_t n = 0; n < lhs.component_count(); ++n) {
    lhs.decode(n, lidx);
    int o = 0, xa = 0, yb = 0;
    for (int g = 0; g < 6; ++g) {
      for (int s = 0; s < xg[g]; ++s) xonly[static_cast<std::size_t>(xa++)] = lidx[o++];
      for (int s = 0; s < yg[g]; ++s) yonly[static_cast<std::size_t>(yb++)] = lidx[o++];
    }
    const int k = lidx[static_cast<std::size_t>(o)];
    std::copy(xonly.begin(), xonly.end(), xidx.begin());
    xidx.back() = k;
    std::copy(yonly.begin(), yonly.end(), yidx.begin());
    yidx.back() = k;
    Expr rhs = dx.at(xidx) * y.at(yonly) + x.at(xonly) * dy.at(yidx);
    residuals.push_back(lhs.flat(n) - rhs);
  }
  CHECK(max_abs_residual(residuals, pts).max_abs < 1e-11);
}

TEST_CASE("covariant differential commutes with tau for real triples") {
  std::mt19937_64 rng(6060);
  SampleSet pts = small_samples(15, 53);
  FrameField frame = testing::random_frame(rng, pts);
  StructureConstants c = structure_constants(frame);
  MetricField metric = testing::random_metric(rng, pts);
  GammaField gamma = christoffel(metric, frame, c);
  for (int q = 1; q <= 3; ++q) {
    ConnectionTriple conn = ConnectionTriple::real_connection(
        q, gamma, testing::random_complex_connection(rng, q, 0.4));
    TensorField x = random_tensor(TensorType{1, 0, 0, 1, 0, 1}, q, rng);
    TensorField lhs = tau_conjugate(covariant_differential(x, conn, frame));
    TensorField rhs = covariant_differential(tau_conjugate(x), conn, frame);
    REQUIRE(lhs.type() == rhs.type());
    std::vector<Expr> res;
    for (std::size_t n = 0; n < lhs.component_count(); ++n)
      res.push_back(lhs.flat(n) - rhs.flat(n));
    CHECK(max_abs_residual(res, pts).max_abs < 1e-12);
  }
}

TEST_CASE("reality check: constructed real triples have tiny residuals") {
  std::mt19937_64 rng(321);
  SampleSet pts = small_samples(15, 59);
  FrameField frame = testing::random_frame(rng, pts);
  StructureConstants c = structure_constants(frame);
  MetricField metric = testing::random_metric(rng, pts);
  GammaField gamma = christoffel(metric, frame, c);
  ConnectionTriple conn =
      ConnectionTriple::real_connection(2, gamma, testing::random_complex_connection(rng, 2, 0.4));
  RealityReport rep = reality_check(conn, frame, c);
  CHECK(rep.a_bar_conjugate.stat.max_abs == 0.0);
  CHECK(rep.gamma_imag.stat.max_abs < 1e-12);
  CHECK(rep.tangent_curvature_imag.stat.max_abs < 1e-12);
  CHECK(rep.bundle_curvature_conjugate.stat.max_abs < 1e-10);
}

TEST_CASE("reality check flags an injected conjugation violation") {
  std::mt19937_64 rng(654);
  SampleSet pts = small_samples(15, 61);
  FrameField frame = FrameField::coordinate(pts);
  StructureConstants c = structure_constants(frame);
  ConnectionTriple conn =
      ConnectionTriple::real_connection(2, GammaField{}, testing::random_su_connection(rng, 2, 0.3));
  const double eps = 1e-3;
  conn.a_bar[1](0, 1) = conn.a_bar[1](0, 1) + Expr(eps);
  RealityReport rep = reality_check(conn, frame, c);
  CHECK(rep.a_bar_conjugate.stat.max_abs == doctest::Approx(eps).epsilon(1e-9));
}

TEST_CASE("random real su(2) triple satisfies the curvature conjugation law") {
  std::mt19937_64 rng(987);
  SampleSet pts = small_samples(20, 67);
  FrameField frame = testing::random_frame(rng, pts);
  StructureConstants c = structure_constants(frame);
  MetricField metric = testing::random_metric(rng, pts);
  GammaField gamma = christoffel(metric, frame, c);
  ConnectionTriple conn =
      ConnectionTriple::real_connection(2, gamma, testing::random_su_connection(rng, 2, 0.5));
  RealityReport rep = reality_check(conn, frame, c);
  CHECK(rep.bundle_curvature_conjugate.stat.max_abs < 1e-9);
}
