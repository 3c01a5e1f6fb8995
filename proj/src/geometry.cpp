#include "gck/geometry.hpp"

#include <Eigen/Eigenvalues>

#include <cstdio>

namespace gck {
namespace {

std::string point_str(const ChartPoint& p) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "(%.6g, %.6g, %.6g, %.6g)", p[0], p[1], p[2], p[3]);
  return buf;
}

constexpr double kDegenerate = 1e-9;

// A determinant with opposite real signs at two sample points of the
// (connected) box vanishes somewhere between them.
void check_determinant(const ExprMatrix4& m, const SampleSet& samples, const char* what) {
  bool seen_pos = false;
  bool seen_neg = false;
  for (const ChartPoint& p : samples.points()) {
    Complex det = eval_matrix4(m, p).determinant();
    if (std::abs(det) <= kDegenerate)
      throw GeometryError(std::string(what) + " at sample point " + point_str(p));
    if (std::abs(det.imag()) < 1e-9 * std::abs(det)) {
      (det.real() > 0.0 ? seen_pos : seen_neg) = true;
      if (seen_pos && seen_neg)
        throw GeometryError(std::string(what) +
                            ": determinant changes sign across the sample box");
    }
  }
}

}  // namespace

FrameField FrameField::coordinate(SampleSet samples) {
  ExprMatrix4 id;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) id(j, i) = Expr(j == i ? 1.0 : 0.0);
  return FrameField{id, std::move(samples)};
}

FrameField FrameField::from_components(const ExprMatrix4& coeff, SampleSet samples) {
  FrameField frame{coeff, std::move(samples)};
  check_determinant(coeff, frame.samples, "degenerate frame");
  return frame;
}

bool FrameField::is_coordinate_frame() const {
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) {
      const Expr& e = coeff(j, i);
      if (!e.is_constant()) return false;
      if (e.constant_value() != Complex{j == i ? 1.0 : 0.0, 0.0}) return false;
    }
  return true;
}

Expr lie_derivative(const Expr& f, const FrameField& frame, int direction) {
  Expr out;
  for (int s = 0; s < 4; ++s) out = out + frame.coeff(s, direction) * f.derivative(s);
  return out;
}

ExprMatrix lie_derivative(const ExprMatrix& m, const FrameField& frame, int direction) {
  ExprMatrix out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = lie_derivative(m(i, j), frame, direction);
  return out;
}

ExprMatrix4 lie_derivative(const ExprMatrix4& m, const FrameField& frame, int direction) {
  ExprMatrix4 out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out(i, j) = lie_derivative(m(i, j), frame, direction);
  return out;
}

StructureConstants structure_constants(const FrameField& frame) {
  check_determinant(frame.coeff, frame.samples, "degenerate frame");
  ExprMatrix inv = adjugate_inverse(to_dynamic(frame.coeff));
  StructureConstants c;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      // commutator [frame_i, frame_j] in coordinate components
      std::array<Expr, 4> comm;
      for (int s = 0; s < 4; ++s) {
        Expr v;
        for (int r = 0; r < 4; ++r)
          v = v + frame.coeff(r, i) * frame.coeff(s, j).derivative(r) -
              frame.coeff(r, j) * frame.coeff(s, i).derivative(r);
        comm[s] = v;
      }
      for (int k = 0; k < 4; ++k) {
        Expr v;
        for (int s = 0; s < 4; ++s) v = v + inv(k, s) * comm[s];
        c.cube[k](i, j) = v;
      }
    }
  }
  return c;
}

MetricField MetricField::minkowski() {
  ExprMatrix4 g;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = Expr(0.0);
  g(0, 0) = Expr(1.0);
  g(1, 1) = Expr(-1.0);
  g(2, 2) = Expr(-1.0);
  g(3, 3) = Expr(-1.0);
  MetricField m;
  m.g = g;
  m.g_inv = g;  // its own inverse
  return m;
}

MetricField MetricField::from_components(const ExprMatrix4& g, const SampleSet& samples) {
  check_determinant(g, samples, "singular metric");
  MetricField out;
  out.g = g;
  out.g_inv = to_fixed4(adjugate_inverse(to_dynamic(g)));
  return out;
}

GammaField::GammaField() {
  for (auto& m : by_direction)
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j) m(k, j) = Expr(0.0);
}

GammaField christoffel(const MetricField& metric, const FrameField& frame,
                       const StructureConstants& c) {
  const ExprMatrix4& g = metric.g;
  const ExprMatrix4& gi = metric.g_inv;
  std::array<ExprMatrix4, 4> dg;  // dg[i] = L_i(g)
  for (int i = 0; i < 4; ++i) dg[i] = lie_derivative(g, frame, i);

  const Expr half(0.5);
  GammaField gamma;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      for (int k = 0; k < 4; ++k) {
        Expr v;
        for (int r = 0; r < 4; ++r)
          v = v + gi(k, r) * half * (dg[i](j, r) + dg[j](r, i) - dg[r](i, j));
        // Anholonomy corrections fixed by torsion-freeness against the
        // frame commutators and by metric compatibility.
        v = v + half * c(k, i, j);
        for (int r = 0; r < 4; ++r) {
          for (int s = 0; s < 4; ++s) {
            v = v - gi(k, r) * half * c(s, i, r) * g(s, j);
            v = v - gi(k, r) * half * c(s, j, r) * g(s, i);
          }
        }
        gamma.at(k, i, j) = v;
      }
    }
  }
  return gamma;
}

TorsionTensor torsion(const GammaField& gamma, const StructureConstants& c) {
  TorsionTensor t;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        t.cube[k](i, j) = gamma(k, i, j) - gamma(k, j, i) - c(k, i, j);
  return t;
}

CurvatureTensor curvature_two_form(const std::array<ExprMatrix, 4>& conn,
                                   const FrameField& frame, const StructureConstants& c) {
  const int n = static_cast<int>(conn[0].rows());
  CurvatureTensor out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.f[i][j] = ExprMatrix::Constant(n, n, Expr(0.0));
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      ExprMatrix fij = lie_derivative(conn[j], frame, i) - lie_derivative(conn[i], frame, j) +
                       conn[i] * conn[j] - conn[j] * conn[i];
      for (int h = 0; h < 4; ++h) fij = fij - c(h, i, j) * conn[h];
      out.f[i][j] = fij;
      out.f[j][i] = -fij;
    }
  }
  return out;
}

CurvatureTensor tangent_curvature(const GammaField& gamma, const FrameField& frame,
                                  const StructureConstants& c) {
  std::array<ExprMatrix, 4> conn;
  for (int i = 0; i < 4; ++i) conn[i] = to_dynamic(gamma.by_direction[i]);
  return curvature_two_form(conn, frame, c);
}

}  // namespace gck
