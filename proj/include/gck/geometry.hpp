#pragma once

#include "gck/matrix.hpp"
#include "gck/sample.hpp"

#include <array>

namespace gck {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tangent frame. coeff(j, i) is the coefficient of d/dx^j in frame
// vector number i, so the columns are the frame vectors.
struct FrameField {
  ExprMatrix4 coeff;
  SampleSet samples;

  static FrameField coordinate(SampleSet samples);
  static FrameField from_components(const ExprMatrix4& coeff, SampleSet samples);

  bool is_coordinate_frame() const;
};

// Directional derivative of a scalar along frame vector `direction`.
Expr lie_derivative(const Expr& f, const FrameField& frame, int direction);
ExprMatrix lie_derivative(const ExprMatrix& m, const FrameField& frame, int direction);
ExprMatrix4 lie_derivative(const ExprMatrix4& m, const FrameField& frame, int direction);

// c(k, i, j) with [frame_i, frame_j] = sum_k c(k,i,j) frame_k.
// Antisymmetric in (i, j); real-valued for real frames.
struct StructureConstants {
  std::array<ExprMatrix4, 4> cube;  // cube[k](i, j)

  const Expr& operator()(int k, int i, int j) const { return cube[k](i, j); }
};

StructureConstants structure_constants(const FrameField& frame);

// Frame-relative space-time metric with signature (+,-,-,-) and its
// symbolic inverse.
struct MetricField {
  ExprMatrix4 g;
  ExprMatrix4 g_inv;

  static MetricField minkowski();
  static MetricField from_components(const ExprMatrix4& g, const SampleSet& samples);
};

// Tangent connection components. by_direction[i](k, j) holds the
// component with upper index k, differentiation direction i and second
// lower index j.
struct GammaField {
  std::array<ExprMatrix4, 4> by_direction;

  GammaField();
  const Expr& operator()(int k, int i, int j) const { return by_direction[i](k, j); }
  Expr& at(int k, int i, int j) { return by_direction[i](k, j); }
};

// The unique real torsion-free metric-compatible connection of (g, frame).
GammaField christoffel(const MetricField& metric, const FrameField& frame,
                       const StructureConstants& c);

// T(k, i, j) = Gamma(k,i,j) - Gamma(k,j,i) - c(k,i,j).
struct TorsionTensor {
  std::array<ExprMatrix4, 4> cube;  // cube[k](i, j)

  const Expr& operator()(int k, int i, int j) const { return cube[k](i, j); }
};

TorsionTensor torsion(const GammaField& gamma, const StructureConstants& c);

// Curvature two-form of a family of matrices M_k (one per frame
// direction): F_ij = L_i(M_j) - L_j(M_i) + M_i M_j - M_j M_i
// - sum_h c(h,i,j) M_h. Antisymmetric in (i, j).
struct CurvatureTensor {
  std::array<std::array<ExprMatrix, 4>, 4> f;  // f[i][j](p, k)

  const Expr& operator()(int p, int k, int i, int j) const { return f[i][j](p, k); }
  int dim() const { return static_cast<int>(f[0][0].rows()); }
};

CurvatureTensor curvature_two_form(const std::array<ExprMatrix, 4>& conn,
                                   const FrameField& frame, const StructureConstants& c);

// R(p, k, i, j) for the tangent connection.
CurvatureTensor tangent_curvature(const GammaField& gamma, const FrameField& frame,
                                  const StructureConstants& c);

}  // namespace gck
