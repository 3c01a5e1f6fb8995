#pragma once

#include "gck/expr.hpp"
#include "gck/sample.hpp"

#include <Eigen/Dense>

namespace Eigen {

template <>
struct NumTraits<gck::Expr> {
  using Real = gck::Expr;
  using NonInteger = gck::Expr;
  using Nested = gck::Expr;
  using Literal = gck::Expr;
  // IsComplex stays off: with Real == T the complex-aware
  // ScalarBinaryOpTraits specializations become ambiguous. Conjugation
  // of Expr matrices goes through conj_entries/conj_transpose below,
  // never through Eigen's conjugate()/adjoint().
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 4,
    MulCost = 8,
  };
  static inline Real epsilon() { return gck::Expr(0.0); }
  static inline Real dummy_precision() { return gck::Expr(0.0); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen

namespace gck {

using ExprMatrix = Eigen::Matrix<Expr, Eigen::Dynamic, Eigen::Dynamic>;
using ExprVector = Eigen::Matrix<Expr, Eigen::Dynamic, 1>;
using ExprMatrix4 = Eigen::Matrix<Expr, 4, 4>;

// Symbolic determinant by cofactor expansion; sizes 1..4 only.
Expr determinant(const ExprMatrix& m);

// Symbolic inverse adj(m)/det(m); sizes 1..4. Degeneracy is a sampling
// question, not a structural one, so no pivoting happens here.
ExprMatrix adjugate_inverse(const ExprMatrix& m);

ExprMatrix conj_transpose(const ExprMatrix& m);
ExprMatrix conj_entries(const ExprMatrix& m);

ExprMatrix to_dynamic(const ExprMatrix4& m);
ExprMatrix4 to_fixed4(const ExprMatrix& m);

// Numeric snapshots at a chart point.
Eigen::MatrixXcd eval_matrix(const ExprMatrix& m, const ChartPoint& p);
Eigen::Matrix4cd eval_matrix4(const ExprMatrix4& m, const ChartPoint& p);

// Smallest |det| over the sample set.
double min_abs_determinant(const ExprMatrix& m, const SampleSet& samples);
double min_abs_determinant4(const ExprMatrix4& m, const SampleSet& samples);

}  // namespace gck
