#include "gck/matrix.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gck {
namespace {

Expr minor_det(const ExprMatrix& m, int skip_row, int skip_col) {
  const int n = static_cast<int>(m.rows());
  ExprMatrix sub(n - 1, n - 1);
  int r = 0;
  for (int i = 0; i < n; ++i) {
    if (i == skip_row) continue;
    int c = 0;
    for (int j = 0; j < n; ++j) {
      if (j == skip_col) continue;
      sub(r, c++) = m(i, j);
    }
    ++r;
  }
  return determinant(sub);
}

}  // namespace

Expr determinant(const ExprMatrix& m) {
  const int n = static_cast<int>(m.rows());
  if (n != m.cols() || n < 1 || n > 4) throw std::invalid_argument("determinant: size 1..4 only");
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  Expr det;
  for (int j = 0; j < n; ++j) {
    Expr term = m(0, j) * minor_det(m, 0, j);
    det = (j % 2 == 0) ? det + term : det - term;
  }
  return det;
}

ExprMatrix adjugate_inverse(const ExprMatrix& m) {
  const int n = static_cast<int>(m.rows());
  if (n != m.cols() || n < 1 || n > 4) throw std::invalid_argument("inverse: size 1..4 only");
  Expr det = determinant(m);
  ExprMatrix inv(n, n);
  if (n == 1) {
    inv(0, 0) = Expr(1.0) / det;
    return inv;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Expr cof = minor_det(m, j, i);  // transposed cofactor
      if ((i + j) % 2 != 0) cof = -cof;
      inv(i, j) = cof / det;
    }
  }
  return inv;
}

ExprMatrix conj_transpose(const ExprMatrix& m) {
  ExprMatrix out(m.cols(), m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(j, i) = conj(m(i, j));
  return out;
}

ExprMatrix conj_entries(const ExprMatrix& m) {
  ExprMatrix out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = conj(m(i, j));
  return out;
}

ExprMatrix to_dynamic(const ExprMatrix4& m) {
  ExprMatrix out(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out(i, j) = m(i, j);
  return out;
}

ExprMatrix4 to_fixed4(const ExprMatrix& m) {
  if (m.rows() != 4 || m.cols() != 4) throw std::invalid_argument("expected a 4x4 matrix");
  ExprMatrix4 out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out(i, j) = m(i, j);
  return out;
}

Eigen::MatrixXcd eval_matrix(const ExprMatrix& m, const ChartPoint& p) {
  std::vector<Expr> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  Tape tape(flat);
  std::vector<Complex> vals = tape.eval(p);
  Eigen::MatrixXcd out(m.rows(), m.cols());
  std::size_t k = 0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = vals[k++];
  return out;
}

Eigen::Matrix4cd eval_matrix4(const ExprMatrix4& m, const ChartPoint& p) {
  return eval_matrix(to_dynamic(m), p);
}

double min_abs_determinant(const ExprMatrix& m, const SampleSet& samples) {
  Expr det = determinant(m);
  double best = std::numeric_limits<double>::infinity();
  Tape tape(std::span<const Expr>(&det, 1));
  std::vector<Complex> val(1);
  for (const ChartPoint& p : samples.points()) {
    tape.eval_into(p, val);
    best = std::min(best, std::abs(val[0]));
  }
  return best;
}

double min_abs_determinant4(const ExprMatrix4& m, const SampleSet& samples) {
  return min_abs_determinant(to_dynamic(m), samples);
}

}  // namespace gck
