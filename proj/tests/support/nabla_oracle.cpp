#include "support/nabla_oracle.hpp"

#include <vector>

namespace gck::testing {

Complex nabla_component_oracle(const TensorField& x, const ConnectionTriple& conn,
                               const FrameField& frame, std::span<const int> out_idx,
                               const ChartPoint& p) {
  const TensorType& t = x.type();
  const int slots = t.rank();
  const int k = out_idx[static_cast<std::size_t>(slots)];
  std::vector<int> idx(out_idx.begin(), out_idx.begin() + slots);

  // Lie term: sum_s U(s,k) d/dx^s of the component.
  Complex acc{};
  for (int s = 0; s < 4; ++s)
    acc += frame.coeff(s, k).eval(p) * x.at(idx).derivative(s).eval(p);

  // Connection matrices as numbers at p. The tangent family packs
  // Gamma with the differentiation direction fixed to k:
  // gamma_num(h, w) = Gamma(h, k, w).
  const int q = x.q();
  Eigen::MatrixXcd a_num(q, q), abar_num(q, q), gamma_num(4, 4);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) {
      a_num(i, j) = conn.a[k](i, j).eval(p);
      abar_num(i, j) = conn.a_bar[k](i, j).eval(p);
    }
  for (int h = 0; h < 4; ++h)
    for (int w = 0; w < 4; ++w) gamma_num(h, w) = conn.gamma(h, k, w).eval(p);

  struct Group {
    int offset;
    int count;
    int dim;
    double sign;
    const Eigen::MatrixXcd* mat;
    bool upper;  // upper slots contract the matrix row, lower slots the column
  };
  const int off_bu = 0;
  const int off_bd = off_bu + t.bundle_up;
  const int off_cu = off_bd + t.bundle_dn;
  const int off_cd = off_cu + t.conj_up;
  const int off_tu = off_cd + t.conj_dn;
  const int off_td = off_tu + t.tan_up;
  const Group groups[6] = {
      {off_bu, t.bundle_up, q, +1.0, &a_num, true},
      {off_bd, t.bundle_dn, q, -1.0, &a_num, false},
      {off_cu, t.conj_up, q, +1.0, &abar_num, true},
      {off_cd, t.conj_dn, q, -1.0, &abar_num, false},
      {off_tu, t.tan_up, 4, +1.0, &gamma_num, true},
      {off_td, t.tan_dn, 4, -1.0, &gamma_num, false},
  };

  std::vector<int> probe = idx;
  for (const Group& g : groups) {
    for (int s = 0; s < g.count; ++s) {
      const int slot = g.offset + s;
      const int fixed = idx[static_cast<std::size_t>(slot)];
      for (int w = 0; w < g.dim; ++w) {
        probe[static_cast<std::size_t>(slot)] = w;
        Complex coeff = g.upper ? (*g.mat)(fixed, w) : (*g.mat)(w, fixed);
        acc += g.sign * coeff * x.at(probe).eval(p);
      }
      probe[static_cast<std::size_t>(slot)] = fixed;
    }
  }
  return acc;
}

}  // namespace gck::testing
