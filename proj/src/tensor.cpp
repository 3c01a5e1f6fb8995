#include "gck/tensor.hpp"

#include <algorithm>

namespace gck {
namespace {

constexpr int kMaxRank = 8;

}  // namespace

TensorField::TensorField(TensorType type, int q) : type_(type), q_(q) {
  if (q < 1 || q > 3) throw TensorError("bundle rank must be 1, 2 or 3");
  if (type.bundle_up < 0 || type.bundle_dn < 0 || type.conj_up < 0 || type.conj_dn < 0 ||
      type.tan_up < 0 || type.tan_dn < 0)
    throw TensorError("negative valence");
  if (type.rank() > kMaxRank) throw TensorError("total rank exceeds 8");
  const int bundle_slots = type.bundle_up + type.bundle_dn + type.conj_up + type.conj_dn;
  for (int s = 0; s < bundle_slots; ++s) dims_.push_back(q);
  for (int s = 0; s < type.tan_up + type.tan_dn; ++s) dims_.push_back(4);
  std::size_t total = 1;
  strides_.assign(dims_.size(), 1);
  for (int s = static_cast<int>(dims_.size()) - 1; s >= 0; --s) {
    strides_[static_cast<std::size_t>(s)] = total;
    total *= static_cast<std::size_t>(dims_[static_cast<std::size_t>(s)]);
  }
  comps_.assign(total, Expr(0.0));
}

std::size_t TensorField::offset(std::span<const int> idx) const {
  if (idx.size() != dims_.size()) throw TensorError("index rank mismatch");
  std::size_t n = 0;
  for (std::size_t s = 0; s < idx.size(); ++s) {
    if (idx[s] < 0 || idx[s] >= dims_[s]) throw TensorError("index out of range");
    n += strides_[s] * static_cast<std::size_t>(idx[s]);
  }
  return n;
}

void TensorField::decode(std::size_t n, std::span<int> idx) const {
  for (std::size_t s = 0; s < dims_.size(); ++s) {
    idx[s] = static_cast<int>(n / strides_[s]);
    n %= strides_[s];
  }
}

ConnectionTriple ConnectionTriple::zero(int q, GammaField gamma) {
  ConnectionTriple t;
  t.q = q;
  t.gamma = std::move(gamma);
  for (int k = 0; k < 4; ++k) {
    t.a[k] = ExprMatrix::Constant(q, q, Expr(0.0));
    t.a_bar[k] = ExprMatrix::Constant(q, q, Expr(0.0));
  }
  return t;
}

ConnectionTriple ConnectionTriple::real_connection(int q, GammaField gamma,
                                                   std::array<ExprMatrix, 4> a) {
  ConnectionTriple t;
  t.q = q;
  t.gamma = std::move(gamma);
  for (int k = 0; k < 4; ++k) {
    if (a[k].rows() != q || a[k].cols() != q) throw TensorError("connection shape mismatch");
    t.a_bar[k] = conj_entries(a[k]);
  }
  t.a = std::move(a);
  return t;
}

TensorField tau_conjugate(const TensorField& x) {
  const TensorType& t = x.type();
  TensorType ot;
  ot.bundle_up = t.conj_up;
  ot.bundle_dn = t.conj_dn;
  ot.conj_up = t.bundle_up;
  ot.conj_dn = t.bundle_dn;
  ot.tan_up = t.tan_up;
  ot.tan_dn = t.tan_dn;
  TensorField out(ot, x.q());

  const int n_bu = t.bundle_up, n_bd = t.bundle_dn, n_cu = t.conj_up, n_cd = t.conj_dn;
  const int n_tan = t.tan_up + t.tan_dn;
  std::vector<int> oidx(static_cast<std::size_t>(ot.rank()));
  std::vector<int> xidx(static_cast<std::size_t>(t.rank()));
  for (std::size_t n = 0; n < out.component_count(); ++n) {
    out.decode(n, oidx);
    // out's bundle group is x's conjugate group and vice versa
    int o = 0;
    for (int s = 0; s < n_cu; ++s) xidx[static_cast<std::size_t>(n_bu + n_bd + s)] = oidx[o++];
    for (int s = 0; s < n_cd; ++s)
      xidx[static_cast<std::size_t>(n_bu + n_bd + n_cu + s)] = oidx[o++];
    for (int s = 0; s < n_bu; ++s) xidx[static_cast<std::size_t>(s)] = oidx[o++];
    for (int s = 0; s < n_bd; ++s) xidx[static_cast<std::size_t>(n_bu + s)] = oidx[o++];
    for (int s = 0; s < n_tan; ++s)
      xidx[static_cast<std::size_t>(n_bu + n_bd + n_cu + n_cd + s)] = oidx[o++];
    out.flat(n) = conj(x.at(xidx));
  }
  return out;
}

TensorField covariant_differential(const TensorField& x, const ConnectionTriple& conn,
                                   const FrameField& frame) {
  const TensorType& t = x.type();
  const bool has_bundle_slots = (t.bundle_up + t.bundle_dn + t.conj_up + t.conj_dn) > 0;
  if (has_bundle_slots && x.q() != conn.q)
    throw TensorError("bundle rank mismatch between tensor and connection");

  TensorType ot = t;
  ot.tan_dn += 1;
  TensorField out(ot, x.q());

  const int off_bu = 0;
  const int off_bd = off_bu + t.bundle_up;
  const int off_cu = off_bd + t.bundle_dn;
  const int off_cd = off_cu + t.conj_up;
  const int off_tu = off_cd + t.conj_dn;
  const int off_td = off_tu + t.tan_up;
  const int slots = t.rank();
  const int q = x.q();

  std::vector<int> idx(static_cast<std::size_t>(slots));
  std::vector<int> mod(static_cast<std::size_t>(slots));
  std::vector<int> oidx(static_cast<std::size_t>(slots) + 1);

  for (std::size_t n = 0; n < x.component_count(); ++n) {
    x.decode(n, idx);
    std::copy(idx.begin(), idx.end(), oidx.begin());
    for (int k = 0; k < 4; ++k) {
      Expr v = lie_derivative(x.flat(n), frame, k);
      std::copy(idx.begin(), idx.end(), mod.begin());
      for (int s = 0; s < t.bundle_up; ++s) {
        const int slot = off_bu + s;
        for (int w = 0; w < q; ++w) {
          mod[static_cast<std::size_t>(slot)] = w;
          v = v + conn.a[k](idx[static_cast<std::size_t>(slot)], w) * x.at(mod);
        }
        mod[static_cast<std::size_t>(slot)] = idx[static_cast<std::size_t>(slot)];
      }
      for (int s = 0; s < t.bundle_dn; ++s) {
        const int slot = off_bd + s;
        for (int w = 0; w < q; ++w) {
          mod[static_cast<std::size_t>(slot)] = w;
          v = v - conn.a[k](w, idx[static_cast<std::size_t>(slot)]) * x.at(mod);
        }
        mod[static_cast<std::size_t>(slot)] = idx[static_cast<std::size_t>(slot)];
      }
      for (int s = 0; s < t.conj_up; ++s) {
        const int slot = off_cu + s;
        for (int w = 0; w < q; ++w) {
          mod[static_cast<std::size_t>(slot)] = w;
          v = v + conn.a_bar[k](idx[static_cast<std::size_t>(slot)], w) * x.at(mod);
        }
        mod[static_cast<std::size_t>(slot)] = idx[static_cast<std::size_t>(slot)];
      }
      for (int s = 0; s < t.conj_dn; ++s) {
        const int slot = off_cd + s;
        for (int w = 0; w < q; ++w) {
          mod[static_cast<std::size_t>(slot)] = w;
          v = v - conn.a_bar[k](w, idx[static_cast<std::size_t>(slot)]) * x.at(mod);
        }
        mod[static_cast<std::size_t>(slot)] = idx[static_cast<std::size_t>(slot)];
      }
      for (int s = 0; s < t.tan_up; ++s) {
        const int slot = off_tu + s;
        for (int w = 0; w < 4; ++w) {
          mod[static_cast<std::size_t>(slot)] = w;
          v = v + conn.gamma(idx[static_cast<std::size_t>(slot)], k, w) * x.at(mod);
        }
        mod[static_cast<std::size_t>(slot)] = idx[static_cast<std::size_t>(slot)];
      }
      for (int s = 0; s < t.tan_dn; ++s) {
        const int slot = off_td + s;
        for (int w = 0; w < 4; ++w) {
          mod[static_cast<std::size_t>(slot)] = w;
          v = v - conn.gamma(w, k, idx[static_cast<std::size_t>(slot)]) * x.at(mod);
        }
        mod[static_cast<std::size_t>(slot)] = idx[static_cast<std::size_t>(slot)];
      }
      oidx[static_cast<std::size_t>(slots)] = k;
      out.at(oidx) = v;
    }
  }
  return out;
}

double RealityReport::max() const {
  double m = a_bar_conjugate.stat.max_abs;
  m = std::max(m, gamma_imag.stat.max_abs);
  m = std::max(m, tangent_curvature_imag.stat.max_abs);
  m = std::max(m, bundle_curvature_conjugate.stat.max_abs);
  return m;
}

ResidualReport RealityReport::all() const {
  return {a_bar_conjugate, gamma_imag, tangent_curvature_imag, bundle_curvature_conjugate};
}

RealityReport reality_check(const ConnectionTriple& conn, const FrameField& frame,
                            const StructureConstants& c) {
  const int q = conn.q;
  std::vector<Expr> abar_res;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < q; ++i)
      for (int j = 0; j < q; ++j)
        abar_res.push_back(conn.a_bar[k](i, j) - conj(conn.a[k](i, j)));

  std::vector<Expr> gamma_im;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) gamma_im.push_back(imag(conn.gamma(k, i, j)));

  CurvatureTensor r = tangent_curvature(conn.gamma, frame, c);
  std::vector<Expr> r_im;
  for (int p = 0; p < 4; ++p)
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r_im.push_back(imag(r(p, k, i, j)));

  CurvatureTensor curv = curvature_two_form(conn.a, frame, c);
  CurvatureTensor curv_bar = curvature_two_form(conn.a_bar, frame, c);
  std::vector<Expr> conj_res;
  for (int p = 0; p < q; ++p)
    for (int k = 0; k < q; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          conj_res.push_back(curv_bar(p, k, i, j) - conj(curv(p, k, i, j)));

  return RealityReport{
      evaluate_residual("reality.a_bar_conjugate", "eq:2.7", abar_res, frame.samples),
      evaluate_residual("reality.gamma_imag", "eq:2.7", gamma_im, frame.samples),
      evaluate_residual("reality.tangent_curvature_imag", "eq:2.13", r_im, frame.samples),
      evaluate_residual("reality.bundle_curvature_conjugate", "eq:2.14", conj_res,
                        frame.samples)};
}

}  // namespace gck
