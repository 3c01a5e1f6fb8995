#include "gck/bundle.hpp"

namespace gck {
namespace {

int eps_sign(int i, int j) { return i == j ? 0 : (i < j ? 1 : -1); }

int eps_sign(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  int sign = 1;
  int v[3] = {i, j, k};
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      if (v[a] > v[b]) {
        std::swap(v[a], v[b]);
        sign = -sign;
      }
  return sign;
}

Expr signed_seed(const Expr& seed, int sign) {
  if (sign == 0) return Expr(0.0);
  return sign > 0 ? seed : -seed;
}

std::string tag_for_metric_concordance(int q) {
  return q == 1 ? "eq:3.1" : (q == 2 ? "eq:4.1" : "eq:5.1");
}

std::string prefix(int q) { return q == 1 ? "u1" : (q == 2 ? "su2" : "su3"); }

}  // namespace

BundleStructure::BundleStructure(int q, ExprMatrix hermitian, Expr d_seed)
    : q_(q), hermitian_(std::move(hermitian)), d_seed_(std::move(d_seed)) {
  if (hermitian_.rows() != q_ || hermitian_.cols() != q_)
    throw BundleError("Hermitian tensor shape does not match bundle rank");
  if (q_ >= 2) d_seed_inv_ = Expr(1.0) / d_seed_;
}

BundleStructure BundleStructure::u1(Expr d11) {
  ExprMatrix d(1, 1);
  d(0, 0) = std::move(d11);
  return BundleStructure(1, std::move(d), Expr(0.0));
}

BundleStructure BundleStructure::su2(ExprMatrix hermitian, Expr d01) {
  return BundleStructure(2, std::move(hermitian), std::move(d01));
}

BundleStructure BundleStructure::su3(ExprMatrix hermitian, Expr d012) {
  return BundleStructure(3, std::move(hermitian), std::move(d012));
}

Expr BundleStructure::skew_lower(int i, int j) const {
  if (q_ != 2) throw BundleError("two-index skew tensor requires rank 2");
  return signed_seed(d_seed_, eps_sign(i, j));
}

Expr BundleStructure::skew_upper(int i, int j) const {
  if (q_ != 2) throw BundleError("two-index skew tensor requires rank 2");
  return signed_seed(d_seed_inv_, eps_sign(i, j));
}

Expr BundleStructure::skew_lower(int i, int j, int k) const {
  if (q_ != 3) throw BundleError("three-index skew tensor requires rank 3");
  return signed_seed(d_seed_, eps_sign(i, j, k));
}

Expr BundleStructure::skew_upper(int i, int j, int k) const {
  if (q_ != 3) throw BundleError("three-index skew tensor requires rank 3");
  return signed_seed(d_seed_inv_, eps_sign(i, j, k));
}

GaugeMap::GaugeMap(int q, Expr phi, ExprMatrix s, ExprMatrix t)
    : q_(q), phi_(std::move(phi)), s_(std::move(s)), t_(std::move(t)) {}

GaugeMap GaugeMap::phase(Expr phi) {
  ExprMatrix s(1, 1);
  ExprMatrix t(1, 1);
  s(0, 0) = exp(Expr::i() * phi);
  t(0, 0) = exp(-(Expr::i() * phi));
  return GaugeMap(1, std::move(phi), std::move(s), std::move(t));
}

GaugeMap GaugeMap::matrix(ExprMatrix s) {
  const int q = static_cast<int>(s.rows());
  if (q != s.cols() || q < 2 || q > 3) throw BundleError("gauge matrix must be 2x2 or 3x3");
  ExprMatrix t = adjugate_inverse(s);
  return GaugeMap(q, Expr(0.0), std::move(s), std::move(t));
}

const Expr& GaugeMap::phi() const {
  if (q_ != 1) throw BundleError("phase is only defined for rank-1 maps");
  return phi_;
}

ResidualReport GaugeMap::validate(const SampleSet& samples) const {
  ResidualReport out;
  const std::string p = prefix(q_);
  const std::string tag = q_ == 1 ? "eq:3.3" : (q_ == 2 ? "eq:4.4" : "eq:5.4");

  std::vector<Expr> inv_res;
  ExprMatrix st = s_ * t_;
  for (int i = 0; i < q_; ++i)
    for (int j = 0; j < q_; ++j) inv_res.push_back(st(i, j) - Expr(i == j ? 1.0 : 0.0));
  out.push_back(evaluate_residual("gauge." + p + ".inverse", tag, inv_res, samples));

  std::vector<Expr> unitary_res;
  ExprMatrix ssh = s_ * conj_transpose(s_);
  for (int i = 0; i < q_; ++i)
    for (int j = 0; j < q_; ++j) unitary_res.push_back(ssh(i, j) - Expr(i == j ? 1.0 : 0.0));
  out.push_back(evaluate_residual("gauge." + p + ".unitary", tag, unitary_res, samples));

  if (q_ >= 2) {
    Expr det_res = determinant(s_) - Expr(1.0);
    out.push_back(evaluate_residual("gauge." + p + ".special", tag,
                                    std::span<const Expr>(&det_res, 1), samples));
  } else {
    Expr im_phi = imag(phi_);
    out.push_back(evaluate_residual("gauge.u1.phase_real", tag,
                                    std::span<const Expr>(&im_phi, 1), samples));
  }
  return out;
}

Expr hermitian_form(const BundleStructure& b, const ExprVector& x, const ExprVector& y) {
  const int q = b.rank();
  if (x.size() != q || y.size() != q) throw BundleError("section rank mismatch");
  Expr out;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) out = out + b.hermitian()(i, j) * conj(x(j)) * y(i);
  return out;
}

ResidualReport check_orthonormal(const BundleStructure& b, const SampleSet& samples) {
  const int q = b.rank();
  const std::string p = prefix(q);
  const std::string tag = q == 1 ? "def:1.2" : (q == 2 ? "def:1.3" : "def:1.4");
  ResidualReport out;
  std::vector<Expr> d_res;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) d_res.push_back(b.hermitian()(i, j) - Expr(i == j ? 1.0 : 0.0));
  out.push_back(evaluate_residual(p + ".orthonormal_hermitian", tag, d_res, samples));
  if (q == 2) {
    Expr r = b.skew_lower(0, 1) - Expr(1.0);
    out.push_back(
        evaluate_residual(p + ".orthonormal_skew", tag, std::span<const Expr>(&r, 1), samples));
  } else if (q == 3) {
    Expr r = b.skew_lower(0, 1, 2) - Expr(1.0);
    out.push_back(
        evaluate_residual(p + ".orthonormal_skew", tag, std::span<const Expr>(&r, 1), samples));
  }
  return out;
}

std::vector<Expr> d_concordance_residuals(const BundleStructure& b) {
  const int q = b.rank();
  std::vector<Expr> out;
  if (q == 2) {
    for (int a = 0; a < 2; ++a) {
      for (int c = 0; c < 2; ++c) {
        Expr lhs;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            lhs = lhs + b.skew_upper(i, j) * b.hermitian()(i, a) * b.hermitian()(j, c);
        out.push_back(lhs - conj(b.skew_lower(a, c)));
      }
    }
  } else if (q == 3) {
    for (int a = 0; a < 3; ++a) {
      for (int c = 0; c < 3; ++c) {
        for (int e = 0; e < 3; ++e) {
          Expr lhs;
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
              for (int k = 0; k < 3; ++k)
                lhs = lhs + b.skew_upper(i, j, k) * b.hermitian()(i, a) * b.hermitian()(j, c) *
                                b.hermitian()(k, e);
          out.push_back(lhs - conj(b.skew_lower(a, c, e)));
        }
      }
    }
  }
  return out;
}

ResidualReport d_concordance(const BundleStructure& b, const SampleSet& samples) {
  const int q = b.rank();
  ResidualReport out;
  if (q == 1) return out;
  std::vector<Expr> res = d_concordance_residuals(b);
  out.push_back(evaluate_residual(prefix(q) + ".d_concordance", q == 2 ? "eq:1.9" : "eq:1.10",
                                  res, samples));
  return out;
}

std::vector<Expr> metric_concordance_residuals(const BundleStructure& b,
                                               const ConnectionTriple& conn,
                                               const FrameField& frame) {
  const int q = b.rank();
  if (conn.q != q) throw BundleError("connection rank does not match bundle rank");
  std::vector<Expr> out;
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < q; ++i) {
      for (int j = 0; j < q; ++j) {
        Expr r = lie_derivative(b.hermitian()(i, j), frame, k);
        for (int a = 0; a < q; ++a) {
          r = r - b.hermitian()(a, j) * conn.a[k](a, i);
          r = r - b.hermitian()(i, a) * conn.a_bar[k](a, j);
        }
        out.push_back(r);
      }
    }
  }
  return out;
}

std::vector<Expr> skew_concordance_residuals(const BundleStructure& b,
                                             const ConnectionTriple& conn,
                                             const FrameField& frame) {
  const int q = b.rank();
  if (conn.q != q) throw BundleError("connection rank does not match bundle rank");
  std::vector<Expr> out;
  if (q == 2) {
    for (int k = 0; k < 4; ++k) {
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          Expr r = lie_derivative(b.skew_lower(i, j), frame, k);
          for (int a = 0; a < 2; ++a) {
            r = r - b.skew_lower(a, j) * conn.a[k](a, i);
            r = r - b.skew_lower(i, a) * conn.a[k](a, j);
          }
          out.push_back(r);
        }
      }
    }
  } else if (q == 3) {
    for (int s = 0; s < 4; ++s) {
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          for (int k = 0; k < 3; ++k) {
            Expr r = lie_derivative(b.skew_lower(i, j, k), frame, s);
            for (int a = 0; a < 3; ++a) {
              r = r - b.skew_lower(a, j, k) * conn.a[s](a, i);
              r = r - b.skew_lower(i, a, k) * conn.a[s](a, j);
              r = r - b.skew_lower(i, j, a) * conn.a[s](a, k);
            }
            out.push_back(r);
          }
        }
      }
    }
  }
  return out;
}

ResidualReport connection_concordance(const BundleStructure& b, const ConnectionTriple& conn,
                                      const FrameField& frame) {
  const int q = b.rank();
  ResidualReport out;
  std::vector<Expr> dres = metric_concordance_residuals(b, conn, frame);
  out.push_back(evaluate_residual(prefix(q) + ".nabla_D", tag_for_metric_concordance(q), dres,
                                  frame.samples));
  if (q >= 2) {
    std::vector<Expr> sres = skew_concordance_residuals(b, conn, frame);
    out.push_back(evaluate_residual(prefix(q) + ".nabla_d", q == 2 ? "eq:4.2" : "eq:5.2", sres,
                                    frame.samples));
  }
  return out;
}

Expr u1_real_part(const BundleStructure& b, const FrameField& frame, int k) {
  if (b.rank() != 1) throw BundleError("real-part formula requires rank 1");
  const Expr& d11 = b.hermitian()(0, 0);
  for (const ChartPoint& p : frame.samples.points()) {
    Complex v = d11.eval(p);
    if (!(v.real() > 0.0) || std::abs(v.imag()) > 1e-12)
      throw BundleError("Hermitian component must be positive on the sample set");
  }
  return lie_derivative(d11, frame, k) / (Expr(2.0) * d11);
}

std::vector<Expr> su_skew_residuals(const ConnectionTriple& conn) {
  std::vector<Expr> out;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < conn.q; ++i)
      for (int j = 0; j < conn.q; ++j)
        out.push_back(conj(conn.a[k](i, j)) + conn.a[k](j, i));
  return out;
}

std::vector<Expr> su_trace_residuals(const ConnectionTriple& conn) {
  std::vector<Expr> out;
  for (int k = 0; k < 4; ++k) {
    Expr tr;
    for (int i = 0; i < conn.q; ++i) tr = tr + conn.a[k](i, i);
    out.push_back(tr);
  }
  return out;
}

ResidualReport su_algebra_check(const ConnectionTriple& conn, const SampleSet& samples) {
  if (conn.q < 2) throw BundleError("su-algebra check requires rank 2 or 3");
  const std::string p = prefix(conn.q);
  const std::string tag = conn.q == 2 ? "eq:4.3" : "eq:5.3";
  ResidualReport out;
  out.push_back(evaluate_residual(p + ".su_skew_hermitian", tag, su_skew_residuals(conn), samples));
  out.push_back(evaluate_residual(p + ".su_traceless", tag, su_trace_residuals(conn), samples));
  return out;
}

std::vector<Expr> epsilon_identity_residuals(const BundleStructure& b, int which) {
  if (b.rank() != 3) throw BundleError("contraction identities require rank 3");
  std::vector<Expr> out;
  if (which == 1) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int a = 0; a < 3; ++a)
          for (int c = 0; c < 3; ++c) {
            Expr lhs;
            for (int k = 0; k < 3; ++k) lhs = lhs + b.skew_lower(i, j, k) * b.skew_upper(a, c, k);
            double rhs = (a == i && c == j ? 1.0 : 0.0) - (a == j && c == i ? 1.0 : 0.0);
            out.push_back(lhs - Expr(rhs));
          }
  } else {
    for (int i = 0; i < 3; ++i)
      for (int a = 0; a < 3; ++a) {
        Expr lhs;
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k) lhs = lhs + b.skew_lower(i, j, k) * b.skew_upper(a, j, k);
        out.push_back(lhs - Expr(a == i ? 2.0 : 0.0));
      }
  }
  return out;
}

ResidualReport epsilon_identities(const BundleStructure& b, const SampleSet& samples) {
  ResidualReport out;
  out.push_back(evaluate_residual("su3.epsilon_identity1", "eq:5.e1",
                                  epsilon_identity_residuals(b, 1), samples));
  out.push_back(evaluate_residual("su3.epsilon_identity2", "eq:5.e2",
                                  epsilon_identity_residuals(b, 2), samples));
  return out;
}

ConnectionTriple gauge_transform(const ConnectionTriple& conn, const GaugeMap& map,
                                 const FrameField& frame) {
  if (conn.q != map.rank()) throw BundleError("gauge map rank does not match connection rank");
  ConnectionTriple out = conn;
  if (map.is_phase()) {
    for (int k = 0; k < 4; ++k) {
      Expr dphi = lie_derivative(map.phi(), frame, k);
      out.a[k](0, 0) = conn.a[k](0, 0) - Expr::i() * dphi;
      out.a_bar[k](0, 0) = conn.a_bar[k](0, 0) + Expr::i() * conj(dphi);
    }
    return out;
  }
  std::array<ExprMatrix, 4> theta = theta_params(map, frame);
  ExprMatrix sc = conj_entries(map.s());
  ExprMatrix tc = conj_entries(map.t());
  for (int k = 0; k < 4; ++k) {
    out.a[k] = map.s() * conn.a[k] * map.t() + theta[k];
    out.a_bar[k] = sc * conn.a_bar[k] * tc + conj_entries(theta[k]);
  }
  return out;
}

std::array<ExprMatrix, 4> theta_params(const GaugeMap& map, const FrameField& frame) {
  if (map.rank() < 2) throw BundleError("theta parameters require rank 2 or 3");
  std::array<ExprMatrix, 4> out;
  for (int k = 0; k < 4; ++k) out[k] = map.s() * lie_derivative(map.t(), frame, k);
  return out;
}

std::array<ExprMatrix, 4> theta_params_alt(const GaugeMap& map, const FrameField& frame) {
  if (map.rank() < 2) throw BundleError("theta parameters require rank 2 or 3");
  std::array<ExprMatrix, 4> out;
  for (int k = 0; k < 4; ++k) out[k] = -(lie_derivative(map.s(), frame, k) * map.t());
  return out;
}

ExprVector section_transform(const ExprVector& psi_tilde, const GaugeMap& map) {
  if (psi_tilde.size() != map.rank()) throw BundleError("section rank mismatch");
  return map.s() * psi_tilde;
}

CurvatureTensor bundle_curvature(const ConnectionTriple& conn, const FrameField& frame,
                                 const StructureConstants& c) {
  return curvature_two_form(conn.a, frame, c);
}

}  // namespace gck
