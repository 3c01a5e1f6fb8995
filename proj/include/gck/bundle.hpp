#pragma once

#include "gck/tensor.hpp"

#include <optional>

namespace gck {

class BundleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Basic fields of a rank-q bundle: the Hermitian tensor D and, for
// q = 2 and 3, the completely skew tensor d together with its inverse
// companion. All bundle indices below are 0-based; the reporting layer
// prints them 1-based.
//
// The inverse skew tensor follows the convention fixed by the
// orthonormal data: for q = 2, d_upper satisfies
// sum_k d_upper(i,k) d_lower(j,k) = delta(i,j) (the transposed matrix
// inverse), and for q = 3 it is fixed by d_upper(0,1,2) =
// 1/d_lower(0,1,2).
class BundleStructure {
 public:
  static BundleStructure u1(Expr d11);
  static BundleStructure su2(ExprMatrix hermitian, Expr d01);
  static BundleStructure su3(ExprMatrix hermitian, Expr d012);

  int rank() const { return q_; }
  const ExprMatrix& hermitian() const { return hermitian_; }

  bool has_skew() const { return q_ >= 2; }
  Expr skew_lower(int i, int j) const;          // q = 2
  Expr skew_upper(int i, int j) const;          // q = 2
  Expr skew_lower(int i, int j, int k) const;   // q = 3
  Expr skew_upper(int i, int j, int k) const;   // q = 3

  // The canonical stored entries d_lower(0,1) resp. d_lower(0,1,2).
  const Expr& skew_seed() const { return d_seed_; }

 private:
  BundleStructure(int q, ExprMatrix hermitian, Expr d_seed);

  int q_;
  ExprMatrix hermitian_;
  Expr d_seed_;       // d_lower(0,1) or d_lower(0,1,2); unused for q=1
  Expr d_seed_inv_;   // 1/d_seed
};

// Change of bundle frame. For q = 1 the map is a phase, S = e^{i phi};
// for q = 2, 3 it is a matrix with symbolic inverse T = S^{-1}.
class GaugeMap {
 public:
  static GaugeMap phase(Expr phi);
  static GaugeMap matrix(ExprMatrix s);

  int rank() const { return q_; }
  bool is_phase() const { return q_ == 1; }
  const Expr& phi() const;
  const ExprMatrix& s() const { return s_; }
  const ExprMatrix& t() const { return t_; }

  // S*T = id, unitarity and (q >= 2) det S = 1 residuals.
  ResidualReport validate(const SampleSet& samples) const;

 private:
  GaugeMap(int q, Expr phi, ExprMatrix s, ExprMatrix t);

  int q_;
  Expr phi_;
  ExprMatrix s_;
  ExprMatrix t_;
};

// sum_{i,j} D(i,j) conj(x(j)) y(i).
Expr hermitian_form(const BundleStructure& b, const ExprVector& x, const ExprVector& y);

// Residuals of the orthonormal-frame predicate: D = id and the skew
// tensor in canonical position (d_lower(0,1) = 1 resp. d_lower(0,1,2) = 1).
ResidualReport check_orthonormal(const BundleStructure& b, const SampleSet& samples);

// Residual expressions of the algebraic D-d compatibility, per slot.
// q = 2: sum_{ij} d_upper(i,j) D(i,a) D(j,b) - conj(d_lower(a,b)).
// q = 3: the triple-sum analog with slots (a, b, c) flattened row-major.
std::vector<Expr> d_concordance_residuals(const BundleStructure& b);
ResidualReport d_concordance(const BundleStructure& b, const SampleSet& samples);

// Residual expressions of nabla D = 0 and nabla d = 0 against a given
// connection, straight from their per-component coordinate form.
std::vector<Expr> metric_concordance_residuals(const BundleStructure& b,
                                               const ConnectionTriple& conn,
                                               const FrameField& frame);
std::vector<Expr> skew_concordance_residuals(const BundleStructure& b,
                                             const ConnectionTriple& conn,
                                             const FrameField& frame);
ResidualReport connection_concordance(const BundleStructure& b, const ConnectionTriple& conn,
                                      const FrameField& frame);

// Re(A(k)(0,0)) forced by concordance for q = 1: L_k(D11) / (2 D11).
Expr u1_real_part(const BundleStructure& b, const FrameField& frame, int k);

// Residuals of skew-Hermiticity and tracelessness of the A matrices.
std::vector<Expr> su_skew_residuals(const ConnectionTriple& conn);
std::vector<Expr> su_trace_residuals(const ConnectionTriple& conn);
ResidualReport su_algebra_check(const ConnectionTriple& conn, const SampleSet& samples);

// The two contraction identities of the rank-3 skew pair, as residual
// expressions over all free index combinations.
std::vector<Expr> epsilon_identity_residuals(const BundleStructure& b, int which);
ResidualReport epsilon_identities(const BundleStructure& b, const SampleSet& samples);

// Connection transport under a change of bundle frame. For q = 1:
// A -> A - i L_k(phi). Otherwise A_k -> S A_k T + theta_k, with the
// conjugate components transported by the conjugated law; Gamma is
// untouched.
ConnectionTriple gauge_transform(const ConnectionTriple& conn, const GaugeMap& map,
                                 const FrameField& frame);

// theta_k = S L_k(T); the equivalent form -L_k(S) T is exposed for
// cross-checking.
std::array<ExprMatrix, 4> theta_params(const GaugeMap& map, const FrameField& frame);
std::array<ExprMatrix, 4> theta_params_alt(const GaugeMap& map, const FrameField& frame);

// Section transport: psi = S psi_tilde (q = 1: e^{i phi} psi_tilde).
ExprVector section_transform(const ExprVector& psi_tilde, const GaugeMap& map);

// Field strength of the A-components; for q = 1 the (0,0) slice is the
// scalar-valued two-form.
CurvatureTensor bundle_curvature(const ConnectionTriple& conn, const FrameField& frame,
                                 const StructureConstants& c);

}  // namespace gck
