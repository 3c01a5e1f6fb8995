#pragma once

#include "gck/geometry.hpp"

#include <array>
#include <span>
#include <vector>

namespace gck {

class TensorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Valence signature of a frame-relative tensor field: bundle slots,
// conjugate-bundle slots, tangent slots, each split upper/lower.
struct TensorType {
  int bundle_up = 0;
  int bundle_dn = 0;
  int conj_up = 0;
  int conj_dn = 0;
  int tan_up = 0;
  int tan_dn = 0;

  int rank() const { return bundle_up + bundle_dn + conj_up + conj_dn + tan_up + tan_dn; }
  bool operator==(const TensorType&) const = default;
};

// Dense component array in slot order (bundle uppers, bundle lowers,
// conjugate uppers, conjugate lowers, tangent uppers, tangent lowers).
// Bundle indices are 0-based internally and range over 0..q-1; tangent
// indices over 0..3. The total rank is capped at 8.
class TensorField {
 public:
  TensorField(TensorType type, int q);

  const TensorType& type() const { return type_; }
  int q() const { return q_; }

  std::size_t component_count() const { return comps_.size(); }
  const Expr& flat(std::size_t n) const { return comps_[n]; }
  Expr& flat(std::size_t n) { return comps_[n]; }

  const Expr& at(std::span<const int> idx) const { return comps_[offset(idx)]; }
  Expr& at(std::span<const int> idx) { return comps_[offset(idx)]; }
  const Expr& at(std::initializer_list<int> idx) const {
    return at(std::span<const int>(idx.begin(), idx.size()));
  }
  Expr& at(std::initializer_list<int> idx) {
    return at(std::span<const int>(idx.begin(), idx.size()));
  }

  std::size_t offset(std::span<const int> idx) const;
  void decode(std::size_t n, std::span<int> idx) const;

  int slot_count() const { return type_.rank(); }
  int slot_dim(int slot) const { return dims_[static_cast<std::size_t>(slot)]; }

 private:
  TensorType type_;
  int q_;
  std::vector<int> dims_;
  std::vector<std::size_t> strides_;
  std::vector<Expr> comps_;
};

// Connection data (Gamma, A, Abar) for a rank-q bundle over the chart.
// a[k] and a_bar[k] are q x q, indexed (upper, lower); k is the frame
// direction.
struct ConnectionTriple {
  int q = 1;
  GammaField gamma;
  std::array<ExprMatrix, 4> a;
  std::array<ExprMatrix, 4> a_bar;

  static ConnectionTriple zero(int q, GammaField gamma = GammaField{});
  // Builds a_bar = conj(a) entrywise.
  static ConnectionTriple real_connection(int q, GammaField gamma, std::array<ExprMatrix, 4> a);
};

// Conjugation involution: swaps the bundle index group with the
// conjugate group and conjugates the components; tangent slots are
// untouched.
TensorField tau_conjugate(const TensorField& x);

// Covariant differential: appends one lower tangent slot (last) and
// corrects every index with the matching connection component, + for
// uppers and - for lowers.
TensorField covariant_differential(const TensorField& x, const ConnectionTriple& conn,
                                   const FrameField& frame);

struct RealityReport {
  NamedResidual a_bar_conjugate;           // a_bar vs conj(a)
  NamedResidual gamma_imag;                // Im(Gamma)
  NamedResidual tangent_curvature_imag;    // Im(R)
  NamedResidual bundle_curvature_conjugate;  // curvature of a_bar vs conj(curvature of a)

  double max() const;
  ResidualReport all() const;
};

RealityReport reality_check(const ConnectionTriple& conn, const FrameField& frame,
                            const StructureConstants& c);

}  // namespace gck
