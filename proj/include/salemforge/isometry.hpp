#pragma once

#include <memory>
#include <vector>

#include "salemforge/lattice.hpp"
#include "salemforge/linalg.hpp"

namespace salemforge {

// An integer matrix certified to preserve a lattice's bilinear form.
// Instances are immutable; construct through validate() or eichler().
class Isometry {
 public:
  const IMat& matrix() const { return matrix_; }
  const std::shared_ptr<const GramLattice>& lattice() const { return lattice_; }

  int det_sign() const { return det_sign_; }

  // True when the map sends the positive cone to itself, decided by the
  // sign of (M v, v) at the lattice's cone reference v. Lattices without
  // a cone reference have nothing to flip, so the answer is true.
  bool cone_preserving() const { return cone_preserving_; }

  Isometry inverse() const;
  Isometry operator*(const Isometry& o) const;

  bool operator==(const Isometry& o) const { return matrix_ == o.matrix_; }

 private:
  Isometry(IMat m, std::shared_ptr<const GramLattice> l, int det_sign, bool cone)
      : matrix_(std::move(m)), lattice_(std::move(l)), det_sign_(det_sign), cone_preserving_(cone) {}

  friend Isometry validate(IMat m, std::shared_ptr<const GramLattice> l);

  IMat matrix_;
  std::shared_ptr<const GramLattice> lattice_;
  int det_sign_;
  bool cone_preserving_;
};

// Checks M^T gram M = gram exactly and |det M| = 1, then certifies.
// Degenerate forms admit non-unimodular form preservers, so the
// determinant check is a thrown error, not an assert.
Isometry validate(IMat m, std::shared_ptr<const GramLattice> l);

bool in_so_plus(const Isometry& g);

// The transvection x -> x + (x,e)a - (x,a)e - ((a,a)/2)(x,e)e.
// Requires (e,e) = 0, (e,a) = 0, e primitive; (a,a) must be even when the
// lattice itself is not.
Isometry eichler(std::shared_ptr<const GramLattice> l, const IVec& e, const IVec& a);

// A free abelian unipotent group fixing a primitive isotropic vector e,
// together with the rational witness data that certifies its rank.
struct ParabolicGroup {
  std::shared_ptr<const GramLattice> lattice;
  IVec e;
  std::vector<Isometry> generators;  // E(e, w_1), ..., E(e, w_r)
  std::vector<QVec> basis_witness;   // e, w_1, ..., w_r, u with (e,u) = 1
  std::vector<QVec> b_vectors;       // translation part of each generator
};

// Completes e to an integral basis <e, w_1, ..., w_r> of the sublattice
// orthogonal to e (r = rank - 2) and returns the transvections E(e, w_j).
ParabolicGroup parabolic_group(std::shared_ptr<const GramLattice> l, const IVec& e);

// Rational subspace in reduced echelon form.
struct Subspace {
  std::size_t ambient = 0;
  std::vector<QVec> basis;  // echelon rows, pivot entries 1

  std::size_t dimension() const { return basis.size(); }
  bool contains(const QVec& v) const;
};

// Smallest subspace containing v that every g in gens maps into itself.
Subspace orbit_span(const std::vector<Isometry>& gens, const QVec& v);

// Intersection of the kernels of g - I over the rationals.
Subspace fixed_subspace(const std::vector<Isometry>& gens);

}  // namespace salemforge
