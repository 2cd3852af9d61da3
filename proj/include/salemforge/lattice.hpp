#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "salemforge/linalg.hpp"

namespace salemforge {

struct Signature {
  unsigned pos = 0;
  unsigned zero = 0;
  unsigned neg = 0;
  bool operator==(const Signature&) const = default;
};

// Exact inertia of a symmetric integer matrix, eigenvalue signs counted
// with multiplicity.
Signature signature_of(const IMat& gram);

// Integer lattice given by a symmetric Gram matrix. Signature and the cone
// reference are computed once at construction; instances are immutable.
class GramLattice {
 public:
  GramLattice(std::string name, IMat gram, bool require_even = false);

  const std::string& name() const { return name_; }
  const IMat& gram() const { return gram_; }
  std::size_t rank() const { return gram_.rows(); }
  const Signature& signature() const { return sig_; }

  bool is_even() const;
  // Signature (1, 0, rank-1).
  bool is_hyperbolic() const;

  // A fixed integer vector v with (v,v) > 0 selecting one component of
  // {x : (x,x) > 0}; present exactly when the signature is (1, 0, n).
  const std::optional<IVec>& cone_reference() const { return cone_ref_; }

  Int inner(const IVec& x, const IVec& y) const;
  Int norm(const IVec& x) const { return inner(x, x); }

  std::uint64_t fingerprint() const { return gram_.fingerprint(); }

 private:
  std::string name_;
  IMat gram_;
  Signature sig_;
  std::optional<IVec> cone_ref_;
};

// Builds a lattice from a block-sum expression. Atoms: U, A<n> (n >= 1),
// D<n> (n >= 3), E6, E7, E8 (root lattices negative definite), any of them
// scaled as ATOM(m) with integer m != 0, and literal Gram blocks written as
// [[...],[...]] rows of integers. Blocks are joined with '+'.
GramLattice build_lattice(const std::string& expr, bool require_even = false);

struct DiscriminantProfile {
  // Smith normal form divisors > 1, each dividing the next.
  std::vector<Int> elementary_divisors;
  // Product of the divisors = |det gram|.
  Int group_order;
  // (p, sigma) when the group is (Z/p)^(2 sigma) for a prime p.
  std::optional<std::pair<Int, unsigned>> p_elementary;
};

DiscriminantProfile discriminant(const GramLattice& l);

// All primitive vectors v with (v,v) = 0 and coordinates bounded by
// height_bound, first nonzero coordinate positive, sorted lexicographically.
// Requires hyperbolic signature (1, 0, n).
std::vector<IVec> find_isotropic(const GramLattice& l, unsigned height_bound);

}  // namespace salemforge
