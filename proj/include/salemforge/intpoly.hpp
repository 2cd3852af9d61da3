#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "salemforge/linalg.hpp"

namespace salemforge {

// Integer polynomial, coefficients ascending by power. The zero polynomial
// has an empty coefficient vector and degree -1.
class IntPolynomial {
 public:
  IntPolynomial() = default;
  explicit IntPolynomial(std::vector<Int> ascending) : c_(std::move(ascending)) { normalize(); }

  static IntPolynomial zero() { return IntPolynomial(); }
  static IntPolynomial one() { return constant(1); }
  static IntPolynomial constant(Int v);
  static IntPolynomial monomial(std::size_t deg, Int lead = 1);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const Int& coeff(std::size_t k) const;
  const Int& leading() const;
  const std::vector<Int>& coeffs() const { return c_; }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }

  bool operator==(const IntPolynomial& o) const { return c_ == o.c_; }
  bool operator!=(const IntPolynomial& o) const { return c_ != o.c_; }

  IntPolynomial operator+(const IntPolynomial& o) const;
  IntPolynomial operator-(const IntPolynomial& o) const;
  IntPolynomial operator*(const IntPolynomial& o) const;
  IntPolynomial operator*(const Int& s) const;
  IntPolynomial operator-() const;

  IntPolynomial derivative() const;
  Int content() const;
  IntPolynomial primitive_part() const;

  Int eval_int(const Int& x) const;
  // Sign of the value at a rational point, computed without fractions.
  int sign_at(const Rat& x) const;

  std::string to_string(const std::string& var = "t") const;

  void normalize();

 private:
  std::vector<Int> c_;
};

// Exact quotient; throws validation_error when the division leaves a remainder.
IntPolynomial exact_divide(const IntPolynomial& num, const IntPolynomial& den);
// Same, but empty on inexact division.
std::optional<IntPolynomial> try_exact_divide(const IntPolynomial& num, const IntPolynomial& den);

IntPolynomial poly_gcd(const IntPolynomial& a, const IntPolynomial& b);
IntPolynomial squarefree_part(const IntPolynomial& p);

// Characteristic polynomial det(tI - M), division-free (Samuelson-Berkowitz).
IntPolynomial char_poly(const IMat& m);

unsigned euler_phi(unsigned n);
// n-th cyclotomic polynomial, computed by exact division of t^n - 1 by the
// lower-index cyclotomics; results are cached.
IntPolynomial cyclotomic(unsigned n);
// All (n, Phi_n) with phi(n) <= max_degree, ascending by n. Complete because
// phi(n) >= sqrt(n/2), so scanning n <= 2*max_degree^2 suffices.
std::vector<std::pair<unsigned, IntPolynomial>> cyclotomics_up_to_degree(unsigned max_degree);

bool is_reciprocal(const IntPolynomial& p);

// T with P(x) = x^d T(x + 1/x) for reciprocal monic P of even degree 2d.
IntPolynomial trace_polynomial(const IntPolynomial& p);

// Number of distinct real roots in the half-open interval (a, b].
unsigned sturm_count(const IntPolynomial& p, const Rat& a, const Rat& b);

// Strict upper bound on the absolute value of every complex root.
Rat cauchy_root_bound(const IntPolynomial& p);

struct SalemClassification {
  enum class Kind { cyclotomic_product, salem, mixed, not_o_plus_shape };
  Kind kind = Kind::not_o_plus_shape;
  // (n, multiplicity) of each cyclotomic factor removed, ascending by n.
  std::vector<std::pair<unsigned, unsigned>> cyclotomic_factors;
  std::optional<IntPolynomial> salem_factor;
  std::optional<unsigned> salem_degree;
};

std::string to_string(SalemClassification::Kind k);

struct ClassifyOptions {
  // 0 = use deg(P); otherwise caps the degree of cyclotomics tried.
  unsigned degree_bound = 0;
  // Exclude degree-2 factors from counting as Salem (classical convention
  // asks for degree >= 4; quadratic units like t^2-3t+1 pass by default).
  bool exclude_degree_2 = false;
};

// Factors a monic integer polynomial as (cyclotomics) * (at most one Salem
// polynomial). Removes every cyclotomic factor of admissible degree to full
// multiplicity, then tests the remainder for the Salem root pattern via its
// trace polynomial.
SalemClassification classify(const IntPolynomial& p, const ClassifyOptions& opts = {});

struct EntropyInterval {
  Rat lower;          // rational lower bound for the Salem number (or 1)
  Rat upper;          // rational upper bound (or 1)
  std::string log_lower;  // decimal string, rounded toward -infinity
  std::string log_upper;  // decimal string, rounded toward +infinity
};

// Rigorous enclosure of the spectral radius of a classified polynomial:
// [1,1] with logs "0" when there is no Salem factor, otherwise an interval
// of width <= tol around the Salem root, endpoints exact rationals.
EntropyInterval spectral_radius(const SalemClassification& c, const Rat& tol);

// Decimal string for ln(x), 20 significant digits, rounded toward
// -infinity (round_down) or +infinity. x = 1 gives the literal "0",
// matching the zero-entropy intervals above.
std::string log_decimal(const Rat& x, bool round_down);

}  // namespace salemforge
