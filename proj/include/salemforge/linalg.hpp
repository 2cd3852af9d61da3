#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <vector>

#include "salemforge/errors.hpp"

namespace salemforge {

using Int = mpz_class;
using Rat = mpq_class;
using IVec = std::vector<Int>;
using QVec = std::vector<Rat>;

inline int sgn(const Int& v) { return mpz_sgn(v.get_mpz_t()); }

inline Int pow_int(const Int& base, std::size_t e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(e));
  return r;
}

// Dense integer matrix with arbitrary-precision entries, row major.
class IMat {
 public:
  IMat() : rows_(0), cols_(0) {}
  IMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static IMat identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Int& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Int& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  bool operator==(const IMat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }
  bool operator!=(const IMat& o) const { return !(*this == o); }

  IMat operator*(const IMat& o) const;
  IVec operator*(const IVec& v) const;
  IMat operator+(const IMat& o) const;
  IMat operator-(const IMat& o) const;
  IMat transpose() const;
  IMat pow(unsigned k) const;

  bool is_symmetric() const;

  // Fraction-free determinant (Bareiss). Exact for any integer matrix.
  Int det() const;

  // Largest bit length over all entries.
  std::size_t max_entry_bits() const;

  // 64-bit content hash; equal matrices hash equal, collisions possible.
  std::uint64_t fingerprint() const;

 private:
  std::size_t rows_, cols_;
  std::vector<Int> a_;
};

// Solution structure of the single integer equation g.x = 0:
// d = gcd of the entries of g, particular satisfies g.particular = d,
// basis spans {x in Z^n : g.x = 0} as a lattice.
struct RowKernel {
  Int d;
  IVec particular;
  std::vector<IVec> basis;
};

RowKernel row_kernel(const IVec& g);

// Unimodular matrix whose first row is the given primitive vector.
// Throws validation_error when gcd(c) != 1.
IMat complete_primitive_row(const IVec& c);

// Diagonal of the Smith normal form, nonnegative, each dividing the next.
std::vector<Int> smith_divisors(const IMat& m);

Int vec_gcd(const IVec& v);
bool is_primitive(const IVec& v);
// Lexicographic order on integer vectors, entrywise.
bool lex_less(const IVec& a, const IVec& b);

QVec to_qvec(const IVec& v);

// Dense rational matrix, row major.
class QMat {
 public:
  QMat() : rows_(0), cols_(0) {}
  QMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
  explicit QMat(const IMat& m);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rat& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Rat& at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  QVec row(std::size_t i) const;
  QVec operator*(const QVec& v) const;

  // In-place reduced row echelon form; returns pivot column indices.
  std::vector<std::size_t> rref();

  // Basis of {x : A x = 0}.
  std::vector<QVec> kernel() const;

  // Unique solution of A x = b for invertible square A; throws otherwise.
  QVec solve(const QVec& b) const;

 private:
  std::size_t rows_, cols_;
  std::vector<Rat> a_;
};

// Incremental rational row span kept in reduced echelon form.
class SpanBuilder {
 public:
  explicit SpanBuilder(std::size_t dim) : dim_(dim) {}

  // Adds v to the span; returns true when the dimension grew.
  bool add(QVec v);
  bool contains(QVec v) const;
  std::size_t dim() const { return rows_.size(); }
  std::size_t ambient_dim() const { return dim_; }
  const std::vector<QVec>& basis() const { return rows_; }

 private:
  void reduce(QVec& v) const;
  std::size_t dim_;
  std::vector<QVec> rows_;          // echelon rows, pivot entries 1
  std::vector<std::size_t> pivots_; // pivot column of each row, increasing
};

}  // namespace salemforge
