#include "salemforge/linalg.hpp"

#include <algorithm>
#include <utility>

namespace salemforge {

IMat IMat::identity(std::size_t n) {
  IMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IMat IMat::operator*(const IMat& o) const {
  if (cols_ != o.rows_) throw validation_error("matrix product: inner dimensions differ");
  IMat r(rows_, o.cols_);
  Int tmp;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Int& aik = at(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) {
        tmp = aik * o.at(k, j);
        r.at(i, j) += tmp;
      }
    }
  return r;
}

IVec IMat::operator*(const IVec& v) const {
  if (cols_ != v.size()) throw validation_error("matrix-vector product: dimensions differ");
  IVec r(rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (at(i, j) != 0) r[i] += at(i, j) * v[j];
  return r;
}

IMat IMat::operator+(const IMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw validation_error("matrix sum: dimensions differ");
  IMat r(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
  return r;
}

IMat IMat::operator-(const IMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw validation_error("matrix difference: dimensions differ");
  IMat r(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
  return r;
}

IMat IMat::transpose() const {
  IMat r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
  return r;
}

IMat IMat::pow(unsigned k) const {
  if (!is_square()) throw validation_error("matrix power: square matrix required");
  IMat r = identity(rows_);
  IMat base = *this;
  while (k) {
    if (k & 1u) r = r * base;
    k >>= 1u;
    if (k) base = base * base;
  }
  return r;
}

bool IMat::is_symmetric() const {
  if (!is_square()) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      if (at(i, j) != at(j, i)) return false;
  return true;
}

Int IMat::det() const {
  if (!is_square()) throw validation_error("determinant: square matrix required");
  const std::size_t n = rows_;
  if (n == 0) return 1;
  IMat w = *this;
  int sign = 1;
  Int prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    // pivot search: Bareiss needs a nonzero leading entry at every step
    std::size_t p = k;
    while (p < n && w.at(p, k) == 0) ++p;
    if (p == n) return 0;
    if (p != k) {
      for (std::size_t j = k; j < n; ++j) std::swap(w.at(k, j), w.at(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Int num = w.at(i, j) * w.at(k, k) - w.at(i, k) * w.at(k, j);
        mpz_divexact(w.at(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
      w.at(i, k) = 0;
    }
    prev = w.at(k, k);
  }
  Int d = w.at(n - 1, n - 1);
  if (sign < 0) d = -d;
  return d;
}

std::size_t IMat::max_entry_bits() const {
  std::size_t best = 0;
  for (const Int& z : a_) {
    if (z == 0) continue;
    best = std::max(best, mpz_sizeinbase(z.get_mpz_t(), 2));
  }
  return best;
}

std::uint64_t IMat::fingerprint() const {
  // FNV-1a over a 64-bit digest of each entry (low limb, bit length, sign)
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t x) {
    h ^= x;
    h *= 1099511628211ull;
  };
  mix(rows_);
  mix(cols_);
  for (const Int& z : a_) {
    const std::uint64_t low = mpz_get_ui(z.get_mpz_t());
    const std::uint64_t bits = (z == 0) ? 0 : mpz_sizeinbase(z.get_mpz_t(), 2);
    const std::uint64_t neg = sgn(z) < 0 ? 0x9e3779b97f4a7c15ull : 0;
    mix(low ^ (bits << 48) ^ neg);
  }
  return h;
}

Int vec_gcd(const IVec& v) {
  Int g = 0;
  for (const Int& x : v) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

bool is_primitive(const IVec& v) { return vec_gcd(v) == 1; }

bool lex_less(const IVec& a, const IVec& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    int c = cmp(a[i], b[i]);
    if (c != 0) return c < 0;
  }
  return a.size() < b.size();
}

RowKernel row_kernel(const IVec& g) {
  const std::size_t n = g.size();
  bool any = false;
  for (const Int& x : g)
    if (x != 0) any = true;
  if (!any) throw validation_error("row_kernel: zero row has no gcd witness");

  // Column gcd sweep: after processing, t = (d, 0, ..., 0) and the tracked
  // column operations live in V, so column 0 of V is a particular solution
  // of g.x = d and columns 1..n-1 span the kernel lattice.
  IVec t = g;
  IMat V = IMat::identity(n);
  for (std::size_t i = 1; i < n; ++i) {
    if (t[i] == 0) continue;
    if (t[0] == 0) {
      // swap columns 0 and i
      std::swap(t[0], t[i]);
      for (std::size_t r = 0; r < n; ++r) std::swap(V.at(r, 0), V.at(r, i));
      continue;
    }
    Int gg, x, y;
    mpz_gcdext(gg.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), t[0].get_mpz_t(), t[i].get_mpz_t());
    Int a0 = t[0] / gg, ai = t[i] / gg;
    for (std::size_t r = 0; r < n; ++r) {
      Int c0 = V.at(r, 0), ci = V.at(r, i);
      V.at(r, 0) = x * c0 + y * ci;
      V.at(r, i) = a0 * ci - ai * c0;
    }
    t[0] = gg;
    t[i] = 0;
  }
  if (t[0] < 0) {
    t[0] = -t[0];
    for (std::size_t r = 0; r < n; ++r) V.at(r, 0) = -V.at(r, 0);
  }
  RowKernel k;
  k.d = t[0];
  k.particular.resize(n);
  for (std::size_t r = 0; r < n; ++r) k.particular[r] = V.at(r, 0);
  for (std::size_t c = 1; c < n; ++c) {
    IVec b(n);
    for (std::size_t r = 0; r < n; ++r) b[r] = V.at(r, c);
    k.basis.push_back(std::move(b));
  }
  return k;
}

IMat complete_primitive_row(const IVec& c) {
  const std::size_t n = c.size();
  if (n == 0 || vec_gcd(c) != 1) throw validation_error("complete_primitive_row: primitive vector required");

  // Reduce c to e_1 by unimodular column ops while applying the inverse op
  // to the rows of W; the invariant c = t . W makes the first row of W equal
  // to c once t = e_1.
  IVec t = c;
  IMat W = IMat::identity(n);
  for (std::size_t i = 1; i < n; ++i) {
    if (t[i] == 0) continue;
    if (t[0] == 0) {
      std::swap(t[0], t[i]);
      for (std::size_t j = 0; j < n; ++j) std::swap(W.at(0, j), W.at(i, j));
      continue;
    }
    Int gg, x, y;
    mpz_gcdext(gg.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), t[0].get_mpz_t(), t[i].get_mpz_t());
    Int a0 = t[0] / gg, ai = t[i] / gg;
    // column op E = [[x, -ai],[y, a0]] applied to t; E^-1 = [[a0, ai],[-y, x]]
    // applied to rows (0, i) of W keeps c = t . W
    for (std::size_t j = 0; j < n; ++j) {
      Int r0 = W.at(0, j), ri = W.at(i, j);
      W.at(0, j) = a0 * r0 + ai * ri;
      W.at(i, j) = x * ri - y * r0;
    }
    t[0] = gg;
    t[i] = 0;
  }
  if (t[0] == -1) {
    t[0] = 1;
    for (std::size_t j = 0; j < n; ++j) W.at(0, j) = -W.at(0, j);
  }
  return W;
}

std::vector<Int> smith_divisors(const IMat& m) {
  IMat a = m;
  const std::size_t rows = a.rows(), cols = a.cols();
  const std::size_t steps = std::min(rows, cols);
  std::vector<Int> divs;

  for (std::size_t t = 0; t < steps; ++t) {
    // locate smallest nonzero |entry| in the trailing block
    std::size_t pi = t, pj = t;
    bool found = false;
    for (std::size_t i = t; i < rows; ++i)
      for (std::size_t j = t; j < cols; ++j) {
        if (a.at(i, j) == 0) continue;
        if (!found || mpz_cmpabs(a.at(i, j).get_mpz_t(), a.at(pi, pj).get_mpz_t()) < 0) {
          pi = i;
          pj = j;
          found = true;
        }
      }
    if (!found) break;
    for (std::size_t j = 0; j < cols; ++j) std::swap(a.at(t, j), a.at(pi, j));
    for (std::size_t i = 0; i < rows; ++i) std::swap(a.at(i, t), a.at(i, pj));

    bool again = true;
    while (again) {
      again = false;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (a.at(i, t) == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), a.at(i, t).get_mpz_t(), a.at(t, t).get_mpz_t());
        for (std::size_t j = t; j < cols; ++j) a.at(i, j) -= q * a.at(t, j);
        if (a.at(i, t) != 0) {
          // remainder strictly smaller than the pivot: promote it
          for (std::size_t j = t; j < cols; ++j) std::swap(a.at(t, j), a.at(i, j));
          again = true;
        }
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (a.at(t, j) == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), a.at(t, j).get_mpz_t(), a.at(t, t).get_mpz_t());
        for (std::size_t i = t; i < rows; ++i) a.at(i, j) -= q * a.at(i, t);
        if (a.at(t, j) != 0) {
          for (std::size_t i = t; i < rows; ++i) std::swap(a.at(i, t), a.at(i, j));
          again = true;
        }
      }
      if (!again) {
        // divisibility pass: the pivot must divide the whole trailing block
        for (std::size_t i = t + 1; i < rows && !again; ++i)
          for (std::size_t j = t + 1; j < cols && !again; ++j) {
            if (a.at(i, j) == 0) continue;
            Int r;
            mpz_fdiv_r(r.get_mpz_t(), a.at(i, j).get_mpz_t(), a.at(t, t).get_mpz_t());
            if (r != 0) {
              for (std::size_t jj = t; jj < cols; ++jj) a.at(t, jj) += a.at(i, jj);
              again = true;
            }
          }
      }
    }
    Int d = a.at(t, t);
    if (d < 0) d = -d;
    divs.push_back(d);
  }
  return divs;
}

QVec to_qvec(const IVec& v) {
  QVec q(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) q[i] = Rat(v[i]);
  return q;
}

QMat::QMat(const IMat& m) : rows_(m.rows()), cols_(m.cols()), a_(m.rows() * m.cols()) {
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) at(i, j) = Rat(m.at(i, j));
}

QVec QMat::row(std::size_t i) const {
  QVec r(cols_);
  for (std::size_t j = 0; j < cols_; ++j) r[j] = at(i, j);
  return r;
}

QVec QMat::operator*(const QVec& v) const {
  if (cols_ != v.size()) throw validation_error("matrix-vector product: dimensions differ");
  QVec r(rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (at(i, j) != 0) r[i] += at(i, j) * v[j];
  return r;
}

std::vector<std::size_t> QMat::rref() {
  std::vector<std::size_t> pivots;
  std::size_t lead = 0;
  for (std::size_t col = 0; col < cols_ && lead < rows_; ++col) {
    std::size_t p = lead;
    while (p < rows_ && at(p, col) == 0) ++p;
    if (p == rows_) continue;
    if (p != lead)
      for (std::size_t j = 0; j < cols_; ++j) std::swap(at(lead, j), at(p, j));
    Rat inv = at(lead, col);
    for (std::size_t j = 0; j < cols_; ++j) at(lead, j) /= inv;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == lead || at(i, col) == 0) continue;
      Rat f = at(i, col);
      for (std::size_t j = 0; j < cols_; ++j) at(i, j) -= f * at(lead, j);
    }
    pivots.push_back(col);
    ++lead;
  }
  return pivots;
}

std::vector<QVec> QMat::kernel() const {
  QMat w = *this;
  std::vector<std::size_t> pivots = w.rref();
  std::vector<bool> is_pivot(cols_, false);
  for (std::size_t c : pivots) is_pivot[c] = true;
  std::vector<QVec> basis;
  for (std::size_t free = 0; free < cols_; ++free) {
    if (is_pivot[free]) continue;
    QVec v(cols_);
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -w.at(r, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

QVec QMat::solve(const QVec& b) const {
  if (!rows_ || rows_ != cols_ || b.size() != rows_)
    throw validation_error("solve: square system required");
  QMat aug(rows_, cols_ + 1);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) aug.at(i, j) = at(i, j);
    aug.at(i, cols_) = b[i];
  }
  std::vector<std::size_t> pivots = aug.rref();
  if (pivots.size() != rows_ || pivots.back() == cols_)
    throw validation_error("solve: singular system");
  QVec x(cols_);
  for (std::size_t i = 0; i < rows_; ++i) x[pivots[i]] = aug.at(i, cols_);
  return x;
}

void SpanBuilder::reduce(QVec& v) const {
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const Rat& c = v[pivots_[r]];
    if (c == 0) continue;
    Rat f = c;
    for (std::size_t j = 0; j < dim_; ++j) v[j] -= f * rows_[r][j];
  }
}

bool SpanBuilder::add(QVec v) {
  if (v.size() != dim_) throw validation_error("span add: dimension mismatch");
  reduce(v);
  std::size_t piv = dim_;
  for (std::size_t j = 0; j < dim_; ++j)
    if (v[j] != 0) {
      piv = j;
      break;
    }
  if (piv == dim_) return false;
  Rat inv = v[piv];
  for (std::size_t j = 0; j < dim_; ++j) v[j] /= inv;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    Rat f = rows_[r][piv];
    if (f == 0) continue;
    for (std::size_t j = 0; j < dim_; ++j) rows_[r][j] -= f * v[j];
  }
  std::size_t pos = 0;
  while (pos < pivots_.size() && pivots_[pos] < piv) ++pos;
  rows_.insert(rows_.begin() + pos, std::move(v));
  pivots_.insert(pivots_.begin() + pos, piv);
  return true;
}

bool SpanBuilder::contains(QVec v) const {
  if (v.size() != dim_) throw validation_error("span contains: dimension mismatch");
  reduce(v);
  for (const Rat& x : v)
    if (x != 0) return false;
  return true;
}

}  // namespace salemforge
