#include "salemforge/isometry.hpp"

#include <cstddef>
#include <stdexcept>
#include <utility>

#include "salemforge/errors.hpp"

namespace salemforge {

namespace {

// Rational Gauss-Jordan on [A | I]. Only called for |det A| = 1, where the
// inverse is integral again.
IMat int_inverse(const IMat& a) {
  const std::size_t n = a.rows();
  QMat aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = Rat(a.at(i, j));
    aug.at(i, n + i) = 1;
  }
  std::vector<std::size_t> pivots = aug.rref();
  if (pivots.size() != n || pivots.back() != n - 1)
    throw std::logic_error("unimodular matrix failed to invert");
  IMat out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Rat& r = aug.at(i, n + j);
      if (r.get_den() != 1) throw std::logic_error("inverse of a unimodular matrix must be integral");
      out.at(i, j) = r.get_num();
    }
  }
  return out;
}

void require_same_form(const Isometry& a, const Isometry& b) {
  if (a.lattice()->rank() != b.lattice()->rank() || a.lattice()->gram() != b.lattice()->gram())
    throw validation_error("isometries live over different lattices");
}

}  // namespace

Isometry validate(IMat m, std::shared_ptr<const GramLattice> l) {
  if (!l) throw validation_error("isometry needs a lattice");
  if (!m.is_square() || m.rows() != l->rank())
    throw validation_error("matrix size does not match the lattice rank");
  const IMat& g = l->gram();
  if (m.transpose() * g * m != g) throw validation_error("matrix does not preserve the form");
  Int dt = m.det();
  int det_sign;
  if (dt == 1) {
    det_sign = 1;
  } else if (dt == -1) {
    det_sign = -1;
  } else {
    // A nondegenerate form forces det^2 = 1, so this fires only on
    // degenerate lattices, which carry no isometry group worth the name.
    throw validation_error("form-preserving matrix with determinant " + dt.get_str() +
                           "; the lattice is degenerate");
  }
  bool cone = true;
  if (l->cone_reference()) {
    const IVec& v = *l->cone_reference();
    IVec mv = m * v;
    cone = sgn(l->inner(mv, v)) > 0;
  }
  return Isometry(std::move(m), std::move(l), det_sign, cone);
}

bool in_so_plus(const Isometry& g) { return g.det_sign() == 1 && g.cone_preserving(); }

Isometry Isometry::inverse() const { return validate(int_inverse(matrix_), lattice_); }

Isometry Isometry::operator*(const Isometry& o) const {
  require_same_form(*this, o);
  return validate(matrix_ * o.matrix_, lattice_);
}

Isometry eichler(std::shared_ptr<const GramLattice> l, const IVec& e, const IVec& a) {
  if (!l) throw validation_error("transvection needs a lattice");
  const std::size_t n = l->rank();
  if (e.size() != n || a.size() != n)
    throw validation_error("vector length does not match the lattice rank");
  if (!is_primitive(e)) throw validation_error("transvection center must be primitive");
  if (l->norm(e) != 0) throw validation_error("transvection center must be isotropic");
  if (l->inner(e, a) != 0) throw validation_error("transvection vector must be orthogonal to the center");
  Int aa = l->norm(a);
  if (mpz_odd_p(aa.get_mpz_t()))
    throw validation_error("transvection vector has odd norm; this needs an even lattice");
  Int h = aa / 2;
  IVec ge = l->gram() * e;
  IVec ga = l->gram() * a;
  // x -> x + (x,e)a - (x,a)e - ((a,a)/2)(x,e)e, columnwise on unit vectors
  IMat m = IMat::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m.at(i, j) += a[i] * ge[j] - e[i] * ga[j] - h * e[i] * ge[j];
  return validate(std::move(m), std::move(l));
}

ParabolicGroup parabolic_group(std::shared_ptr<const GramLattice> l, const IVec& e) {
  if (!l) throw validation_error("parabolic group needs a lattice");
  const std::size_t n = l->rank();
  if (e.size() != n) throw validation_error("vector length does not match the lattice rank");
  if (!l->is_hyperbolic())
    throw validation_error("parabolic groups need a hyperbolic lattice, signature (1, 0, n-1)");
  if (!is_primitive(e)) throw validation_error("e must be primitive");
  if (l->norm(e) != 0) throw validation_error("e must be isotropic");

  IVec ge = l->gram() * e;
  RowKernel ker = row_kernel(ge);
  const std::size_t k = ker.basis.size();  // n - 1; the form is nondegenerate

  // Coordinates of e in the kernel basis. The kernel of x -> (x,e) is a
  // direct summand of Z^n, so a primitive e has integral, primitive
  // coordinates in any of its bases.
  QMat aug(n, k + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) aug.at(i, j) = Rat(ker.basis[j][i]);
    aug.at(i, k) = Rat(e[i]);
  }
  std::vector<std::size_t> pivots = aug.rref();
  if (pivots.size() != k || (k > 0 && pivots.back() >= k))
    throw std::logic_error("kernel basis failed to express e");
  IVec c(k);
  for (std::size_t j = 0; j < k; ++j) {
    const Rat& r = aug.at(j, k);
    if (r.get_den() != 1) throw std::logic_error("e has fractional kernel coordinates");
    c[j] = r.get_num();
  }
  for (std::size_t i = 0; i < n; ++i) {
    Int s = 0;
    for (std::size_t j = 0; j < k; ++j) s += c[j] * ker.basis[j][i];
    if (s != e[i]) throw std::logic_error("kernel coordinates of e do not rebuild e");
  }

  // Change basis inside the kernel so the first vector becomes e itself;
  // the remaining rows are the w_j.
  IMat w = complete_primitive_row(c);
  std::vector<IVec> ws;
  for (std::size_t t = 1; t < k; ++t) {
    IVec wt(n, 0);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i) wt[i] += w.at(t, j) * ker.basis[j][i];
    ws.push_back(std::move(wt));
  }

  // u = particular / d has (e,u) = 1 with the least possible denominator:
  // (e, q u) integral forces d | q.
  QVec u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = Rat(ker.particular[i]) / Rat(ker.d);

  ParabolicGroup out;
  out.lattice = l;
  out.e = e;
  out.basis_witness.push_back(to_qvec(e));
  for (const IVec& wt : ws) out.basis_witness.push_back(to_qvec(wt));
  out.basis_witness.push_back(u);
  for (const IVec& wt : ws) out.generators.push_back(eichler(l, e, wt));

  // b(g) = w-part of g(u) - u in the witness basis; nonzero independent
  // b vectors certify that the group is free abelian of rank r.
  const std::size_t r = out.generators.size();
  QMat bm(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    bm.at(i, 0) = Rat(e[i]);
    for (std::size_t t = 0; t < r; ++t) bm.at(i, 1 + t) = Rat(ws[t][i]);
    bm.at(i, r + 1) = u[i];
  }
  SpanBuilder independent(r);
  for (const Isometry& g : out.generators) {
    QVec gu = QMat(g.matrix()) * u;
    QVec delta(n);
    for (std::size_t i = 0; i < n; ++i) delta[i] = gu[i] - u[i];
    QVec x = bm.solve(delta);
    if (x[r + 1] != 0) throw std::logic_error("generator moved u out of u + span(e, w)");
    QVec b(x.begin() + 1, x.begin() + 1 + static_cast<std::ptrdiff_t>(r));
    if (!independent.add(b)) throw std::logic_error("translation vectors are linearly dependent");
    out.b_vectors.push_back(std::move(b));
  }
  return out;
}

bool Subspace::contains(const QVec& v) const {
  if (v.size() != ambient) return false;
  QVec rem = v;
  for (const QVec& row : basis) {
    std::size_t p = 0;
    while (p < row.size() && row[p] == 0) ++p;
    if (p == row.size() || rem[p] == 0) continue;
    Rat c = rem[p];  // pivot entry of row is 1
    for (std::size_t j = p; j < rem.size(); ++j) rem[j] -= c * row[j];
  }
  for (const Rat& x : rem)
    if (x != 0) return false;
  return true;
}

Subspace orbit_span(const std::vector<Isometry>& gens, const QVec& v) {
  const std::size_t n = v.size();
  std::vector<QMat> mats;
  mats.reserve(gens.size());
  for (const Isometry& g : gens) {
    if (g.matrix().rows() != n)
      throw validation_error("seed dimension does not match the generators");
    require_same_form(gens.front(), g);
    mats.emplace_back(g.matrix());
  }
  SpanBuilder sb(n);
  std::vector<QVec> frontier;
  if (sb.add(v)) frontier.push_back(v);
  while (!frontier.empty()) {
    QVec x = std::move(frontier.back());
    frontier.pop_back();
    for (const QMat& m : mats) {
      QVec y = m * x;
      QVec z(n);
      for (std::size_t i = 0; i < n; ++i) z[i] = y[i] - x[i];
      if (sb.add(y)) frontier.push_back(std::move(y));
      if (sb.add(z)) frontier.push_back(std::move(z));
    }
  }
  return Subspace{n, sb.basis()};
}

Subspace fixed_subspace(const std::vector<Isometry>& gens) {
  if (gens.empty()) throw validation_error("fixed subspace needs at least one isometry");
  const std::size_t n = gens.front().matrix().rows();
  for (const Isometry& g : gens) require_same_form(gens.front(), g);
  QMat stacked(gens.size() * n, n);
  for (std::size_t t = 0; t < gens.size(); ++t)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Rat x(gens[t].matrix().at(i, j));
        if (i == j) x -= 1;
        stacked.at(t * n + i, j) = x;
      }
  SpanBuilder sb(n);
  for (const QVec& v : stacked.kernel()) sb.add(v);
  return Subspace{n, sb.basis()};
}

}  // namespace salemforge
