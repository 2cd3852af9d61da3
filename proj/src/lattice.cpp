#include "salemforge/lattice.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "salemforge/errors.hpp"
#include "salemforge/intpoly.hpp"

namespace salemforge {

Signature signature_of(const IMat& gram) {
  if (!gram.is_square()) throw validation_error("signature needs a square matrix");
  if (!gram.is_symmetric()) throw validation_error("signature needs a symmetric matrix");
  IntPolynomial p = char_poly(gram);
  Signature s;
  // Zero eigenvalues are the trailing zero coefficients; the rest of the
  // spectrum is real (symmetric matrix), counted by Sturm chains. A root of
  // multiplicity m stays a distinct root of the first m repeated-gcd
  // reductions, so summing distinct counts over the chain restores
  // multiplicities.
  const auto& c = p.coeffs();
  std::size_t z = 0;
  while (z < c.size() && c[z] == 0) ++z;
  s.zero = static_cast<unsigned>(z);
  IntPolynomial q{std::vector<Int>(c.begin() + static_cast<long>(z), c.end())};
  if (q.degree() >= 1) {
    Rat b = cauchy_root_bound(q);
    IntPolynomial m = q;
    while (m.degree() >= 1) {
      s.pos += sturm_count(m, Rat(0), b);
      s.neg += sturm_count(m, -b, Rat(0));
      m = poly_gcd(m, m.derivative());
    }
  }
  if (s.pos + s.zero + s.neg != gram.rows())
    throw validation_error("inertia count mismatch");
  return s;
}

namespace {

bool rows_zero_outside(const IMat& g, std::size_t i, std::size_t j) {
  for (std::size_t k = 0; k < g.cols(); ++k) {
    if (k == i || k == j) continue;
    if (g.at(i, k) != 0 || g.at(j, k) != 0) return false;
  }
  return true;
}

// Deterministic positive-norm vector for signature (1,0,n): prefer the sum
// of the two rays of a leading hyperbolic-plane block, then unit vectors,
// then signed pairs, then a bounded odometer sweep.
std::optional<IVec> pick_cone_reference(const IMat& g, const Signature& s) {
  const std::size_t n = g.rows();
  if (!(s.pos == 1 && s.zero == 0)) return std::nullopt;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (g.at(i, i) == 0 && g.at(j, j) == 0 && g.at(i, j) != 0 && rows_zero_outside(g, i, j)) {
        IVec v(n, Int(0));
        v[i] = 1;
        v[j] = g.at(i, j) > 0 ? 1 : -1;
        return v;
      }
  for (std::size_t i = 0; i < n; ++i)
    if (g.at(i, i) > 0) {
      IVec v(n, Int(0));
      v[i] = 1;
      return v;
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (int sign : {1, -1}) {
        Int q = g.at(i, i) + g.at(j, j) + 2 * sign * g.at(i, j);
        if (q > 0) {
          IVec v(n, Int(0));
          v[i] = 1;
          v[j] = sign;
          return v;
        }
      }
  const std::size_t m = std::min<std::size_t>(n, 8);
  std::vector<long> w(m, -2);
  while (true) {
    IVec v(n, Int(0));
    for (std::size_t k = 0; k < m; ++k) v[k] = w[k];
    Int q = 0;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) q += v[a] * g.at(a, b) * v[b];
    if (q > 0) return v;
    std::size_t k = 0;
    while (k < m && w[k] == 2) w[k++] = -2;
    if (k == m) break;
    ++w[k];
  }
  throw validation_error("found no positive vector to fix the cone");
}

}  // namespace

GramLattice::GramLattice(std::string name, IMat gram, bool require_even)
    : name_(std::move(name)), gram_(std::move(gram)) {
  if (!gram_.is_square() || gram_.rows() == 0)
    throw validation_error("Gram matrix must be square and nonempty");
  if (!gram_.is_symmetric()) throw validation_error("Gram matrix must be symmetric");
  if (require_even)
    for (std::size_t i = 0; i < gram_.rows(); ++i)
      if (gram_.at(i, i) % 2 != 0)
        throw validation_error("lattice is not even: odd diagonal entry");
  sig_ = signature_of(gram_);
  cone_ref_ = pick_cone_reference(gram_, sig_);
}

bool GramLattice::is_even() const {
  for (std::size_t i = 0; i < gram_.rows(); ++i)
    if (gram_.at(i, i) % 2 != 0) return false;
  return true;
}

bool GramLattice::is_hyperbolic() const {
  return sig_.pos == 1 && sig_.zero == 0 && sig_.neg + 1 == rank();
}

Int GramLattice::inner(const IVec& x, const IVec& y) const {
  if (x.size() != rank() || y.size() != rank())
    throw validation_error("vector length does not match the lattice rank");
  Int acc = 0;
  for (std::size_t i = 0; i < rank(); ++i) {
    if (x[i] == 0) continue;
    Int row = 0;
    for (std::size_t j = 0; j < rank(); ++j) row += gram_.at(i, j) * y[j];
    acc += x[i] * row;
  }
  return acc;
}

namespace {

IMat gram_u() {
  IMat m(2, 2);
  m.at(0, 1) = 1;
  m.at(1, 0) = 1;
  return m;
}

// Root lattices, negative definite: diagonal -2, +1 on Dynkin edges.
IMat gram_from_edges(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  IMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = -2;
  for (auto [a, b] : edges) {
    m.at(a, b) = 1;
    m.at(b, a) = 1;
  }
  return m;
}

IMat gram_a(unsigned n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return gram_from_edges(n, e);
}

IMat gram_d(unsigned n) {
  // Path on the first n-1 nodes, fork to the last.
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i + 2 < n; ++i) e.emplace_back(i, i + 1);
  e.emplace_back(n - 3, n - 1);
  return gram_from_edges(n, e);
}

IMat gram_e(unsigned n) {
  // Chain 1-3-4-...-n with node 2 attached to node 4 (1-based).
  std::vector<std::pair<std::size_t, std::size_t>> e{{0, 2}, {1, 3}};
  for (std::size_t i = 2; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return gram_from_edges(n, e);
}

struct Cursor {
  const std::string& s;
  std::size_t i = 0;

  void ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool done() {
    ws();
    return i >= s.size();
  }
  bool take(char c) {
    ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!take(c))
      throw validation_error(std::string("lattice expression: expected '") + c + "'");
  }
};

Int parse_integer(Cursor& c) {
  c.ws();
  std::size_t start = c.i;
  if (c.i < c.s.size() && (c.s[c.i] == '-' || c.s[c.i] == '+')) ++c.i;
  std::size_t digits = c.i;
  while (c.i < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.i]))) ++c.i;
  if (c.i == digits) throw validation_error("lattice expression: expected an integer");
  return Int(c.s.substr(start, c.i - start));
}

unsigned parse_index(Cursor& c) {
  c.ws();
  std::size_t start = c.i;
  while (c.i < c.s.size() && std::isdigit(static_cast<unsigned char>(c.s[c.i]))) ++c.i;
  if (c.i == start) throw validation_error("lattice expression: expected a subscript");
  unsigned long v = std::stoul(c.s.substr(start, c.i - start));
  return static_cast<unsigned>(v);
}

IMat parse_literal(Cursor& c, std::string& canon) {
  c.expect('[');
  std::vector<IVec> rows;
  bool first_row = true;
  while (true) {
    if (!first_row && !c.take(',')) break;
    if (first_row && c.take(']')) throw validation_error("lattice expression: empty literal");
    c.expect('[');
    IVec row;
    if (!c.take(']')) {
      row.push_back(parse_integer(c));
      while (c.take(',')) row.push_back(parse_integer(c));
      c.expect(']');
    }
    if (row.empty()) throw validation_error("lattice expression: empty literal row");
    rows.push_back(std::move(row));
    first_row = false;
  }
  c.expect(']');
  for (const auto& r : rows)
    if (r.size() != rows[0].size())
      throw validation_error("lattice expression: ragged literal rows");
  IMat m(rows.size(), rows[0].size());
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << (i ? ",[" : "[");
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m.at(i, j) = rows[i][j];
      os << (j ? "," : "") << rows[i][j].get_str();
    }
    os << "]";
  }
  os << "]";
  canon = os.str();
  return m;
}

IMat parse_term(Cursor& c, std::string& canon) {
  c.ws();
  if (c.i < c.s.size() && c.s[c.i] == '[') return parse_literal(c, canon);
  if (c.i >= c.s.size()) throw validation_error("lattice expression: missing term");
  char kind = c.s[c.i];
  IMat m;
  std::string base;
  if (kind == 'U') {
    ++c.i;
    m = gram_u();
    base = "U";
  } else if (kind == 'A' || kind == 'D' || kind == 'E') {
    ++c.i;
    unsigned n = parse_index(c);
    if (kind == 'A') {
      if (n < 1) throw validation_error("A-series needs subscript >= 1");
      m = gram_a(n);
    } else if (kind == 'D') {
      if (n < 3) throw validation_error("D-series needs subscript >= 3");
      m = gram_d(n);
    } else {
      if (n < 6 || n > 8) throw validation_error("E-series subscript must be 6, 7 or 8");
      m = gram_e(n);
    }
    base = std::string(1, kind) + std::to_string(n);
  } else {
    throw validation_error(std::string("lattice expression: unknown atom '") + kind + "'");
  }
  if (c.take('(')) {
    Int scale = parse_integer(c);
    c.expect(')');
    if (scale == 0) throw validation_error("lattice scaling must be nonzero");
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j) *= scale;
    if (scale != 1) base += "(" + scale.get_str() + ")";
  }
  canon = base;
  return m;
}

IMat block_sum(const IMat& a, const IMat& b) {
  IMat m(a.rows() + b.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m.at(i, j) = a.at(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) m.at(a.rows() + i, a.cols() + j) = b.at(i, j);
  return m;
}

}  // namespace

GramLattice build_lattice(const std::string& expr, bool require_even) {
  Cursor c{expr};
  std::string canon;
  IMat m = parse_term(c, canon);
  std::string name = canon;
  while (c.take('+')) {
    IMat t = parse_term(c, canon);
    m = block_sum(m, t);
    name += "+" + canon;
  }
  if (!c.done()) throw validation_error("lattice expression: trailing input");
  return GramLattice(name, std::move(m), require_even);
}

DiscriminantProfile discriminant(const GramLattice& l) {
  if (l.gram().det() == 0)
    throw validation_error("discriminant group needs a nondegenerate Gram matrix");
  DiscriminantProfile out;
  out.group_order = 1;
  for (const Int& d : smith_divisors(l.gram())) {
    if (d <= 1) continue;
    out.elementary_divisors.push_back(d);
    out.group_order *= d;
  }
  const auto& e = out.elementary_divisors;
  if (!e.empty() && e.size() % 2 == 0) {
    bool same = std::all_of(e.begin(), e.end(), [&](const Int& d) { return d == e[0]; });
    if (same && mpz_probab_prime_p(e[0].get_mpz_t(), 40) > 0)
      out.p_elementary = std::make_pair(e[0], static_cast<unsigned>(e.size() / 2));
  }
  return out;
}

namespace {

struct CoordBlock {
  std::vector<std::size_t> idx;
  // All coordinate boxes of the block keyed by their norm.
  std::map<Int, std::vector<std::vector<long>>> by_norm;
};

std::vector<std::vector<std::size_t>> connected_blocks(const IMat& g) {
  const std::size_t n = g.rows();
  std::vector<int> comp(n, -1);
  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t start = 0; start < n; ++start) {
    if (comp[start] >= 0) continue;
    std::vector<std::size_t> stack{start}, members;
    comp[start] = static_cast<int>(blocks.size());
    while (!stack.empty()) {
      std::size_t i = stack.back();
      stack.pop_back();
      members.push_back(i);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && g.at(i, j) != 0 && comp[j] < 0) {
          comp[j] = comp[start];
          stack.push_back(j);
        }
    }
    std::sort(members.begin(), members.end());
    blocks.push_back(std::move(members));
  }
  return blocks;
}

}  // namespace

std::vector<IVec> find_isotropic(const GramLattice& l, unsigned height_bound) {
  if (height_bound == 0) throw validation_error("height bound must be positive");
  const auto& s = l.signature();
  if (s.pos > 0 && s.zero == 0 && s.neg == 0)
    throw validation_error("definite lattice has no isotropic vectors (no cone)");
  if (!l.is_hyperbolic())
    throw validation_error("isotropic search needs hyperbolic signature (1, 0, n)");
  const IMat& g = l.gram();
  const long h = static_cast<long>(height_bound);

  // The Gram splits into connected blocks; a vector is isotropic iff its
  // per-block norms sum to zero. Enumerate each block's box once, then walk
  // the combinations whose norm sums can still reach zero.
  std::vector<CoordBlock> blocks;
  for (auto& idx : connected_blocks(g)) {
    double box = std::pow(2.0 * static_cast<double>(h) + 1.0, static_cast<double>(idx.size()));
    if (box > 2e7)
      throw validation_error("isotropic enumeration infeasible: block too large for this bound");
    CoordBlock b;
    b.idx = std::move(idx);
    const std::size_t m = b.idx.size();
    std::vector<long> w(m, -h);
    while (true) {
      Int norm = 0;
      for (std::size_t a = 0; a < m; ++a) {
        if (w[a] == 0) continue;
        for (std::size_t bb = 0; bb < m; ++bb)
          if (w[bb] != 0) norm += Int(w[a]) * g.at(b.idx[a], b.idx[bb]) * Int(w[bb]);
      }
      b.by_norm[norm].push_back(w);
      std::size_t k = 0;
      while (k < m && w[k] == h) w[k++] = -h;
      if (k == m) break;
      ++w[k];
    }
    blocks.push_back(std::move(b));
  }

  const std::size_t nb = blocks.size();
  std::vector<std::set<Int>> reach(nb + 1);
  reach[nb].insert(Int(0));
  for (std::size_t k = nb; k-- > 0;) {
    for (const auto& kv : blocks[k].by_norm)
      for (const Int& t : reach[k + 1]) {
        reach[k].insert(kv.first + t);
        if (reach[k].size() > 1000000)
          throw validation_error("isotropic enumeration infeasible: norm spread too large");
      }
  }

  std::set<IVec, bool (*)(const IVec&, const IVec&)> found(&lex_less);
  IVec assembly(l.rank(), Int(0));
  std::size_t emitted = 0;

  std::function<void(std::size_t, const Int&)> walk = [&](std::size_t k, const Int& remaining) {
    if (k == nb) {
      if (remaining != 0) return;
      IVec v = assembly;
      Int gcd = vec_gcd(v);
      if (gcd == 0) return;  // zero vector
      if (gcd > 1)
        for (auto& x : v) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), gcd.get_mpz_t());
      for (const auto& x : v) {
        if (x == 0) continue;
        if (x < 0)
          for (auto& y : v) y = -y;
        break;
      }
      if (++emitted > 500000)
        throw validation_error("isotropic enumeration produced too many vectors; lower the bound");
      found.insert(std::move(v));
      return;
    }
    for (const auto& [norm, vecs] : blocks[k].by_norm) {
      if (!reach[k + 1].count(remaining - norm)) continue;
      for (const auto& w : vecs) {
        for (std::size_t a = 0; a < blocks[k].idx.size(); ++a) assembly[blocks[k].idx[a]] = w[a];
        walk(k + 1, remaining - norm);
      }
    }
    for (std::size_t a = 0; a < blocks[k].idx.size(); ++a) assembly[blocks[k].idx[a]] = 0;
  };
  walk(0, Int(0));

  return std::vector<IVec>(found.begin(), found.end());
}

}  // namespace salemforge
