#include "salemforge/intpoly.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

#include <mpfr.h>

#include "salemforge/errors.hpp"

namespace salemforge {

void IntPolynomial::normalize() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

IntPolynomial IntPolynomial::constant(Int v) {
  IntPolynomial p;
  if (v != 0) p.c_.push_back(std::move(v));
  return p;
}

IntPolynomial IntPolynomial::monomial(std::size_t deg, Int lead) {
  IntPolynomial p;
  if (lead != 0) {
    p.c_.assign(deg + 1, Int(0));
    p.c_.back() = std::move(lead);
  }
  return p;
}

const Int& IntPolynomial::coeff(std::size_t k) const {
  static const Int kZero(0);
  return k < c_.size() ? c_[k] : kZero;
}

const Int& IntPolynomial::leading() const {
  if (c_.empty()) throw validation_error("leading coefficient of the zero polynomial");
  return c_.back();
}

IntPolynomial IntPolynomial::operator+(const IntPolynomial& o) const {
  std::vector<Int> r(std::max(c_.size(), o.c_.size()), Int(0));
  for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
  for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
  return IntPolynomial(std::move(r));
}

IntPolynomial IntPolynomial::operator-(const IntPolynomial& o) const {
  std::vector<Int> r(std::max(c_.size(), o.c_.size()), Int(0));
  for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
  for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] -= o.c_[i];
  return IntPolynomial(std::move(r));
}

IntPolynomial IntPolynomial::operator*(const IntPolynomial& o) const {
  if (c_.empty() || o.c_.empty()) return IntPolynomial();
  std::vector<Int> r(c_.size() + o.c_.size() - 1, Int(0));
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  }
  return IntPolynomial(std::move(r));
}

IntPolynomial IntPolynomial::operator*(const Int& s) const {
  if (s == 0) return IntPolynomial();
  std::vector<Int> r(c_);
  for (auto& v : r) v *= s;
  return IntPolynomial(std::move(r));
}

IntPolynomial IntPolynomial::operator-() const {
  std::vector<Int> r(c_);
  for (auto& v : r) v = -v;
  return IntPolynomial(std::move(r));
}

IntPolynomial IntPolynomial::derivative() const {
  if (c_.size() <= 1) return IntPolynomial();
  std::vector<Int> r(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * Int(static_cast<unsigned long>(i));
  return IntPolynomial(std::move(r));
}

Int IntPolynomial::content() const {
  Int g = 0;
  for (const auto& v : c_) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

IntPolynomial IntPolynomial::primitive_part() const {
  if (c_.empty()) return IntPolynomial();
  Int g = content();
  std::vector<Int> r(c_);
  for (auto& v : r) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
  return IntPolynomial(std::move(r));
}

Int IntPolynomial::eval_int(const Int& x) const {
  Int acc = 0;
  for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
  return acc;
}

int IntPolynomial::sign_at(const Rat& x) const {
  if (c_.empty()) return 0;
  // Homogenize: sign of sum c_k num^k den^(d-k), with den > 0 canonical.
  const Int num = x.get_num();
  const Int den = x.get_den();
  Int acc = 0, dp = 1;
  for (std::size_t i = c_.size(); i-- > 0;) {
    if (i + 1 < c_.size()) dp *= den;
    acc = acc * num + c_[i] * dp;
  }
  return sgn(acc);
}

std::string IntPolynomial::to_string(const std::string& var) const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = c_.size(); i-- > 0;) {
    const Int& v = c_[i];
    if (v == 0) continue;
    Int a = v < 0 ? Int(-v) : v;
    if (first) {
      if (v < 0) os << "-";
      first = false;
    } else {
      os << (v < 0 ? " - " : " + ");
    }
    if (i == 0 || a != 1) os << a.get_str();
    if (i > 0) {
      if (a != 1) os << "*";
      os << var;
      if (i > 1) os << "^" << i;
    }
  }
  return os.str();
}

namespace {

// Quotient of num by den together with whether the division was exact.
std::optional<IntPolynomial> divide_if_exact(const IntPolynomial& num, const IntPolynomial& den) {
  if (den.is_zero()) throw validation_error("polynomial division by zero");
  if (num.is_zero()) return IntPolynomial::zero();
  if (num.degree() < den.degree()) return std::nullopt;
  std::vector<Int> rem(num.coeffs());
  const auto& d = den.coeffs();
  const Int& lead = d.back();
  std::vector<Int> q(rem.size() - d.size() + 1, Int(0));
  for (std::size_t k = q.size(); k-- > 0;) {
    Int& top = rem[k + d.size() - 1];
    if (top == 0) continue;
    if (!mpz_divisible_p(top.get_mpz_t(), lead.get_mpz_t())) return std::nullopt;
    Int f;
    mpz_divexact(f.get_mpz_t(), top.get_mpz_t(), lead.get_mpz_t());
    q[k] = f;
    for (std::size_t j = 0; j < d.size(); ++j) rem[k + j] -= f * d[j];
  }
  for (const auto& v : rem)
    if (v != 0) return std::nullopt;
  return IntPolynomial(std::move(q));
}

}  // namespace

IntPolynomial exact_divide(const IntPolynomial& num, const IntPolynomial& den) {
  auto q = divide_if_exact(num, den);
  if (!q) throw validation_error("inexact polynomial division");
  return std::move(*q);
}

std::optional<IntPolynomial> try_exact_divide(const IntPolynomial& num, const IntPolynomial& den) {
  return divide_if_exact(num, den);
}

namespace {

// Pseudo-remainder scaled by a positive constant: r ~ (a mod b) * lc(b)^k with
// the sign corrected so the returned polynomial is a positive multiple of the
// true remainder.
IntPolynomial positive_pseudo_rem(const IntPolynomial& a, const IntPolynomial& b) {
  IntPolynomial r = a;
  const Int& d = b.leading();
  unsigned mults = 0;
  while (!r.is_zero() && r.degree() >= b.degree()) {
    const int shift = r.degree() - b.degree();
    IntPolynomial sub = b * r.leading();
    r = r * d - IntPolynomial::monomial(static_cast<std::size_t>(shift), 1) * sub;
    ++mults;
  }
  if (d < 0 && (mults % 2) == 1) r = -r;
  return r;
}

IntPolynomial positive_primitive(const IntPolynomial& p) {
  IntPolynomial r = p.primitive_part();
  if (!r.is_zero() && r.leading() < 0) r = -r;
  return r;
}

}  // namespace

IntPolynomial poly_gcd(const IntPolynomial& a, const IntPolynomial& b) {
  IntPolynomial x = positive_primitive(a);
  IntPolynomial y = positive_primitive(b);
  if (x.is_zero()) return y;
  if (y.is_zero()) return x;
  if (x.degree() < y.degree()) std::swap(x, y);
  while (!y.is_zero()) {
    IntPolynomial r = positive_pseudo_rem(x, y);
    x = std::move(y);
    y = positive_primitive(r);
  }
  return x;
}

IntPolynomial squarefree_part(const IntPolynomial& p) {
  if (p.is_zero()) throw validation_error("squarefree part of the zero polynomial");
  IntPolynomial prim = positive_primitive(p);
  if (prim.degree() == 0) return IntPolynomial::one();
  IntPolynomial g = poly_gcd(prim, prim.derivative());
  return exact_divide(prim, g);
}

IntPolynomial char_poly(const IMat& m) {
  if (m.rows() != m.cols()) throw validation_error("characteristic polynomial of a non-square matrix");
  const std::size_t n = m.rows();
  // Samuelson-Berkowitz: fold in one leading principal row/column at a time,
  // multiplying the coefficient vector by a Toeplitz column built from
  // R S^k C products. Division-free, exact over the integers.
  std::vector<Int> p{Int(1)};  // descending coefficients
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<Int> tcol(r + 2, Int(0));
    tcol[0] = 1;
    tcol[1] = -m.at(r, r);
    if (r >= 1) {
      IVec v(r);
      for (std::size_t i = 0; i < r; ++i) v[i] = m.at(i, r);
      for (std::size_t k = 2; k <= r + 1; ++k) {
        Int q = 0;
        for (std::size_t j = 0; j < r; ++j) q += m.at(r, j) * v[j];
        tcol[k] = -q;
        if (k <= r) {
          IVec nv(r, Int(0));
          for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j)
              if (m.at(i, j) != 0) nv[i] += m.at(i, j) * v[j];
          v = std::move(nv);
        }
      }
    }
    std::vector<Int> np(p.size() + 1, Int(0));
    for (std::size_t i = 0; i < np.size(); ++i)
      for (std::size_t j = 0; j < p.size() && j <= i; ++j)
        if (i - j < tcol.size()) np[i] += tcol[i - j] * p[j];
    p = std::move(np);
  }
  std::reverse(p.begin(), p.end());
  return IntPolynomial(std::move(p));
}

unsigned euler_phi(unsigned n) {
  unsigned result = n;
  for (unsigned p = 2; static_cast<unsigned long long>(p) * p <= n; ++p) {
    if (n % p) continue;
    while (n % p == 0) n /= p;
    result -= result / p;
  }
  if (n > 1) result -= result / n;
  return result;
}

IntPolynomial cyclotomic(unsigned n) {
  if (n == 0) throw validation_error("cyclotomic index must be positive");
  static std::map<unsigned, IntPolynomial> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  // t^n - 1 = prod_{d | n} Phi_d; divide out the proper divisors.
  std::vector<unsigned> stack{n};
  while (!stack.empty()) {
    unsigned k = stack.back();
    bool ready = true;
    for (unsigned d = 1; d < k; ++d) {
      if (k % d == 0 && !cache.count(d)) {
        stack.push_back(d);
        ready = false;
      }
    }
    if (!ready) continue;
    stack.pop_back();
    if (cache.count(k)) continue;
    std::vector<Int> tn(k + 1, Int(0));
    tn[0] = -1;
    tn[k] = 1;
    IntPolynomial r{std::move(tn)};
    for (unsigned d = 1; d < k; ++d)
      if (k % d == 0) r = exact_divide(r, cache.at(d));
    cache.emplace(k, std::move(r));
  }
  return cache.at(n);
}

std::vector<std::pair<unsigned, IntPolynomial>> cyclotomics_up_to_degree(unsigned max_degree) {
  std::vector<std::pair<unsigned, IntPolynomial>> out;
  if (max_degree == 0) return out;
  // phi(n) >= sqrt(n/2), so every n with phi(n) <= D satisfies n <= 2 D^2.
  const unsigned limit = 2 * max_degree * max_degree;
  for (unsigned n = 1; n <= limit; ++n)
    if (euler_phi(n) <= max_degree) out.emplace_back(n, cyclotomic(n));
  return out;
}

bool is_reciprocal(const IntPolynomial& p) {
  if (p.is_zero()) return false;
  const auto& c = p.coeffs();
  for (std::size_t i = 0, j = c.size() - 1; i < j; ++i, --j)
    if (c[i] != c[j]) return false;
  return true;
}

IntPolynomial trace_polynomial(const IntPolynomial& p) {
  if (p.degree() < 2 || p.degree() % 2 != 0)
    throw validation_error("trace polynomial needs even degree >= 2");
  if (!p.is_monic()) throw validation_error("trace polynomial needs a monic polynomial");
  if (!is_reciprocal(p)) throw validation_error("trace polynomial needs a reciprocal polynomial");
  if (p.eval_int(1) == 0 || p.eval_int(-1) == 0)
    throw validation_error("trace polynomial needs P(1) != 0 and P(-1) != 0");
  const std::size_t d = static_cast<std::size_t>(p.degree()) / 2;
  // P(x) = x^d (p_d + sum_{j>=1} p_{d+j} (x^j + x^-j)); substitute the power
  // sums V_j(y) = x^j + x^-j with V_0 = 2, V_1 = y, V_{j+1} = y V_j - V_{j-1}.
  IntPolynomial t = IntPolynomial::constant(p.coeff(d));
  IntPolynomial vprev = IntPolynomial::constant(2);
  IntPolynomial vcur = IntPolynomial::monomial(1, 1);
  const IntPolynomial y = IntPolynomial::monomial(1, 1);
  for (std::size_t j = 1; j <= d; ++j) {
    t = t + vcur * p.coeff(d + j);
    IntPolynomial vnext = y * vcur - vprev;
    vprev = std::move(vcur);
    vcur = std::move(vnext);
  }
  return t;
}

namespace {

std::vector<IntPolynomial> sturm_chain(const IntPolynomial& squarefree) {
  // Content removal must preserve signs here: each element has to stay a
  // positive multiple of the negated remainder or the variation count breaks.
  std::vector<IntPolynomial> chain;
  chain.push_back(squarefree);
  if (squarefree.degree() >= 1) {
    chain.push_back(squarefree.derivative().primitive_part());
    while (!chain.back().is_zero() && chain.back().degree() >= 1) {
      const IntPolynomial& f = chain[chain.size() - 2];
      const IntPolynomial& g = chain.back();
      IntPolynomial r = positive_pseudo_rem(f, g);
      if (r.is_zero()) break;
      chain.push_back((-r).primitive_part());
    }
  }
  return chain;
}

unsigned sign_variations(const std::vector<IntPolynomial>& chain, const Rat& x) {
  unsigned v = 0;
  int last = 0;
  for (const auto& p : chain) {
    int s = p.sign_at(x);
    if (s == 0) continue;
    if (last != 0 && s != last) ++v;
    last = s;
  }
  return v;
}

}  // namespace

unsigned sturm_count(const IntPolynomial& p, const Rat& a, const Rat& b) {
  if (p.is_zero()) throw validation_error("root counting needs a nonzero polynomial");
  if (!(a < b)) throw validation_error("root counting needs a < b");
  IntPolynomial s = squarefree_part(p);
  if (s.degree() < 1) return 0;
  auto chain = sturm_chain(s);
  unsigned va = sign_variations(chain, a);
  unsigned vb = sign_variations(chain, b);
  // For a squarefree chain the variation count is non-increasing in x and
  // drops exactly at roots, counting the half-open interval (a, b].
  return va - vb;
}

Rat cauchy_root_bound(const IntPolynomial& p) {
  if (p.degree() < 1) throw validation_error("root bound needs degree >= 1");
  const auto& c = p.coeffs();
  Int lead = c.back() < 0 ? Int(-c.back()) : c.back();
  Int m = 0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    Int a = c[i] < 0 ? Int(-c[i]) : c[i];
    if (a > m) m = a;
  }
  // 1 + max|c_i| / |lead|, rounded up to an integer.
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), m.get_mpz_t(), lead.get_mpz_t());
  return Rat(q + 1);
}

std::string to_string(SalemClassification::Kind k) {
  switch (k) {
    case SalemClassification::Kind::cyclotomic_product: return "cyclotomic-product";
    case SalemClassification::Kind::salem: return "salem";
    case SalemClassification::Kind::mixed: return "mixed";
    case SalemClassification::Kind::not_o_plus_shape: return "not-O-plus-shape";
  }
  return "unknown";
}

SalemClassification classify(const IntPolynomial& p, const ClassifyOptions& opts) {
  if (p.degree() < 1) throw validation_error("classification needs degree >= 1");
  if (!p.is_monic()) throw validation_error("classification needs a monic polynomial");
  SalemClassification out;
  unsigned bound = static_cast<unsigned>(p.degree());
  if (opts.degree_bound != 0) bound = std::min(bound, opts.degree_bound);
  IntPolynomial rem = p;
  for (const auto& [n, phi] : cyclotomics_up_to_degree(bound)) {
    unsigned mult = 0;
    while (rem.degree() >= phi.degree()) {
      auto q = try_exact_divide(rem, phi);
      if (!q) break;
      rem = std::move(*q);
      ++mult;
    }
    if (mult > 0) out.cyclotomic_factors.emplace_back(n, mult);
  }
  if (rem.degree() == 0) {
    out.kind = SalemClassification::Kind::cyclotomic_product;
    return out;
  }
  const bool had_cyclotomics = !out.cyclotomic_factors.empty();
  out.kind = SalemClassification::Kind::not_o_plus_shape;
  if (rem.degree() % 2 != 0 || !is_reciprocal(rem)) return out;
  if (rem.eval_int(1) == 0 || rem.eval_int(-1) == 0) return out;
  const unsigned d = static_cast<unsigned>(rem.degree()) / 2;
  IntPolynomial t = trace_polynomial(rem);
  Rat big = cauchy_root_bound(t);
  if (big < 3) big = 3;
  // Salem pattern for the trace polynomial: d simple real roots, exactly one
  // above 2, the rest in (-2, 2), none at or below -2. By Kronecker's
  // argument a reciprocal polynomial with no cyclotomic factor, no root at
  // +-1 and this root pattern is irreducible: any proper factor would be a
  // product of conjugate pairs on the unit circle, hence cyclotomic.
  unsigned total = sturm_count(t, -big, big);
  if (total != d) return out;
  unsigned above = sturm_count(t, Rat(2), big);
  unsigned inside = sturm_count(t, Rat(-2), Rat(2));
  if (above != 1 || inside != d - 1) return out;
  if (opts.exclude_degree_2 && rem.degree() == 2) return out;
  out.salem_factor = rem;
  out.salem_degree = static_cast<unsigned>(rem.degree());
  out.kind = had_cyclotomics ? SalemClassification::Kind::mixed : SalemClassification::Kind::salem;
  return out;
}

namespace {

// Integer square root bounds: returns r with r <= sqrt(v) < r + 1.
Int isqrt_floor(const Int& v) {
  Int r;
  mpz_sqrt(r.get_mpz_t(), v.get_mpz_t());
  return r;
}

// sqrt(q) enclosed in [lo, hi] with hi - lo <= 2^-prec_bits.
std::pair<Rat, Rat> sqrt_interval(const Rat& q, unsigned prec_bits) {
  if (q < 0) throw validation_error("square root of a negative rational");
  // sqrt(n/d) = sqrt(n d)/d; scale by 4^prec to control the rounding error.
  Int s = q.get_num() * q.get_den();
  Int scale = 1;
  mpz_mul_2exp(scale.get_mpz_t(), scale.get_mpz_t(), 2 * prec_bits);
  Int root = isqrt_floor(s * scale);
  Int den = q.get_den();
  mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), prec_bits);
  Rat lo(root, den);
  Rat hi(root + 1, den);
  lo.canonicalize();
  hi.canonicalize();
  return {lo, hi};
}

std::string mpfr_log_string(const Rat& x, mpfr_rnd_t rnd) {
  mpfr_t v;
  mpfr_init2(v, 128);
  mpfr_set_q(v, x.get_mpq_t(), rnd);
  mpfr_log(v, v, rnd);
  char buf[64];
  mpfr_snprintf(buf, sizeof buf, "%.20R*e", rnd, v);
  mpfr_clear(v);
  return std::string(buf);
}

}  // namespace

std::string log_decimal(const Rat& x, bool round_down) {
  if (x <= 0) throw validation_error("logarithm needs a positive argument");
  if (x == 1) return "0";
  return mpfr_log_string(x, round_down ? MPFR_RNDD : MPFR_RNDU);
}

EntropyInterval spectral_radius(const SalemClassification& c, const Rat& tol) {
  if (tol <= 0) throw validation_error("tolerance must be positive");
  if (!c.salem_factor) return EntropyInterval{Rat(1), Rat(1), "0", "0"};
  IntPolynomial t = trace_polynomial(*c.salem_factor);
  Rat big = cauchy_root_bound(t);
  if (big < 3) big = 3;
  // Exactly one trace root y* lies in (2, big); T(2) < 0 < T(big) there, so
  // plain bisection brackets it. lambda = (y + sqrt(y^2-4))/2 is increasing
  // in y, so directed rounding of the endpoints encloses the Salem number.
  Rat lo(2), hi = big;
  if (t.sign_at(lo) >= 0 || t.sign_at(hi) <= 0)
    throw validation_error("classification does not carry a Salem root bracket");
  unsigned prec = 16;
  {
    // 2^-prec <= tol/8 keeps the sqrt rounding well inside the budget.
    Rat inv = 8 / tol;
    Int ceilinv;
    mpz_cdiv_q(ceilinv.get_mpz_t(), inv.get_num().get_mpz_t(), inv.get_den().get_mpz_t());
    prec = std::max<unsigned>(16, static_cast<unsigned>(mpz_sizeinbase(ceilinv.get_mpz_t(), 2)) + 2);
  }
  Rat lam_lo, lam_hi;
  for (int iter = 0; iter < 100000; ++iter) {
    Rat mid = (lo + hi) / 2;
    int s = t.sign_at(mid);
    if (s < 0) {
      lo = mid;
    } else if (s > 0) {
      hi = mid;
    } else {
      lo = mid;  // rational root: collapse the bracket
      hi = mid;
    }
    lam_lo = (lo + sqrt_interval(lo * lo - 4, prec).first) / 2;
    lam_hi = (hi + sqrt_interval(hi * hi - 4, prec).second) / 2;
    if (lam_hi - lam_lo <= tol && lam_lo > 1) break;
    if (lo == hi) {
      // Exact rational trace root; only the sqrt rounding remains.
      prec *= 2;
      lam_lo = (lo + sqrt_interval(lo * lo - 4, prec).first) / 2;
      lam_hi = (hi + sqrt_interval(hi * hi - 4, prec).second) / 2;
      if (lam_hi - lam_lo <= tol && lam_lo > 1) break;
    }
  }
  if (!(lam_hi - lam_lo <= tol) || !(lam_lo > 1))
    throw validation_error("interval refinement failed to converge");
  EntropyInterval out;
  out.lower = lam_lo;
  out.upper = lam_hi;
  out.log_lower = mpfr_log_string(lam_lo, MPFR_RNDD);
  out.log_upper = mpfr_log_string(lam_hi, MPFR_RNDU);
  return out;
}

}  // namespace salemforge
