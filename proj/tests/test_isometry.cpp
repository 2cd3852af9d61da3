#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>
#include <random>

#include "salemforge/errors.hpp"
#include "salemforge/isometry.hpp"
#include "salemforge/lattice.hpp"

using namespace salemforge;

namespace {

IMat from_rows(const std::vector<std::vector<long>>& rows) {
  IMat m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m.at(i, j) = rows[i][j];
  return m;
}

IVec vec(const std::vector<long>& v) {
  IVec r;
  for (long x : v) r.emplace_back(x);
  return r;
}

std::shared_ptr<const GramLattice> lat(const std::string& expr) {
  return std::make_shared<const GramLattice>(build_lattice(expr));
}

Rat inner_q(const IMat& g, const QVec& x, const QVec& y) {
  Rat s = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) s += x[i] * Rat(g.at(i, j)) * y[j];
  return s;
}

bool is_zero(const IMat& m) { return m == IMat(m.rows(), m.cols()); }

IVec random_perp_vector(std::size_t n, std::size_t skip, std::mt19937_64& rng) {
  // Entries in [-3, 3] with the coordinate pairing against e forced to 0.
  std::uniform_int_distribution<int> d(-3, 3);
  IVec a(n, 0);
  for (std::size_t i = 0; i < n; ++i) a[i] = (i == skip) ? 0 : d(rng);
  return a;
}

}  // namespace

TEST_CASE("validate certifies and classifies basic isometries") {
  auto u = lat("U");

  Isometry id = validate(IMat::identity(2), u);
  CHECK(id.det_sign() == 1);
  CHECK(id.cone_preserving());
  CHECK(in_so_plus(id));

  IMat neg(2, 2);
  neg.at(0, 0) = -1;
  neg.at(1, 1) = -1;
  Isometry minus = validate(neg, u);
  CHECK(minus.det_sign() == 1);
  CHECK_FALSE(minus.cone_preserving());
  CHECK_FALSE(in_so_plus(minus));

  Isometry swap = validate(from_rows({{0, 1}, {1, 0}}), u);
  CHECK(swap.det_sign() == -1);
  CHECK(swap.cone_preserving());
  CHECK_FALSE(in_so_plus(swap));

  CHECK_THROWS_AS(validate(from_rows({{1, 1}, {0, 1}}), u), validation_error);
  CHECK_THROWS_AS(validate(IMat::identity(3), u), validation_error);
  CHECK_THROWS_AS(validate(IMat(2, 3), u), validation_error);
  CHECK_THROWS_AS(validate(IMat::identity(2), nullptr), validation_error);

  // Negative definite lattice: no cone, so orientation is vacuous.
  auto e8 = lat("E8");
  IMat neg8(8, 8);
  for (std::size_t i = 0; i < 8; ++i) neg8.at(i, i) = -1;
  Isometry m8 = validate(neg8, e8);
  CHECK(m8.det_sign() == 1);
  CHECK(m8.cone_preserving());
  CHECK(in_so_plus(m8));

  // [[3]] preserves the zero form on [[0]] but is not unimodular.
  auto degenerate = lat("[[0]]");
  CHECK_THROWS_AS(validate(from_rows({{3}}), degenerate), validation_error);
}

TEST_CASE("transvection on U+A1 matches the defining formula") {
  auto l = lat("U+A1");
  IVec e = vec({1, 0, 0});
  IVec a = vec({0, 0, 1});
  Isometry g = eichler(l, e, a);

  CHECK(g.matrix() == from_rows({{1, 1, 2}, {0, 1, 0}, {0, 1, 1}}));
  CHECK(g.matrix() * e == e);
  CHECK(g.det_sign() == 1);
  CHECK(g.cone_preserving());
  CHECK(in_so_plus(g));

  IMat n = g.matrix() - IMat::identity(3);
  CHECK_FALSE(is_zero(n * n));
  CHECK(is_zero(n * n * n));

  // Rebuild each column from the inner products alone.
  Int h = l->norm(a) / 2;
  for (std::size_t j = 0; j < 3; ++j) {
    IVec ej(3, 0);
    ej[j] = 1;
    Int se = l->inner(ej, e), sa = l->inner(ej, a);
    for (std::size_t i = 0; i < 3; ++i) {
      Int expect = ej[i] + se * a[i] - sa * e[i] - h * se * e[i];
      CHECK(g.matrix().at(i, j) == expect);
    }
  }
}

TEST_CASE("transvection edge cases and rejections") {
  auto l = lat("U+A1");
  IVec e = vec({1, 0, 0});

  CHECK(eichler(l, e, vec({0, 0, 0})).matrix() == IMat::identity(3));
  // a = e is orthogonal to e and contributes nothing.
  CHECK(eichler(l, e, e).matrix() == IMat::identity(3));

  CHECK_THROWS_AS(eichler(l, vec({1, 1, 0}), vec({0, 0, 1})), validation_error);  // (e,e) = 2
  CHECK_THROWS_AS(eichler(l, e, vec({0, 1, 0})), validation_error);               // (e,a) = 1
  CHECK_THROWS_AS(eichler(l, vec({2, 0, 0}), vec({0, 0, 1})), validation_error);  // not primitive
  CHECK_THROWS_AS(eichler(l, vec({0, 0, 0}), vec({0, 0, 1})), validation_error);  // zero center
  CHECK_THROWS_AS(eichler(l, e, vec({0, 0})), validation_error);                  // short vector

  // Odd lattice: norm -1 vector is rejected, norm -4 vector works.
  auto odd = lat("[[0,1,0],[1,0,0],[0,0,-1]]");
  CHECK_FALSE(odd->is_even());
  CHECK_THROWS_AS(eichler(odd, vec({1, 0, 0}), vec({0, 0, 1})), validation_error);
  Isometry g = eichler(odd, vec({1, 0, 0}), vec({0, 0, 2}));
  CHECK(g.det_sign() == 1);
  IMat n = g.matrix() - IMat::identity(3);
  CHECK(is_zero(n * n * n));
}

TEST_CASE("transvection additivity and inverses on U+E8") {
  auto l = lat("U+E8");
  IVec e = vec({1, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  std::mt19937_64 rng(77);

  for (int trial = 0; trial < 30; ++trial) {
    IVec a = random_perp_vector(10, 1, rng);
    IVec b = random_perp_vector(10, 1, rng);
    IVec ab(10);
    for (std::size_t i = 0; i < 10; ++i) ab[i] = a[i] + b[i];

    Isometry ga = eichler(l, e, a), gb = eichler(l, e, b);
    CHECK((ga * gb).matrix() == eichler(l, e, ab).matrix());
    CHECK(ga.inverse().matrix() == eichler(l, e, IVec{-a[0], -a[1], -a[2], -a[3], -a[4], -a[5], -a[6], -a[7], -a[8], -a[9]}).matrix());
    CHECK(in_so_plus(ga));
    IMat n = ga.matrix() - IMat::identity(10);
    CHECK(is_zero(n * n * n));
  }
}

TEST_CASE("parabolic group on U is empty") {
  auto u = lat("U");
  IVec e = vec({1, 0});
  ParabolicGroup p = parabolic_group(u, e);

  CHECK(p.generators.empty());
  CHECK(p.b_vectors.empty());
  REQUIRE(p.basis_witness.size() == 2);
  CHECK(p.basis_witness[0] == to_qvec(e));
  CHECK(inner_q(u->gram(), to_qvec(e), p.basis_witness[1]) == 1);
}

TEST_CASE("parabolic group on U+E8 has eight commuting unipotent generators") {
  auto l = lat("U+E8");
  IVec e = vec({1, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  ParabolicGroup p = parabolic_group(l, e);

  REQUIRE(p.generators.size() == 8);
  REQUIRE(p.basis_witness.size() == 10);
  CHECK(p.basis_witness[0] == to_qvec(e));
  for (std::size_t j = 1; j <= 8; ++j)
    CHECK(inner_q(l->gram(), to_qvec(e), p.basis_witness[j]) == 0);
  CHECK(inner_q(l->gram(), to_qvec(e), p.basis_witness[9]) == 1);

  for (const Isometry& g : p.generators) {
    CHECK(g.matrix() * e == e);
    CHECK(g.det_sign() == 1);
    CHECK(g.cone_preserving());
    CHECK(in_so_plus(g));
    IMat n = g.matrix() - IMat::identity(10);
    CHECK(is_zero(n * n * n));
  }
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = i + 1; j < 8; ++j)
      CHECK(p.generators[i].matrix() * p.generators[j].matrix() ==
            p.generators[j].matrix() * p.generators[i].matrix());

  REQUIRE(p.b_vectors.size() == 8);
  for (std::size_t j = 0; j < 8; ++j) {
    QVec unit(8, Rat(0));
    unit[j] = 1;
    CHECK(p.b_vectors[j] == unit);
  }
}

TEST_CASE("parabolic group on U+E8+E8+D4 has twenty generators") {
  auto l = lat("U+E8+E8+D4");
  IVec e(22, 0);
  e[0] = 1;
  ParabolicGroup p = parabolic_group(l, e);

  REQUIRE(p.generators.size() == 20);
  REQUIRE(p.b_vectors.size() == 20);
  REQUIRE(p.basis_witness.size() == 22);
  for (const Isometry& g : p.generators) {
    CHECK(g.matrix() * e == e);
    CHECK(in_so_plus(g));
  }
  // Sampled commutation; the full set is quadratic in 20.
  const std::pair<std::size_t, std::size_t> pairs[] = {{0, 1}, {0, 19}, {7, 13}, {4, 18}, {11, 12}};
  for (auto [i, j] : pairs)
    CHECK(p.generators[i].matrix() * p.generators[j].matrix() ==
          p.generators[j].matrix() * p.generators[i].matrix());

  SpanBuilder rank(20);
  for (const QVec& b : p.b_vectors) CHECK(rank.add(b));
  CHECK(rank.dim() == 20);

  IMat n = p.generators[13].matrix() - IMat::identity(22);
  CHECK(is_zero(n * n * n));
}

TEST_CASE("parabolic group rejections") {
  CHECK_THROWS_AS(parabolic_group(lat("U"), vec({1, 1})), validation_error);   // (e,e) = 2
  CHECK_THROWS_AS(parabolic_group(lat("U"), vec({2, 0})), validation_error);   // not primitive
  CHECK_THROWS_AS(parabolic_group(lat("U"), vec({0, 0})), validation_error);   // zero
  CHECK_THROWS_AS(parabolic_group(lat("U"), vec({1, 0, 0})), validation_error);
  CHECK_THROWS_AS(parabolic_group(lat("E8"), IVec(8, 0)), validation_error);   // not hyperbolic
  CHECK_THROWS_AS(parabolic_group(lat("U+U"), vec({1, 0, 0, 0})), validation_error);
  CHECK_THROWS_AS(parabolic_group(nullptr, vec({1, 0})), validation_error);
}

TEST_CASE("orbit spans detect invariant subspaces on U+E8") {
  auto l = lat("U+E8");
  IVec e = vec({1, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  ParabolicGroup p = parabolic_group(l, e);
  std::mt19937_64 rng(401);

  Subspace fix = orbit_span(p.generators, to_qvec(e));
  REQUIRE(fix.dimension() == 1);
  CHECK(fix.basis[0] == to_qvec(e));

  for (int trial = 0; trial < 20; ++trial) {
    QVec v = to_qvec(random_perp_vector(10, 1, rng));
    Subspace s = orbit_span(p.generators, v);
    CHECK(s.dimension() <= 9);
    for (const QVec& row : s.basis)
      CHECK(inner_q(l->gram(), row, to_qvec(e)) == 0);
  }

  std::uniform_int_distribution<int> d(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    QVec v(10);
    for (std::size_t i = 0; i < 10; ++i) v[i] = d(rng);
    v[1] = 1 + std::abs(d(rng));  // force (v, e) != 0
    Subspace s = orbit_span(p.generators, v);
    CHECK(s.dimension() == 10);
  }

  // u itself pairs to 1 with e, so its orbit fills the space.
  CHECK(orbit_span(p.generators, p.basis_witness[9]).dimension() == 10);
}

TEST_CASE("orbit span basics and rejections") {
  auto u = lat("U");
  Isometry id = validate(IMat::identity(2), u);

  QVec v{Rat(2), Rat(4)};
  Subspace s = orbit_span({id}, v);
  REQUIRE(s.dimension() == 1);
  CHECK(s.basis[0] == QVec{Rat(1), Rat(2)});
  CHECK(s.contains(QVec{Rat(3), Rat(6)}));
  CHECK_FALSE(s.contains(QVec{Rat(1), Rat(1)}));

  CHECK(orbit_span({}, v).dimension() == 1);
  CHECK(orbit_span({id}, QVec{Rat(0), Rat(0)}).dimension() == 0);
  CHECK_THROWS_AS(orbit_span({id}, QVec{Rat(1)}), validation_error);

  // Same rank, different form: rejected.
  auto twisted = lat("[[0,2],[2,0]]");
  Isometry id2 = validate(IMat::identity(2), twisted);
  CHECK_THROWS_AS(orbit_span({id, id2}, v), validation_error);
}

TEST_CASE("fixed subspaces of small groups") {
  auto u = lat("U");
  IMat neg(2, 2);
  neg.at(0, 0) = -1;
  neg.at(1, 1) = -1;
  CHECK(fixed_subspace({validate(neg, u)}).dimension() == 0);

  Subspace diag = fixed_subspace({validate(from_rows({{0, 1}, {1, 0}}), u)});
  REQUIRE(diag.dimension() == 1);
  CHECK(diag.basis[0] == QVec{Rat(1), Rat(1)});

  CHECK(fixed_subspace({validate(IMat::identity(2), u)}).dimension() == 2);
  CHECK_THROWS_AS(fixed_subspace({}), validation_error);

  // A full parabolic group pins down exactly the line through e.
  auto l = lat("U+E8");
  IVec e = vec({1, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  Subspace fix = fixed_subspace(parabolic_group(l, e).generators);
  REQUIRE(fix.dimension() == 1);
  CHECK(fix.contains(to_qvec(e)));

  auto l4 = lat("U+A1+A1");
  IVec e4 = vec({1, 0, 0, 0});
  Subspace fix4 = fixed_subspace(parabolic_group(l4, e4).generators);
  REQUIRE(fix4.dimension() == 1);
  CHECK(fix4.contains(to_qvec(e4)));
}

TEST_CASE("cone orientation multiplies like a sign") {
  auto l = lat("U+A1+A1");
  IVec e = vec({1, 0, 0, 0});

  std::vector<Isometry> pool;
  pool.push_back(validate(IMat::identity(4), l));
  IMat neg(4, 4);
  for (std::size_t i = 0; i < 4; ++i) neg.at(i, i) = -1;
  pool.push_back(validate(neg, l));
  pool.push_back(validate(from_rows({{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}), l));
  pool.push_back(eichler(l, e, vec({0, 0, 1, 0})));
  pool.push_back(eichler(l, e, vec({3, 0, 1, -2})));
  pool.push_back(eichler(l, e, vec({0, 0, 2, 1})) * validate(neg, l));

  for (const Isometry& a : pool)
    for (const Isometry& b : pool) {
      Isometry ab = a * b;
      CHECK(ab.cone_preserving() == (a.cone_preserving() == b.cone_preserving()));
      CHECK(ab.det_sign() == a.det_sign() * b.det_sign());
    }
}

TEST_CASE("inverse and composition round trip") {
  auto l = lat("U+E8+E8+D4");
  IVec e(22, 0);
  e[0] = 1;
  ParabolicGroup p = parabolic_group(l, e);
  Isometry g = p.generators[3] * p.generators[17] * p.generators[9].inverse();

  CHECK((g * g.inverse()).matrix() == IMat::identity(22));
  CHECK(g.inverse().inverse().matrix() == g.matrix());
  CHECK(g.matrix() * e == e);
  CHECK(in_so_plus(g));
}
