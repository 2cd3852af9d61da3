// Acceptance suite: eight end-to-end checks with pinned budgets and
// tolerances. Each prints one [PASS]/[FAIL] line; the exit code is the
// number of failed checks.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "salemforge/catalog.hpp"
#include "salemforge/errors.hpp"
#include "salemforge/intpoly.hpp"
#include "salemforge/isometry.hpp"
#include "salemforge/lattice.hpp"
#include "salemforge/search.hpp"
#include "salemforge/serialize.hpp"

using namespace salemforge;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failed = 0;

using Result = std::pair<bool, std::string>;

void run_criterion(int idx, const std::string& title, Result (*fn)()) {
  Result r;
  try {
    r = fn();
  } catch (const std::exception& e) {
    r = {false, std::string("unexpected exception: ") + e.what()};
  }
  std::cout << (r.first ? "[PASS] " : "[FAIL] ") << idx << ". " << title;
  if (!r.second.empty()) std::cout << " -- " << r.second;
  std::cout << "\n" << std::flush;
  if (!r.first) ++g_failed;
}

std::string scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "salemforge-acceptance" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

long long ms_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
}

std::shared_ptr<const GramLattice> lat(const std::string& expr) {
  return std::make_shared<const GramLattice>(build_lattice(expr));
}

IVec unit(std::size_t n, std::size_t i) {
  IVec e(n, Int(0));
  e[i] = 1;
  return e;
}

IVec random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-9, 9);
  IVec v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Nonzero integer vector orthogonal to e: (x,e) y - (y,e) x for random x, y.
IVec random_perp(const GramLattice& l, const IVec& e, std::mt19937_64& rng) {
  while (true) {
    IVec x = random_vec(l.rank(), rng);
    IVec y = random_vec(l.rank(), rng);
    Int xe = l.inner(x, e), ye = l.inner(y, e);
    IVec v(l.rank());
    bool zero = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = xe * y[i] - ye * x[i];
      if (v[i] != 0) zero = false;
    }
    if (!zero) return v;
  }
}

bool is_zero(const IMat& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m.at(i, j) != 0) return false;
  return true;
}

Rat rat_inner(const IMat& gram, const QVec& a, const IVec& b) {
  Rat s(0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    Rat row(0);
    for (std::size_t j = 0; j < b.size(); ++j) row += Rat(gram.at(i, j) * b[j]);
    s += a[i] * row;
  }
  return s;
}

IntPolynomial reconstruct(const SalemClassification& c) {
  IntPolynomial p = IntPolynomial::one();
  for (auto [n, mult] : c.cyclotomic_factors)
    for (unsigned k = 0; k < mult; ++k) p = p * cyclotomic(n);
  if (c.salem_factor) p = p * *c.salem_factor;
  return p;
}

// Random word of length <= max_len over the given generator sets, exponents
// in [-3,3] \ {0}.
IMat random_word(const std::vector<GeneratorSet>& sets, std::size_t max_len,
                 std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> len_d(1, max_len);
  std::uniform_int_distribution<std::size_t> set_d(0, sets.size() - 1);
  std::uniform_int_distribution<int> exp_d(1, 3);
  std::size_t n = sets[0].generators[0].matrix().rows();
  IMat m = IMat::identity(n);
  std::size_t len = len_d(rng);
  for (std::size_t i = 0; i < len; ++i) {
    const GeneratorSet& s = sets[set_d(rng)];
    std::uniform_int_distribution<std::size_t> gen_d(0, s.generators.size() - 1);
    const Isometry& g = s.generators[gen_d(rng)];
    int e = exp_d(rng) * (rng() % 2 ? 1 : -1);
    IMat f = e > 0 ? g.matrix().pow(static_cast<unsigned>(e))
                   : g.inverse().matrix().pow(static_cast<unsigned>(-e));
    m = m * f;
  }
  return m;
}

// 1. Rank-22 demo: verified degree-22 Salem certificate, non-liftable flag,
//    within 1e6 candidate words and 10 minutes.
Result c1() {
  std::string dir = scratch("c1");
  RunConfig cfg;
  cfg.budget = 1000000;
  cfg.out_dir = dir;

  auto t0 = Clock::now();
  DemoResult res = run_demo("U+E8+E8+D4", cfg);
  long long ms = ms_since(t0);

  const SalemCertificate& c = res.certificate;
  bool deg_ok = c.classification.salem_degree == 22u && c.full_degree && c.non_liftable_flag;
  bool budget_ok = c.stats.words_examined <= 1000000 && ms <= 600000;

  auto l = lat("U+E8+E8+D4");
  std::vector<GeneratorSet> sets = {to_generator_set(parabolic_group(l, res.e1)),
                                    to_generator_set(parabolic_group(l, res.e2))};
  std::string diff;
  bool verified = verify(certificate_from_json(load_json_file(res.certificate_path)), *l, sets, &diff);

  std::ostringstream os;
  os << "degree " << (c.classification.salem_degree ? *c.classification.salem_degree : 0)
     << ", word length " << c.word.size() << ", " << c.stats.words_examined << " candidates, "
     << ms << " ms, log lambda in [" << c.entropy.log_lower << ", " << c.entropy.log_upper << "]";
  if (!verified) os << "; verify diff: " << diff;
  return {deg_ok && budget_ok && verified, os.str()};
}

// 2. Rank-4 demo within 1e4 words and 10 seconds. U+U, the literal rank-4
//    suggestion, has signature (2,0,2); a form with two positive directions
//    admits no Salem spectrum at all, so the demo must reject it and the
//    degree-4 case runs on the hyperbolic U+A1+A1 instead.
Result c2() {
  std::string dir = scratch("c2");
  RunConfig cfg;
  cfg.budget = 10000;
  cfg.out_dir = dir;

  bool uu_rejected = false;
  std::string uu_msg;
  try {
    run_demo("U+U", cfg);
  } catch (const validation_error& e) {
    uu_msg = e.what();
    uu_rejected = uu_msg.find("signature") != std::string::npos;
  }

  auto t0 = Clock::now();
  DemoResult res = run_demo("U+A1+A1", cfg);
  long long ms = ms_since(t0);

  const SalemCertificate& c = res.certificate;
  bool ok = c.classification.salem_degree == 4u && c.full_degree &&
            c.stats.words_examined <= 10000 && ms <= 10000;

  auto l = lat("U+A1+A1");
  std::vector<GeneratorSet> sets = {to_generator_set(parabolic_group(l, res.e1)),
                                    to_generator_set(parabolic_group(l, res.e2))};
  bool verified = verify(c, *l, sets);

  std::ostringstream os;
  os << "U+A1+A1: degree 4 in " << c.stats.words_examined << " candidates, " << ms
     << " ms; U+U rejected (signature (2,0,2), no Salem spectrum)";
  return {ok && verified && uu_rejected, os.str()};
}

// 3. 1000 random words (length <= 8) over the two U+E8 parabolic groups:
//    classification reconstructs the characteristic polynomial exactly and
//    never reports more than one Salem factor.
Result c3() {
  auto l = lat("U+E8");
  std::vector<IVec> iso = find_isotropic(*l, 1);
  std::vector<GeneratorSet> sets = {to_generator_set(parabolic_group(l, iso[0])),
                                    to_generator_set(parabolic_group(l, iso[1]))};
  std::mt19937_64 rng(20260301);
  int failures = 0;
  int with_salem = 0;
  for (int i = 0; i < 1000; ++i) {
    IMat m = random_word(sets, 8, rng);
    IntPolynomial cp = char_poly(m);
    SalemClassification c = classify(cp);
    if (c.kind == SalemClassification::Kind::not_o_plus_shape) {
      ++failures;
      continue;
    }
    if (reconstruct(c) != cp) ++failures;
    if (c.salem_factor) {
      ++with_salem;
      if (c.salem_degree && *c.salem_degree % 2 != 0) ++failures;
    }
  }
  std::ostringstream os;
  os << failures << " failures, " << with_salem << "/1000 words carried a Salem factor";
  return {failures == 0, os.str()};
}

// 4. Orbit dichotomy for parabolic groups on ranks 4, 10, 22: seeds inside
//    e-perp stay inside; seeds outside span everything.
Result c4() {
  std::mt19937_64 rng(777);
  int failures = 0;
  std::ostringstream os;
  for (const char* expr : {"U+A1+A1", "U+E8", "U+E8+E8+D4"}) {
    auto l = lat(expr);
    std::size_t n = l->rank();
    IVec e = unit(n, 0);
    ParabolicGroup p = parabolic_group(l, e);

    for (int i = 0; i < 100; ++i) {
      IVec v = random_perp(*l, e, rng);
      Subspace sp = orbit_span(p.generators, to_qvec(v));
      for (const QVec& w : sp.basis)
        if (rat_inner(l->gram(), w, e) != 0) ++failures;
    }
    int full = 0;
    for (int i = 0; i < 100; ++i) {
      IVec v;
      do {
        v = random_vec(n, rng);
      } while (l->inner(v, e) == 0);
      Subspace sp = orbit_span(p.generators, to_qvec(v));
      if (sp.dimension() == n) ++full;
    }
    if (full != 100) failures += 100 - full;
    os << expr << " ok; ";
  }
  return {failures == 0, os.str() + std::to_string(failures) + " failures"};
}

// 5. Detector calibration: the degree-10 Lehmer polynomial, every cyclotomic
//    through degree 22, and the quadratic t^2 - 3t + 1.
Result c5() {
  IntPolynomial lehmer(std::vector<Int>{1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1});
  SalemClassification c = classify(lehmer);
  if (c.kind != SalemClassification::Kind::salem || c.salem_degree != 10u)
    return {false, "Lehmer polynomial misclassified"};
  EntropyInterval e = spectral_radius(c, Rat(1, 1000000));
  // Root value pinned by an independent bisection oracle, 29 decimals.
  Rat oracle(Int("117628081825991750654407033847"), pow_int(Int(10), 29));
  bool lehmer_ok = e.upper - e.lower <= Rat(1, 1000000) && e.lower <= oracle && oracle <= e.upper;

  auto cyc = cyclotomics_up_to_degree(22);
  int cyc_bad = 0;
  for (const auto& [n, phi] : cyc) {
    SalemClassification cc = classify(phi);
    if (cc.kind != SalemClassification::Kind::cyclotomic_product || cc.salem_factor ||
        cc.cyclotomic_factors != std::vector<std::pair<unsigned, unsigned>>{{n, 1}})
      ++cyc_bad;
  }

  IntPolynomial quad(std::vector<Int>{1, -3, 1});
  SalemClassification qc = classify(quad);
  bool quad_ok = qc.kind == SalemClassification::Kind::salem && qc.salem_degree == 2u;
  EntropyInterval qe = spectral_radius(qc, Rat(1, 1000000));
  // Contains (3+sqrt(5))/2 iff the quadratic changes sign across the interval.
  quad_ok = quad_ok && qe.upper - qe.lower <= Rat(1, 1000000) && quad.sign_at(qe.lower) < 0 &&
            quad.sign_at(qe.upper) > 0;

  std::ostringstream os;
  os << "Lehmer root in [" << e.log_lower << ", " << e.log_upper << "], " << cyc.size()
     << " cyclotomics clean, quadratic interval straddles (3+sqrt(5))/2";
  return {lehmer_ok && cyc_bad == 0 && quad_ok, os.str()};
}

// 6. Cyclotomic enumeration counts against a brute-force totient oracle.
Result c6() {
  auto phi_brute = [](unsigned n) {
    unsigned c = 0;
    for (unsigned k = 1; k <= n; ++k)
      if (std::gcd(k, n) == 1) ++c;
    return c;
  };
  unsigned expect2 = 0, expect22 = 0;
  for (unsigned n = 1; n <= 2000; ++n) {
    if (phi_brute(n) <= 2) ++expect2;
    if (phi_brute(n) <= 22) ++expect22;
  }
  std::size_t got2 = cyclotomics_up_to_degree(2).size();
  std::size_t got22 = cyclotomics_up_to_degree(22).size();
  std::ostringstream os;
  os << "degree <= 2: " << got2 << " (oracle " << expect2 << "), degree <= 22: " << got22
     << " (oracle " << expect22 << ")";
  return {got2 == 5 && got2 == expect2 && got22 == expect22, os.str()};
}

// 7. Transvection algebra on catalog lattices: E(e,a) E(e,b) = E(e,a+b),
//    (g-I)^3 = 0, SO+ membership, entropy exactly zero.
Result c7() {
  std::mt19937_64 rng(20260401);
  struct Plan {
    const char* expr;
    int count;
  };
  const Plan plans[] = {{"U+A1+A1", 400}, {"U+E8", 300}, {"U(3)+E8+E8", 200}, {"U+E8+E8+D4", 100}};
  int failures = 0;
  int total = 0;
  for (const Plan& plan : plans) {
    auto l = lat(plan.expr);
    std::vector<IVec> iso = find_isotropic(*l, 1);
    std::uniform_int_distribution<std::size_t> pick(0, iso.size() - 1);
    for (int i = 0; i < plan.count; ++i, ++total) {
      const IVec& e = iso[pick(rng)];
      IVec a = random_perp(*l, e, rng);
      IVec b = random_perp(*l, e, rng);
      IVec ab(a.size());
      for (std::size_t k = 0; k < a.size(); ++k) ab[k] = a[k] + b[k];

      Isometry ga = eichler(l, e, a);
      Isometry gb = eichler(l, e, b);
      if (!(ga * gb == eichler(l, e, ab))) ++failures;

      IMat d = ga.matrix() - IMat::identity(l->rank());
      if (!is_zero(d * d * d)) ++failures;
      if (!in_so_plus(ga)) ++failures;

      EntropyInterval ent = entropy_of(ga, Rat(1, 1000000));
      if (ent.lower != 1 || ent.upper != 1 || ent.log_lower != "0" || ent.log_upper != "0")
        ++failures;
    }
  }
  std::ostringstream os;
  os << failures << " failures over " << total << " transvections on 4 lattices";
  return {failures == 0 && total == 1000, os.str()};
}

// 8. Replay: a persisted demo re-run single-worker with its stored seed
//    reproduces the certificate byte for byte.
Result c8() {
  auto read_file = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  auto replay = [&](const std::string& entry, std::size_t budget) {
    std::string dir = scratch("c8-" + std::to_string(budget));
    RunConfig cfg;
    cfg.budget = budget;
    cfg.workers = 1;
    cfg.out_dir = dir;
    DemoResult first = run_demo(entry, cfg);

    // Rebuild the configuration from the persisted sidecar, as a consumer would.
    Json run = load_json_file(first.config_path);
    RunConfig stored;
    stored.seed = run["config"]["seed"].get<std::uint64_t>();
    stored.tol = rat_from_string(run["config"]["tol"].get<std::string>());
    stored.budget = run["config"]["budget"].get<std::size_t>();
    stored.max_word_length = run["config"]["max_word_length"].get<std::size_t>();
    stored.workers = 1;
    stored.strategy = strategy_from_name(run["config"]["strategy"].get<std::string>());
    stored.height_bound = run["config"]["height_bound"].get<unsigned>();
    stored.out_dir = scratch("c8-replay-" + std::to_string(budget));
    DemoResult second = run_demo(run["entry"].get<std::string>(), stored);

    return read_file(first.certificate_path) == read_file(second.certificate_path) &&
           !read_file(first.certificate_path).empty();
  };

  bool small = replay("U+A1+A1", 10000);
  bool large = replay("U+E8+E8+D4", 1000000);
  std::ostringstream os;
  os << "U+A1+A1 " << (small ? "byte-identical" : "DIVERGED") << ", U+E8+E8+D4 "
     << (large ? "byte-identical" : "DIVERGED");
  return {small && large, os.str()};
}

}  // namespace

int main() {
  std::cout << "acceptance checks, pinned budgets and tolerances\n";
  run_criterion(1, "rank-22 demo certifies a verified degree-22 non-liftable Salem isometry", c1);
  run_criterion(2, "rank-4 demo certifies degree 4 quickly; non-hyperbolic U+U is rejected", c2);
  run_criterion(3, "1000 random SO+ words on U+E8 classify with exact reconstruction", c3);
  run_criterion(4, "orbit spans split along e-perp on ranks 4, 10 and 22", c4);
  run_criterion(5, "Lehmer, cyclotomic and quadratic calibration of the Salem detector", c5);
  run_criterion(6, "cyclotomic enumeration matches the totient oracle", c6);
  run_criterion(7, "1000 random transvections satisfy the transvection algebra", c7);
  run_criterion(8, "persisted demos replay byte-identically with their stored seeds", c8);

  if (g_failed == 0) {
    std::cout << "all criteria passed\n";
  } else {
    std::cout << g_failed << " criteria FAILED\n";
  }
  return g_failed;
}
