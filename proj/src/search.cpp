#include "salemforge/search.hpp"

#include <algorithm>
#include <cstdlib>
#include <future>
#include <optional>
#include <random>
#include <set>
#include <unordered_map>
#include <utility>

#include "salemforge/errors.hpp"

namespace salemforge {

namespace {

// One word letter with its matrix ready to multiply. pair_id identifies the
// (set, generator) pair so reduced enumeration can skip mergeable neighbors.
struct Letter {
  std::size_t set;
  std::size_t gen;
  int exp;
  std::size_t pair_id;
  IMat m;
};

IMat letter_matrix(const Isometry& g, int exp) {
  if (exp >= 0) return g.matrix().pow(static_cast<unsigned>(exp));
  return g.inverse().matrix().pow(static_cast<unsigned>(-exp));
}

// Letters ordered by (set, generator, exponent) with exponents
// -m, ..., -1, 1, ..., m. Candidate order and certificates depend on this.
std::vector<Letter> build_alphabet(const std::vector<GeneratorSet>& sets, int max_exp) {
  std::vector<Letter> out;
  std::size_t pair = 0;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    for (std::size_t g = 0; g < sets[s].generators.size(); ++g, ++pair) {
      for (int x = -max_exp; x <= max_exp; ++x) {
        if (x == 0) continue;
        out.push_back(Letter{s, g, x, pair, letter_matrix(sets[s].generators[g], x)});
      }
    }
  }
  return out;
}

struct Candidate {
  std::vector<std::size_t> letters;  // indices into the alphabet
  IMat matrix;
};

// Words by length, then lexicographic letter index. Consecutive letters
// never repeat a (set, generator) pair: the merged word is shorter and was
// already enumerated, so nothing is lost and the layers stay small.
class BfsStream {
 public:
  BfsStream(const std::vector<Letter>* alphabet, std::size_t max_len, std::size_t max_bits,
            std::size_t rank, SearchStats* stats)
      : a_(alphabet),
        max_len_(max_len),
        max_bits_(max_bits),
        stats_(stats),
        identity_(IMat::identity(rank)) {}

  std::optional<Candidate> next() {
    if (done_) return std::nullopt;
    const std::size_t A = a_->size();
    std::size_t pos, start;
    if (idx_.empty()) {
      if (A == 0 || max_len_ == 0) {
        done_ = true;
        return std::nullopt;
      }
      idx_.assign(1, 0);
      pre_.assign(1, IMat());
      pos = 0;
      start = 0;
    } else {
      pos = idx_.size() - 1;
      start = idx_[pos] + 1;
    }
    while (true) {
      std::size_t chosen = A;
      for (std::size_t L = start; L < A; ++L) {
        if (pos > 0 && (*a_)[idx_[pos - 1]].pair_id == (*a_)[L].pair_id) continue;
        if (!place(pos, L)) {
          ++stats_->pruned_bits;
          continue;
        }
        chosen = L;
        break;
      }
      if (chosen == A) {
        if (pos == 0) {
          std::size_t len = idx_.size() + 1;
          if (len > max_len_) {
            done_ = true;
            return std::nullopt;
          }
          idx_.assign(len, 0);
          pre_.assign(len, IMat());
          pos = 0;
          start = 0;
          continue;
        }
        --pos;
        start = idx_[pos] + 1;
        continue;
      }
      idx_[pos] = chosen;
      if (pos + 1 == idx_.size()) return Candidate{idx_, pre_.back()};
      ++pos;
      start = 0;
    }
  }

 private:
  bool place(std::size_t pos, std::size_t letter) {
    const IMat& before = pos == 0 ? identity_ : pre_[pos - 1];
    IMat m = before * (*a_)[letter].m;
    if (m.max_entry_bits() > max_bits_) return false;
    pre_[pos] = std::move(m);
    return true;
  }

  const std::vector<Letter>* a_;
  std::size_t max_len_, max_bits_;
  SearchStats* stats_;
  IMat identity_;
  std::vector<std::size_t> idx_;
  std::vector<IMat> pre_;
  bool done_ = false;
};

// Seeded walk. Same-set letters commute and merge, so a long same-set run
// adds nothing; alternating the set every step is what makes rank(g - I)
// climb. Within a set the generator index comes from a shuffled cycle, so
// every complement direction is visited once per pass; a word missing some
// direction keeps a nontrivial 1-eigenspace and can never reach full
// degree. Geometric restart keeps words short.
class WalkStream {
 public:
  WalkStream(const std::vector<Letter>* alphabet, const std::vector<GeneratorSet>* sets,
             const SearchConfig& cfg, std::size_t rank, SearchStats* stats)
      : a_(alphabet),
        max_bits_(cfg.max_entry_bits),
        max_exp_(cfg.max_exponent),
        stats_(stats),
        identity_(IMat::identity(rank)),
        matrix_(identity_),
        rng_(cfg.seed),
        restart_(0.1) {
    for (const GeneratorSet& s : *sets) gen_count_.push_back(s.generators.size());
    pair_base_.resize(gen_count_.size());
    std::size_t run = 0;
    for (std::size_t s = 0; s < gen_count_.size(); ++s) {
      pair_base_[s] = run;
      run += gen_count_[s];
    }
    cycles_.resize(gen_count_.size());
    reset_segment();
  }

  std::optional<Candidate> next() {
    while (true) {
      if (!letters_.empty() && restart_(rng_)) reset_segment();
      std::size_t s = pick_set();
      if (gen_count_[s] == 0) continue;  // an empty set just passes the turn
      std::size_t g = next_gen(s);
      int x = pick_exp();
      const Letter& letter = (*a_)[letter_index(s, g, x)];
      IMat nextm = matrix_ * letter.m;
      if (nextm.max_entry_bits() > max_bits_) {
        ++stats_->pruned_bits;
        if (letters_.empty())
          throw SearchExhausted("entry-size bound rejects single generators", *stats_);
        reset_segment();
        continue;
      }
      matrix_ = std::move(nextm);
      letters_.push_back(letter_index(s, g, x));
      prev_set_ = s;
      return Candidate{letters_, matrix_};
    }
  }

 private:
  std::size_t letter_index(std::size_t s, std::size_t g, int x) const {
    std::size_t off = static_cast<std::size_t>(x < 0 ? x + max_exp_ : x + max_exp_ - 1);
    return (pair_base_[s] + g) * (2 * static_cast<std::size_t>(max_exp_)) + off;
  }

  std::size_t pick_set() {
    const std::size_t count = gen_count_.size();
    if (count == 1) return 0;
    if (!prev_set_) {
      std::uniform_int_distribution<std::size_t> d(0, count - 1);
      return d(rng_);
    }
    std::uniform_int_distribution<std::size_t> d(0, count - 2);
    std::size_t k = d(rng_);
    return k >= *prev_set_ ? k + 1 : k;
  }

  std::size_t next_gen(std::size_t s) {
    Cycle& c = cycles_[s];
    if (c.pos == c.order.size()) {
      std::shuffle(c.order.begin(), c.order.end(), rng_);
      c.pos = 0;
    }
    return c.order[c.pos++];
  }

  int pick_exp() {
    std::uniform_int_distribution<int> d(0, 2 * max_exp_ - 1);
    int k = d(rng_);
    return k < max_exp_ ? k - max_exp_ : k - max_exp_ + 1;
  }

  void reset_segment() {
    letters_.clear();
    matrix_ = identity_;
    prev_set_.reset();
    for (std::size_t s = 0; s < cycles_.size(); ++s) {
      cycles_[s].order.resize(gen_count_[s]);
      for (std::size_t i = 0; i < gen_count_[s]; ++i) cycles_[s].order[i] = i;
      std::shuffle(cycles_[s].order.begin(), cycles_[s].order.end(), rng_);
      cycles_[s].pos = 0;
    }
  }

  struct Cycle {
    std::vector<std::size_t> order;
    std::size_t pos = 0;
  };

  const std::vector<Letter>* a_;
  std::size_t max_bits_;
  int max_exp_;
  SearchStats* stats_;
  IMat identity_;
  IMat matrix_;
  std::mt19937_64 rng_;
  std::bernoulli_distribution restart_;
  std::vector<std::size_t> gen_count_;
  std::vector<std::size_t> pair_base_;
  std::vector<Cycle> cycles_;
  std::vector<std::size_t> letters_;
  std::optional<std::size_t> prev_set_;
};

// bfs, walk, or their strict alternation (bfs first).
class CandidateStream {
 public:
  CandidateStream(Strategy strategy, const std::vector<Letter>* alphabet,
                  const std::vector<GeneratorSet>* sets, const SearchConfig& cfg,
                  std::size_t rank, SearchStats* stats) {
    if (strategy == Strategy::bfs || strategy == Strategy::interleaved)
      bfs_.emplace(alphabet, cfg.max_word_length, cfg.max_entry_bits, rank, stats);
    if (strategy == Strategy::random_walk || strategy == Strategy::interleaved)
      walk_.emplace(alphabet, sets, cfg, rank, stats);
  }

  std::optional<Candidate> next() {
    if (bfs_ && walk_) {
      turn_ = !turn_;
      if (turn_) {
        if (auto c = bfs_->next()) return c;
        bfs_.reset();  // layers exhausted; the walk continues alone
        return walk_->next();
      }
      return walk_->next();
    }
    if (bfs_) return bfs_->next();
    return walk_->next();
  }

 private:
  std::optional<BfsStream> bfs_;
  std::optional<WalkStream> walk_;
  bool turn_ = false;
};

struct Exam {
  std::size_t index = 0;
  Candidate cand;
  bool dup = false;
  bool det_pruned = false;
  std::optional<SalemClassification> hit;
};

void examine(Exam& e, std::size_t rank, bool require_full) {
  if (require_full) {
    // (t -+ 1) | char poly would leave a cyclotomic factor; an exact
    // determinant is an order of magnitude cheaper than the char poly.
    IMat id = IMat::identity(rank);
    if ((e.cand.matrix - id).det() == 0 || (e.cand.matrix + id).det() == 0) {
      e.det_pruned = true;
      return;
    }
  }
  SalemClassification c = classify(char_poly(e.cand.matrix));
  if (c.salem_factor && (!require_full || (c.salem_degree && *c.salem_degree == rank)))
    e.hit = std::move(c);
}

IVec sign_normalized(const IVec& v) {
  for (const Int& x : v) {
    if (x == 0) continue;
    if (x < 0) {
      IVec w(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) w[i] = -v[i];
      return w;
    }
    break;
  }
  return v;
}

}  // namespace

GeneratorSet to_generator_set(const ParabolicGroup& p) { return GeneratorSet{p.e, p.generators}; }

Strategy strategy_from_name(const std::string& name) {
  if (name == "bfs") return Strategy::bfs;
  if (name == "rw" || name == "random-walk" || name == "walk") return Strategy::random_walk;
  if (name == "mix" || name == "interleaved") return Strategy::interleaved;
  throw validation_error("unknown strategy '" + name + "' (expected bfs, rw, or mix)");
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::bfs: return "bfs";
    case Strategy::random_walk: return "random-walk";
    case Strategy::interleaved: return "interleaved";
  }
  return "?";
}

SalemCertificate salem_search(const std::vector<GeneratorSet>& sets,
                              std::shared_ptr<const GramLattice> lattice,
                              const SearchConfig& cfg) {
  if (!lattice) throw validation_error("search needs a lattice");
  if (cfg.max_words == 0 || cfg.max_word_length == 0)
    throw validation_error("budgets must be positive");
  if (cfg.tol <= 0) throw validation_error("tolerance must be positive");
  if (cfg.max_exponent < 1) throw validation_error("exponent bound must be at least 1");
  if (cfg.workers < 1) throw validation_error("worker count must be at least 1");
  if (sets.empty()) throw validation_error("search needs at least one generator set");

  const std::size_t n = lattice->rank();
  std::size_t total_gens = 0;
  for (const GeneratorSet& s : sets) {
    if (s.e.size() != n) throw validation_error("fixed vector length does not match the lattice rank");
    if (!is_primitive(s.e)) throw validation_error("fixed vector must be primitive");
    if (lattice->norm(s.e) != 0) throw validation_error("fixed vector must be isotropic");
    for (const Isometry& g : s.generators) {
      if (g.matrix().rows() != n || g.lattice()->gram() != lattice->gram())
        throw validation_error("generator lattice does not match the search lattice");
      if (!in_so_plus(g)) throw validation_error("generators must lie in SO+");
      if (g.matrix() * s.e != s.e)
        throw validation_error("generator does not fix its set's isotropic vector");
    }
    total_gens += s.generators.size();
  }
  if (total_gens == 0) throw validation_error("generator sets are all empty");

  SearchStats stats;
  if (cfg.require_full_degree) {
    std::set<IVec> distinct;
    for (const GeneratorSet& s : sets) distinct.insert(sign_normalized(s.e));
    if (distinct.size() < 2) {
      // Every word fixes e, so eigenvalue 1 persists and full degree is
      // unreachable; burning the budget would only confirm that.
      stats.degenerate_configuration = true;
      throw SearchExhausted(
          "degenerate configuration: all generator sets fix the same isotropic vector", stats);
    }
  }

  std::vector<Letter> alphabet = build_alphabet(sets, cfg.max_exponent);
  CandidateStream stream(cfg.strategy, &alphabet, &sets, cfg, n, &stats);

  // Dedup by content hash with exact confirmation. Past the cap new
  // matrices are no longer remembered; duplicates then re-classify, which
  // costs time but never changes the outcome.
  constexpr std::size_t kDedupCap = 200000;
  std::unordered_map<std::uint64_t, std::vector<IMat>> seen;
  std::size_t stored = 0;

  const std::size_t batch_size = std::max<std::size_t>(1, cfg.workers);
  std::size_t next_index = 0;
  bool stream_done = false;
  std::vector<Exam> batch;

  while (!stream_done) {
    batch.clear();
    while (batch.size() < batch_size && !stream_done) {
      if (next_index >= cfg.max_words) {
        stream_done = true;
        break;
      }
      std::optional<Candidate> c = stream.next();
      if (!c) {
        stream_done = true;
        break;
      }
      Exam e;
      e.index = next_index++;
      e.cand = std::move(*c);
      std::uint64_t h = e.cand.matrix.fingerprint();
      auto it = seen.find(h);
      if (it != seen.end())
        for (const IMat& m : it->second)
          if (m == e.cand.matrix) {
            e.dup = true;
            break;
          }
      if (!e.dup && stored < kDedupCap) {
        seen[h].push_back(e.cand.matrix);
        ++stored;
      }
      batch.push_back(std::move(e));
    }
    if (batch.empty()) break;

    if (batch.size() == 1 || cfg.workers == 1) {
      for (Exam& e : batch)
        if (!e.dup) examine(e, n, cfg.require_full_degree);
    } else {
      std::vector<std::future<void>> futs;
      for (Exam& e : batch)
        if (!e.dup)
          futs.push_back(std::async(std::launch::async,
                                    [&e, n, &cfg] { examine(e, n, cfg.require_full_degree); }));
      for (std::future<void>& f : futs) f.get();
    }

    // Fold outcomes in candidate order so the reported certificate and its
    // counters do not depend on the worker count.
    for (Exam& e : batch) {
      ++stats.words_examined;
      if (e.dup) {
        ++stats.dedup_hits;
        continue;
      }
      if (e.det_pruned) {
        ++stats.pruned_det;
        continue;
      }
      if (!e.hit) continue;

      SalemCertificate cert;
      cert.schema = 1;
      cert.lattice_name = lattice->name();
      cert.lattice_hash = lattice->fingerprint();
      for (std::size_t L : e.cand.letters) {
        const Letter& a = alphabet[L];
        cert.word.push_back(WordLetter{a.set, a.gen, a.exp});
      }
      cert.matrix = e.cand.matrix;
      cert.char_poly = char_poly(cert.matrix);
      cert.classification = std::move(*e.hit);
      cert.entropy = spectral_radius(cert.classification, cfg.tol);
      cert.full_degree = cert.classification.salem_degree &&
                         *cert.classification.salem_degree == n;
      cert.non_liftable_flag = cert.full_degree && n == 22;
      cert.stats = stats;
      return cert;
    }
  }

  throw SearchExhausted("search exhausted after " + std::to_string(stats.words_examined) +
                            " candidates without a qualifying word",
                        stats);
}

bool verify(const SalemCertificate& cert, const GramLattice& lattice,
            const std::vector<GeneratorSet>& sets, std::string* diff) {
  std::vector<std::string> bad;
  auto fail = [&](const std::string& s) { bad.push_back(s); };

  if (cert.schema != 1) fail("schema: expected 1, found " + std::to_string(cert.schema));
  if (cert.lattice_name != lattice.name())
    fail("lattice: expected '" + lattice.name() + "', found '" + cert.lattice_name + "'");
  if (cert.lattice_hash != lattice.fingerprint()) fail("lattice: fingerprint mismatch");

  const std::size_t n = lattice.rank();
  bool word_ok = true;
  if (cert.word.empty()) {
    fail("word: empty");
    word_ok = false;
  }
  for (const WordLetter& w : cert.word) {
    if (w.set >= sets.size() || w.gen >= sets[w.set].generators.size() || w.exp == 0) {
      fail("word: letter (" + std::to_string(w.set) + ", " + std::to_string(w.gen) + ", " +
           std::to_string(w.exp) + ") out of range");
      word_ok = false;
      break;
    }
  }
  if (word_ok) {
    IMat prod = IMat::identity(n);
    for (const WordLetter& w : cert.word) {
      const Isometry& g = sets[w.set].generators[w.gen];
      IMat base = w.exp > 0 ? g.matrix() : g.inverse().matrix();
      prod = prod * base.pow(static_cast<unsigned>(std::abs(w.exp)));
    }
    if (prod != cert.matrix) fail("matrix: differs from the product of the cited word");
  }

  if (cert.matrix.rows() != n || !cert.matrix.is_square()) {
    fail("matrix: wrong shape");
    if (diff) *diff = [&] {
      std::string s;
      for (const std::string& b : bad) s += (s.empty() ? "" : "\n") + b;
      return s;
    }();
    return false;
  }
  try {
    validate(cert.matrix, std::make_shared<const GramLattice>(lattice));
  } catch (const validation_error& ex) {
    fail(std::string("matrix: ") + ex.what());
  }

  IntPolynomial cp = char_poly(cert.matrix);
  if (!(cp == cert.char_poly)) fail("char_poly: recomputation differs");
  SalemClassification c = classify(cp);
  if (c.kind != cert.classification.kind)
    fail("classification: expected " + to_string(c.kind) + ", found " +
         to_string(cert.classification.kind));
  if (c.cyclotomic_factors != cert.classification.cyclotomic_factors)
    fail("classification: cyclotomic factors differ");
  if (c.salem_factor.has_value() != cert.classification.salem_factor.has_value() ||
      (c.salem_factor && !(*c.salem_factor == *cert.classification.salem_factor)))
    fail("classification: salem factor differs");
  if (c.salem_degree != cert.classification.salem_degree)
    fail("classification: salem degree differs");

  bool full = c.salem_degree && *c.salem_degree == n;
  if (cert.full_degree != full)
    fail(std::string("full_degree: expected ") + (full ? "true" : "false"));
  bool lift = full && n == 22;
  if (cert.non_liftable_flag != lift)
    fail(std::string("non_liftable_flag: expected ") + (lift ? "true" : "false"));

  const EntropyInterval& e = cert.entropy;
  if (e.lower < 1 || e.upper < e.lower) {
    fail("entropy: malformed interval");
  } else {
    if (c.salem_factor) {
      // lambda lies in [lo, hi] iff the unique trace root above 2 lies in
      // (lo + 1/lo, hi + 1/hi]: x + 1/x is increasing past 1, rational
      // endpoints never coincide with the root, and Sturm counts exactly.
      IntPolynomial tr = trace_polynomial(*c.salem_factor);
      Rat ylo = e.lower + Rat(1) / e.lower;
      Rat yhi = e.upper + Rat(1) / e.upper;
      if (ylo == yhi || sturm_count(tr, ylo, yhi) == 0)
        fail("entropy: interval does not contain the Salem root");
    } else {
      if (!(e.lower <= 1 && 1 <= e.upper))
        fail("entropy: zero-entropy interval must contain 1");
    }
    if (e.log_lower != log_decimal(e.lower, true)) fail("entropy: log_lower string differs");
    if (e.log_upper != log_decimal(e.upper, false)) fail("entropy: log_upper string differs");
  }

  if (diff) {
    std::string s;
    for (const std::string& b : bad) {
      if (!s.empty()) s += "\n";
      s += b;
    }
    *diff = s;
  }
  return bad.empty();
}

EntropyInterval entropy_of(const Isometry& g, const Rat& tol) {
  if (!g.cone_preserving())
    throw validation_error("entropy is defined for cone-preserving isometries");
  return spectral_radius(classify(char_poly(g.matrix())), tol);
}

}  // namespace salemforge
