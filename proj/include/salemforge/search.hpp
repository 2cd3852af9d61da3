#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "salemforge/intpoly.hpp"
#include "salemforge/isometry.hpp"
#include "salemforge/lattice.hpp"

namespace salemforge {

// One alphabet of the search: isometries that all fix the same primitive
// isotropic vector e (a parabolic group, in practice).
struct GeneratorSet {
  IVec e;
  std::vector<Isometry> generators;
};

GeneratorSet to_generator_set(const ParabolicGroup& p);

enum class Strategy { bfs, random_walk, interleaved };

// Accepts "bfs", "rw"/"random-walk", "mix"/"interleaved".
Strategy strategy_from_name(const std::string& name);
std::string to_string(Strategy s);

struct SearchConfig {
  Strategy strategy = Strategy::interleaved;
  std::size_t max_word_length = 48;
  std::size_t max_words = 1000000;  // candidate budget, duplicates included
  std::uint64_t seed = 1;
  Rat tol = Rat(1, 1000000);        // entropy interval width
  bool require_full_degree = true;
  int max_exponent = 3;             // letters use exponents -max..-1, 1..max
  std::size_t max_entry_bits = 4096;
  std::size_t workers = 1;
};

// One letter of a word: generators[gen] of sets[set], raised to exp.
struct WordLetter {
  std::size_t set = 0;
  std::size_t gen = 0;
  int exp = 0;
  bool operator==(const WordLetter& o) const = default;
};

struct SearchStats {
  std::size_t words_examined = 0;  // candidates considered, duplicates included
  std::size_t dedup_hits = 0;
  std::size_t pruned_det = 0;      // rejected by the det(g -+ I) != 0 prefilter
  std::size_t pruned_bits = 0;     // branches cut by the entry-size guard
  bool degenerate_configuration = false;
};

struct SalemCertificate {
  int schema = 1;
  std::string lattice_name;
  std::uint64_t lattice_hash = 0;
  std::vector<WordLetter> word;  // matrix = product of the letters, left to right
  IMat matrix;
  IntPolynomial char_poly;
  SalemClassification classification;
  EntropyInterval entropy;
  bool full_degree = false;       // salem degree equals the lattice rank
  bool non_liftable_flag = false; // full degree on a rank-22 lattice
  SearchStats stats;
};

class SearchExhausted : public std::runtime_error {
 public:
  SearchExhausted(const std::string& msg, SearchStats stats)
      : std::runtime_error(msg), stats_(stats) {}
  const SearchStats& stats() const { return stats_; }

 private:
  SearchStats stats_;
};

// Explores words in the generator sets until one has a Salem characteristic
// polynomial (of full degree when required); deterministic for a fixed
// config: the certificate is the first success in candidate order no matter
// how many workers examine candidates. Throws SearchExhausted when the
// budget or the word-length cap runs out.
SalemCertificate salem_search(const std::vector<GeneratorSet>& sets,
                              std::shared_ptr<const GramLattice> lattice,
                              const SearchConfig& cfg);

// Recomputes everything a certificate claims: the word product, the
// characteristic polynomial, the classification, the flags, and containment
// of the spectral radius in the stated interval (a widened interval still
// verifies). Returns false and fills diff with one line per mismatch.
bool verify(const SalemCertificate& cert, const GramLattice& lattice,
            const std::vector<GeneratorSet>& sets, std::string* diff = nullptr);

// classify + spectral_radius for a single isometry's action. Rejects
// non-cone-preserving inputs: entropy lives on the cone-preserving group.
EntropyInterval entropy_of(const Isometry& g, const Rat& tol);

}  // namespace salemforge
