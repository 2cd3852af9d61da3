#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "salemforge/lattice.hpp"
#include "salemforge/search.hpp"
#include "salemforge/serialize.hpp"

namespace salemforge {

struct CatalogEntry {
  std::string name;        // also the demo key; equals the built lattice's name
  std::string expression;  // build_lattice input
  unsigned rank = 0;
  Signature signature;
  bool even = false;
  std::vector<Int> divisors;  // elementary divisors > 1 of the discriminant group
  std::optional<std::pair<Int, unsigned>> p_elementary;
  std::string note;
};

// Built-in instances. Every stated profile is recomputed and checked against
// the built lattice on first access; drift throws logic_error.
const std::vector<CatalogEntry>& catalog_list();
// Null when the name is unknown.
const CatalogEntry* catalog_find(const std::string& name);

struct RunConfig {
  std::uint64_t seed = 1;
  Rat tol = Rat(1, 1000000);
  std::size_t budget = 1000000;
  std::size_t max_word_length = 48;
  unsigned workers = 1;
  Strategy strategy = Strategy::interleaved;
  unsigned height_bound = 1;  // coordinate bound for the isotropic vector scan
  std::string out_dir = "certs";
};

Json to_json(const RunConfig& cfg);

struct DemoResult {
  SalemCertificate certificate;
  std::string certificate_path;
  std::string config_path;
  IVec e1, e2;
};

// End-to-end run on a catalog entry: build the lattice, take the two
// lexicographically smallest primitive isotropic vectors within the height
// bound, form their parabolic groups, and search products of the two for a
// full-degree Salem word. The certificate lands in
// <out_dir>/<entry>/<UTC stamp>-<seed>.json, the configuration and timing in
// <stem>.run.json beside it, and <out_dir>/<entry>/latest names the
// certificate file. Entries of rank < 4 or without hyperbolic signature are
// rejected. On exhaustion the stats are persisted to <stem>.exhausted.json
// and the exception is rethrown.
DemoResult run_demo(const std::string& entry, const RunConfig& cfg);

}  // namespace salemforge
