#include "salemforge/catalog.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <stdexcept>

#include "salemforge/errors.hpp"
#include "salemforge/isometry.hpp"

namespace salemforge {

namespace {

std::vector<CatalogEntry> build_entries() {
  std::vector<CatalogEntry> v;
  v.push_back({"U", "U", 2, {1, 0, 1}, true, {}, std::nullopt,
               "hyperbolic plane; rank 2 sits below the demo threshold"});
  v.push_back({"U+U", "U+U", 4, {2, 0, 2}, true, {}, std::nullopt,
               "signature (2,0,2): with two positive directions no isometry has a Salem "
               "characteristic polynomial, so the demo rejects this entry"});
  v.push_back({"U+A1+A1", "U+A1+A1", 4, {1, 0, 3}, true, {2, 2},
               std::make_pair(Int(2), 1u), "smallest hyperbolic demo case"});
  v.push_back({"U+E8", "U+E8", 10, {1, 0, 9}, true, {}, std::nullopt,
               "rank-10 unimodular hyperbolic lattice"});
  v.push_back({"U+E8+E8+D4", "U+E8+E8+D4", 22, {1, 0, 21}, true, {2, 2},
               std::make_pair(Int(2), 1u),
               "rank-22 lattice with (Z/2)^2 discriminant group"});
  for (int p : {2, 3, 5, 7, 11, 13}) {
    std::string name = "U(" + std::to_string(p) + ")+E8+E8";
    v.push_back({name, name, 18, {1, 0, 17}, true, {Int(p), Int(p)},
                 std::make_pair(Int(p), 1u),
                 "rank-18 lattice with (Z/" + std::to_string(p) + ")^2 discriminant group"});
  }
  return v;
}

void check_entry(const CatalogEntry& e) {
  GramLattice l = build_lattice(e.expression, e.even);
  DiscriminantProfile d = discriminant(l);
  bool ok = l.name() == e.name && l.rank() == e.rank && l.signature() == e.signature &&
            l.is_even() == e.even && d.elementary_divisors == e.divisors &&
            d.p_elementary == e.p_elementary;
  if (!ok) throw std::logic_error("catalog entry '" + e.name + "' no longer matches its lattice");
}

std::string utc_stamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

// Timestamp-seed stem, suffixed when a same-second run already claimed it.
std::string fresh_stem(const std::string& dir, std::uint64_t seed) {
  std::string base = utc_stamp() + "-" + std::to_string(seed);
  std::string stem = base;
  for (unsigned k = 2; std::filesystem::exists(dir + "/" + stem + ".json") ||
                       std::filesystem::exists(dir + "/" + stem + ".exhausted.json");
       ++k)
    stem = base + "-" + std::to_string(k);
  return stem;
}

}  // namespace

const std::vector<CatalogEntry>& catalog_list() {
  static const std::vector<CatalogEntry> entries = [] {
    std::vector<CatalogEntry> v = build_entries();
    for (const CatalogEntry& e : v) check_entry(e);
    return v;
  }();
  return entries;
}

const CatalogEntry* catalog_find(const std::string& name) {
  for (const CatalogEntry& e : catalog_list())
    if (e.name == name) return &e;
  return nullptr;
}

Json to_json(const RunConfig& cfg) {
  return Json{{"seed", cfg.seed},
              {"tol", rat_to_string(cfg.tol)},
              {"budget", cfg.budget},
              {"max_word_length", cfg.max_word_length},
              {"workers", cfg.workers},
              {"strategy", to_string(cfg.strategy)},
              {"height_bound", cfg.height_bound},
              {"out_dir", cfg.out_dir}};
}

DemoResult run_demo(const std::string& entry, const RunConfig& cfg) {
  const CatalogEntry* ce = catalog_find(entry);
  if (!ce) throw validation_error("unknown catalog entry '" + entry + "'");
  if (cfg.budget == 0) throw validation_error("budget must be positive");
  if (cfg.height_bound == 0) throw validation_error("height bound must be positive");

  auto l = std::make_shared<const GramLattice>(build_lattice(ce->expression, ce->even));
  if (l->rank() < 4)
    throw validation_error("entry '" + entry + "' has rank " + std::to_string(l->rank()) +
                           "; the demo needs rank >= 4");
  if (!l->is_hyperbolic()) {
    const Signature& s = l->signature();
    throw validation_error(
        "entry '" + entry + "' has signature (" + std::to_string(s.pos) + "," +
        std::to_string(s.zero) + "," + std::to_string(s.neg) +
        "); the demo needs hyperbolic signature (1,0,n), since with more than one "
        "positive direction no isometry has a Salem characteristic polynomial");
  }

  std::vector<IVec> iso = find_isotropic(*l, cfg.height_bound);
  if (iso.size() < 2)
    throw validation_error("entry '" + entry + "' has " + std::to_string(iso.size()) +
                           " primitive isotropic vectors within height " +
                           std::to_string(cfg.height_bound) + "; two are needed");
  IVec e1 = iso[0];
  IVec e2 = iso[1];
  std::vector<GeneratorSet> sets{to_generator_set(parabolic_group(l, e1)),
                                 to_generator_set(parabolic_group(l, e2))};

  SearchConfig scfg;
  scfg.strategy = cfg.strategy;
  scfg.max_word_length = cfg.max_word_length;
  scfg.max_words = cfg.budget;
  scfg.seed = cfg.seed;
  scfg.tol = cfg.tol;
  scfg.workers = cfg.workers;

  std::string dir = cfg.out_dir + "/" + entry;
  std::string stem = fresh_stem(dir, cfg.seed);

  auto t0 = std::chrono::steady_clock::now();
  auto wall_ms = [&t0] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - t0)
        .count();
  };

  SalemCertificate cert;
  try {
    cert = salem_search(sets, l, scfg);
  } catch (const SearchExhausted& ex) {
    Json j{{"entry", entry},
           {"error", ex.what()},
           {"stats", to_json(ex.stats())},
           {"config", to_json(cfg)},
           {"wall_ms", wall_ms()}};
    write_json_atomic(dir + "/" + stem + ".exhausted.json", j);
    throw;
  }
  long long ms = wall_ms();

  std::string diff;
  if (!verify(cert, *l, sets, &diff))
    throw std::logic_error("demo certificate failed self-verification:\n" + diff);

  std::string cert_name = stem + ".json";
  std::string cert_path = dir + "/" + cert_name;
  write_json_atomic(cert_path, to_json(cert));
  Json run{{"entry", entry},
           {"certificate", cert_name},
           {"config", to_json(cfg)},
           {"e1", to_json(e1)},
           {"e2", to_json(e2)},
           {"wall_ms", ms}};
  std::string cfg_path = dir + "/" + stem + ".run.json";
  write_json_atomic(cfg_path, run);
  write_text_atomic(dir + "/latest", cert_name + "\n");

  return DemoResult{std::move(cert), cert_path, cfg_path, std::move(e1), std::move(e2)};
}

}  // namespace salemforge
