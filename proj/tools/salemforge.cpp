// Command line front end. Exit codes: 0 success, 2 invalid input or failed
// verification, 3 search exhausted, 4 filesystem trouble.

#include <CLI11.hpp>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "salemforge/catalog.hpp"
#include "salemforge/errors.hpp"
#include "salemforge/intpoly.hpp"
#include "salemforge/isometry.hpp"
#include "salemforge/lattice.hpp"
#include "salemforge/search.hpp"
#include "salemforge/serialize.hpp"

using namespace salemforge;

namespace {

std::string signature_str(const Signature& s) {
  return "(" + std::to_string(s.pos) + "," + std::to_string(s.zero) + "," +
         std::to_string(s.neg) + ")";
}

std::string ivec_str(const IVec& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i].get_str();
  }
  return out + ")";
}

IVec parse_csv_ints(const std::string& s) {
  IVec v;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t a = part.find_first_not_of(" \t");
    std::size_t b = part.find_last_not_of(" \t");
    if (a == std::string::npos) throw validation_error("empty coordinate in '" + s + "'");
    try {
      v.emplace_back(part.substr(a, b - a + 1), 10);
    } catch (const std::invalid_argument&) {
      throw validation_error("'" + part + "' is not an integer");
    }
  }
  if (v.empty()) throw validation_error("no coordinates given");
  return v;
}

Rat parse_tol(const std::string& s) {
  Rat t = rat_from_string(s);
  if (t <= 0) throw validation_error("tolerance must be positive");
  return t;
}

std::shared_ptr<const GramLattice> load_lattice(const std::string& path) {
  return std::make_shared<const GramLattice>(lattice_from_json(load_json_file(path)));
}

Json lattice_profile(const GramLattice& l) {
  Json j{{"name", l.name()},
         {"rank", l.rank()},
         {"signature", to_json(l.signature())},
         {"even", l.is_even()},
         {"hyperbolic", l.is_hyperbolic()},
         {"det", int_to_json(l.gram().det())}};
  return j;
}

void print_lattice_profile(const GramLattice& l) {
  std::cout << "name: " << l.name() << "\n"
            << "rank: " << l.rank() << "\n"
            << "signature: " << signature_str(l.signature()) << "\n"
            << "even: " << (l.is_even() ? "yes" : "no") << "\n"
            << "hyperbolic: " << (l.is_hyperbolic() ? "yes" : "no") << "\n"
            << "det: " << l.gram().det().get_str() << "\n";
}

void print_classification(const SalemClassification& c) {
  std::cout << "kind: " << to_string(c.kind) << "\n";
  if (!c.cyclotomic_factors.empty()) {
    std::cout << "cyclotomic factors:";
    for (auto [n, m] : c.cyclotomic_factors) {
      std::cout << " Phi_" << n;
      if (m > 1) std::cout << "^" << m;
    }
    std::cout << "\n";
  }
  if (c.salem_factor)
    std::cout << "salem factor: " << c.salem_factor->to_string() << "\n"
              << "salem degree: " << *c.salem_degree << "\n";
}

void print_interval(const EntropyInterval& e) {
  std::cout << "lambda in [" << rat_to_string(e.lower) << ", " << rat_to_string(e.upper) << "]\n"
            << "log lambda in [" << e.log_lower << ", " << e.log_upper << "]\n";
}

void print_certificate(const SalemCertificate& c) {
  std::cout << "lattice: " << c.lattice_name << "\n"
            << "word length: " << c.word.size() << "\n";
  print_classification(c.classification);
  print_interval(c.entropy);
  std::cout << "full degree: " << (c.full_degree ? "yes" : "no")
            << ", non-liftable: " << (c.non_liftable_flag ? "yes" : "no") << "\n"
            << "words examined: " << c.stats.words_examined << " (dedup " << c.stats.dedup_hits
            << ", det-pruned " << c.stats.pruned_det << ", size-pruned " << c.stats.pruned_bits
            << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact Salem isometries on integer hyperbolic lattices"};
  app.require_subcommand(1);

  bool json = false;
  auto add_json = [&json](CLI::App* sub) {
    sub->add_flag("--json", json, "machine-readable output");
  };
  std::function<int()> run;

  struct {
    std::string expr, file, file2, out, evec, tol = "1/1000000", strategy = "mix", entry;
    unsigned bound = 1, degree_bound = 0, workers = 1;
    bool exclude_deg2 = false;
    std::size_t budget = 1000000, max_len = 48;
    std::uint64_t seed = 1;
    std::string out_dir = "certs";
  } o;

  // lattice
  auto* lat_cmd = app.add_subcommand("lattice", "build and inspect lattices");
  lat_cmd->require_subcommand(1);
  {
    auto* c = lat_cmd->add_subcommand("build", "build a lattice from an expression like U+E8");
    c->add_option("expr", o.expr, "sum of U, U(n), A_k, D_k, E_k, or [[...]] literals")->required();
    c->add_option("--out", o.out, "write the lattice as JSON");
    add_json(c);
    c->callback([&] {
      run = [&] {
        GramLattice l = build_lattice(o.expr);
        if (!o.out.empty()) write_json_atomic(o.out, to_json(l));
        if (json)
          std::cout << canonical_dump(lattice_profile(l));
        else {
          print_lattice_profile(l);
          if (!o.out.empty()) std::cout << "wrote " << o.out << "\n";
        }
        return 0;
      };
    });
  }
  {
    auto* c = lat_cmd->add_subcommand("info", "profile of a lattice JSON file");
    c->add_option("file", o.file, "lattice JSON")->required();
    add_json(c);
    c->callback([&] {
      run = [&] {
        auto l = load_lattice(o.file);
        if (json)
          std::cout << canonical_dump(lattice_profile(*l));
        else
          print_lattice_profile(*l);
        return 0;
      };
    });
  }
  {
    auto* c = lat_cmd->add_subcommand("disc", "discriminant group of a lattice JSON file");
    c->add_option("file", o.file, "lattice JSON")->required();
    add_json(c);
    c->callback([&] {
      run = [&] {
        auto l = load_lattice(o.file);
        DiscriminantProfile d = discriminant(*l);
        if (json) {
          std::cout << canonical_dump(to_json(d));
        } else {
          std::cout << "elementary divisors:";
          for (const Int& v : d.elementary_divisors) std::cout << " " << v.get_str();
          if (d.elementary_divisors.empty()) std::cout << " none (unimodular)";
          std::cout << "\ngroup order: " << d.group_order.get_str() << "\n";
          if (d.p_elementary)
            std::cout << "p-elementary: p = " << d.p_elementary->first.get_str()
                      << ", sigma = " << d.p_elementary->second << "\n";
        }
        return 0;
      };
    });
  }
  {
    auto* c = lat_cmd->add_subcommand("isotropic", "primitive isotropic vectors up to a height");
    c->add_option("file", o.file, "lattice JSON")->required();
    c->add_option("--bound", o.bound, "coordinate bound")->capture_default_str();
    add_json(c);
    c->callback([&] {
      run = [&] {
        auto l = load_lattice(o.file);
        std::vector<IVec> vs = find_isotropic(*l, o.bound);
        if (json) {
          Json arr = Json::array();
          for (const IVec& v : vs) arr.push_back(to_json(v));
          std::cout << canonical_dump(Json{{"count", vs.size()}, {"vectors", std::move(arr)}});
        } else {
          for (const IVec& v : vs) std::cout << ivec_str(v) << "\n";
          std::cout << vs.size() << " vectors\n";
        }
        return 0;
      };
    });
  }

  // poly
  auto* poly_cmd = app.add_subcommand("poly", "classify integer polynomials");
  poly_cmd->require_subcommand(1);
  {
    auto* c = poly_cmd->add_subcommand(
        "classify", "factor as cyclotomics times at most one Salem polynomial");
    c->add_option("file", o.file, "JSON array of coefficients, ascending")->required();
    c->add_option("--degree-bound", o.degree_bound, "cap on cyclotomic degrees tried (0 = poly degree)");
    c->add_flag("--exclude-degree-2", o.exclude_deg2, "do not accept quadratic Salem factors");
    add_json(c);
    c->callback([&] {
      run = [&] {
        IntPolynomial p = poly_from_json(load_json_file(o.file));
        SalemClassification cl = classify(p, {o.degree_bound, o.exclude_deg2});
        if (json)
          std::cout << canonical_dump(to_json(cl));
        else {
          std::cout << "poly: " << p.to_string() << "\n";
          print_classification(cl);
        }
        return 0;
      };
    });
  }
  {
    auto* c = poly_cmd->add_subcommand("radius", "rigorous spectral radius interval");
    c->add_option("file", o.file, "JSON array of coefficients, ascending")->required();
    c->add_option("--tol", o.tol, "interval width, a rational like 1/1000000")->capture_default_str();
    add_json(c);
    c->callback([&] {
      run = [&] {
        IntPolynomial p = poly_from_json(load_json_file(o.file));
        SalemClassification cl = classify(p);
        EntropyInterval e = spectral_radius(cl, parse_tol(o.tol));
        if (json)
          std::cout << canonical_dump(Json{{"classification", to_json(cl)}, {"radius", to_json(e)}});
        else {
          print_classification(cl);
          print_interval(e);
        }
        return 0;
      };
    });
  }

  // isometry
  auto* iso_cmd = app.add_subcommand("isometry", "check matrices and build parabolic generators");
  iso_cmd->require_subcommand(1);
  {
    auto* c = iso_cmd->add_subcommand("check", "validate a matrix as a lattice isometry");
    c->add_option("lattice", o.file, "lattice JSON")->required();
    c->add_option("matrix", o.file2, "matrix JSON (array of rows)")->required();
    add_json(c);
    c->callback([&] {
      run = [&] {
        auto l = load_lattice(o.file);
        Isometry g = validate(imat_from_json(load_json_file(o.file2)), l);
        IntPolynomial cp = char_poly(g.matrix());
        SalemClassification cl = classify(cp);
        if (json) {
          std::cout << canonical_dump(Json{{"det", g.det_sign()},
                                           {"cone_preserving", g.cone_preserving()},
                                           {"so_plus", in_so_plus(g)},
                                           {"char_poly", to_json(cp)},
                                           {"classification", to_json(cl)}});
        } else {
          std::cout << "isometry of " << l->name() << "\n"
                    << "det: " << (g.det_sign() > 0 ? "+1" : "-1") << "\n"
                    << "cone preserving: " << (g.cone_preserving() ? "yes" : "no") << "\n"
                    << "SO+: " << (in_so_plus(g) ? "yes" : "no") << "\n"
                    << "char poly: " << cp.to_string() << "\n";
          print_classification(cl);
        }
        return 0;
      };
    });
  }
  {
    auto* c = iso_cmd->add_subcommand("parabolic",
                                      "transvection generators fixing an isotropic vector");
    c->add_option("lattice", o.file, "lattice JSON")->required();
    c->add_option("--e", o.evec, "isotropic vector, comma-separated")->required();
    c->add_option("--out", o.out, "write the generator set as JSON");
    add_json(c);
    c->callback([&] {
      run = [&] {
        auto l = load_lattice(o.file);
        ParabolicGroup p = parabolic_group(l, parse_csv_ints(o.evec));
        GeneratorSet gs = to_generator_set(p);
        if (!o.out.empty()) write_json_atomic(o.out, to_json(gs, *l));
        if (json)
          std::cout << canonical_dump(
              Json{{"e", to_json(gs.e)}, {"generators", gs.generators.size()}});
        else {
          std::cout << "e: " << ivec_str(gs.e) << "\n"
                    << "generators: " << gs.generators.size() << "\n";
          if (!o.out.empty()) std::cout << "wrote " << o.out << "\n";
        }
        return 0;
      };
    });
  }

  // search
  auto* search_cmd = app.add_subcommand("search", "find and verify Salem certificates");
  search_cmd->require_subcommand(1);
  {
    auto* c = search_cmd->add_subcommand("salem", "search words of parabolic generators");
    c->add_option("--lattice", o.file, "lattice JSON")->required();
    c->add_option("--gens", o.file2, "generator set JSON (one object or an array)")->required();
    c->add_option("--strategy", o.strategy, "bfs, rw, or mix")->capture_default_str();
    c->add_option("--budget", o.budget, "candidate word budget")->capture_default_str();
    c->add_option("--max-len", o.max_len, "maximum word length")->capture_default_str();
    c->add_option("--seed", o.seed, "random walk seed")->capture_default_str();
    c->add_option("--tol", o.tol, "entropy interval width")->capture_default_str();
    c->add_option("--workers", o.workers, "parallel classification workers")->capture_default_str();
    c->add_option("--out", o.out, "certificate output path")->required();
    add_json(c);
    c->callback([&] {
      run = [&] {
        auto l = load_lattice(o.file);
        std::vector<GeneratorSet> sets = generator_sets_from_json(load_json_file(o.file2), l);
        SearchConfig cfg;
        cfg.strategy = strategy_from_name(o.strategy);
        cfg.max_words = o.budget;
        cfg.max_word_length = o.max_len;
        cfg.seed = o.seed;
        cfg.tol = parse_tol(o.tol);
        cfg.workers = o.workers;
        SalemCertificate cert = salem_search(sets, l, cfg);
        write_json_atomic(o.out, to_json(cert));
        if (json)
          std::cout << canonical_dump(Json{{"certificate", to_json(cert)}, {"path", o.out}});
        else {
          print_certificate(cert);
          std::cout << "wrote " << o.out << "\n";
        }
        return 0;
      };
    });
  }
  {
    auto* c = search_cmd->add_subcommand("verify", "recheck a certificate from scratch");
    c->add_option("cert", o.expr, "certificate JSON")->required();
    c->add_option("--lattice", o.file, "lattice JSON")->required();
    c->add_option("--gens", o.file2, "generator set JSON used for the search")->required();
    add_json(c);
    c->callback([&] {
      run = [&] {
        auto l = load_lattice(o.file);
        std::vector<GeneratorSet> sets = generator_sets_from_json(load_json_file(o.file2), l);
        SalemCertificate cert = certificate_from_json(load_json_file(o.expr));
        std::string diff;
        bool ok = verify(cert, *l, sets, &diff);
        if (json) {
          Json lines = Json::array();
          std::stringstream ss(diff);
          for (std::string line; std::getline(ss, line);) lines.push_back(line);
          std::cout << canonical_dump(Json{{"verified", ok}, {"diff", std::move(lines)}});
        } else if (ok) {
          std::cout << "verified\n";
        } else {
          std::cout << "verification FAILED:\n" << diff << "\n";
        }
        return ok ? 0 : 2;
      };
    });
  }

  // catalog
  auto* cat_cmd = app.add_subcommand("catalog", "built-in lattice instances");
  {
    auto* c = cat_cmd->add_subcommand("list", "list catalog entries with checked profiles");
    add_json(c);
    c->callback([&] {
      run = [&] {
        const auto& entries = catalog_list();
        if (json) {
          Json arr = Json::array();
          for (const CatalogEntry& e : entries) {
            Json divisors = Json::array();
            for (const Int& d : e.divisors) divisors.push_back(int_to_json(d));
            Json je{{"name", e.name},
                    {"expression", e.expression},
                    {"rank", e.rank},
                    {"signature", to_json(e.signature)},
                    {"even", e.even},
                    {"elementary_divisors", std::move(divisors)},
                    {"note", e.note}};
            je["p_elementary"] = e.p_elementary ? Json{{"p", int_to_json(e.p_elementary->first)},
                                                       {"sigma", e.p_elementary->second}}
                                                : Json();
            arr.push_back(std::move(je));
          }
          std::cout << canonical_dump(arr);
        } else {
          for (const CatalogEntry& e : entries) {
            std::cout << e.name << "  rank " << e.rank << "  signature "
                      << signature_str(e.signature) << "  disc [";
            for (std::size_t i = 0; i < e.divisors.size(); ++i)
              std::cout << (i ? "," : "") << e.divisors[i].get_str();
            std::cout << "]\n    " << e.note << "\n";
          }
        }
        return 0;
      };
    });
  }
  cat_cmd->require_subcommand(1);

  // demo
  {
    auto* c = app.add_subcommand("demo", "end-to-end certificate run on a catalog entry");
    c->add_option("entry", o.entry, "catalog entry name, e.g. U+E8+E8+D4")->required();
    c->add_option("--seed", o.seed, "search seed")->capture_default_str();
    c->add_option("--budget", o.budget, "candidate word budget")->capture_default_str();
    c->add_option("--tol", o.tol, "entropy interval width")->capture_default_str();
    c->add_option("--strategy", o.strategy, "bfs, rw, or mix")->capture_default_str();
    c->add_option("--max-len", o.max_len, "maximum word length")->capture_default_str();
    c->add_option("--workers", o.workers, "parallel classification workers")->capture_default_str();
    c->add_option("--bound", o.bound, "isotropic vector height bound")->capture_default_str();
    c->add_option("--out-dir", o.out_dir, "certificate directory")->capture_default_str();
    add_json(c);
    c->callback([&] {
      run = [&] {
        RunConfig cfg;
        cfg.seed = o.seed;
        cfg.tol = parse_tol(o.tol);
        cfg.budget = o.budget;
        cfg.max_word_length = o.max_len;
        cfg.workers = o.workers;
        cfg.strategy = strategy_from_name(o.strategy);
        cfg.height_bound = o.bound;
        cfg.out_dir = o.out_dir;
        DemoResult res = run_demo(o.entry, cfg);
        if (json) {
          std::cout << canonical_dump(Json{{"certificate", to_json(res.certificate)},
                                           {"certificate_path", res.certificate_path},
                                           {"config_path", res.config_path},
                                           {"e1", to_json(res.e1)},
                                           {"e2", to_json(res.e2)}});
        } else {
          std::cout << "e1: " << ivec_str(res.e1) << ", e2: " << ivec_str(res.e2) << "\n";
          print_certificate(res.certificate);
          std::cout << "wrote " << res.certificate_path << "\n";
        }
        return 0;
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return run ? run() : 2;
  } catch (const SearchExhausted& e) {
    if (json) std::cout << canonical_dump(Json{{"error", e.what()}, {"stats", to_json(e.stats())}});
    std::cerr << "search exhausted: " << e.what() << "\n";
    return 3;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
