#include "salemforge/serialize.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>

#include "salemforge/errors.hpp"
#include "salemforge/isometry.hpp"

namespace salemforge {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw validation_error(std::string("expected an object with field '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw validation_error(std::string("missing field '") + key + "'");
  return *it;
}

const Json* optional_field(const Json& j, const char* key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  return &*it;
}

std::uint64_t u64_from_json(const Json& j, const char* what) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    auto v = j.get<std::int64_t>();
    if (v >= 0) return static_cast<std::uint64_t>(v);
  }
  throw validation_error(std::string(what) + " must be a non-negative integer");
}

bool bool_from_json(const Json& j, const char* what) {
  if (!j.is_boolean()) throw validation_error(std::string(what) + " must be a boolean");
  return j.get<bool>();
}

std::string string_from_json(const Json& j, const char* what) {
  if (!j.is_string()) throw validation_error(std::string(what) + " must be a string");
  return j.get<std::string>();
}

Int int_from_decimal(const std::string& s, const char* what) {
  if (s.empty()) throw validation_error(std::string(what) + " is empty");
  try {
    return Int(s, 10);
  } catch (const std::invalid_argument&) {
    throw validation_error(std::string(what) + " is not a decimal integer: '" + s + "'");
  }
}

SalemClassification::Kind kind_from_string(const std::string& s) {
  using Kind = SalemClassification::Kind;
  for (Kind k : {Kind::cyclotomic_product, Kind::salem, Kind::mixed, Kind::not_o_plus_shape})
    if (to_string(k) == s) return k;
  throw validation_error("unknown classification kind '" + s + "'");
}

}  // namespace

Json int_to_json(const Int& v) {
  if (v.fits_slong_p()) return Json(static_cast<std::int64_t>(v.get_si()));
  return Json(v.get_str());
}

Int int_from_json(const Json& j) {
  if (j.is_number_integer()) return Int(static_cast<long>(j.get<std::int64_t>()));
  if (j.is_number_unsigned()) return int_from_decimal(std::to_string(j.get<std::uint64_t>()), "integer");
  if (j.is_string()) return int_from_decimal(j.get<std::string>(), "integer");
  throw validation_error("expected an integer (number or decimal string)");
}

Json to_json(const IVec& v) {
  Json a = Json::array();
  for (const Int& x : v) a.push_back(int_to_json(x));
  return a;
}

IVec ivec_from_json(const Json& j) {
  if (!j.is_array()) throw validation_error("expected an array of integers");
  IVec v;
  v.reserve(j.size());
  for (const Json& x : j) v.push_back(int_from_json(x));
  return v;
}

Json to_json(const IMat& m) {
  Json a = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(int_to_json(m.at(i, k)));
    a.push_back(std::move(row));
  }
  return a;
}

IMat imat_from_json(const Json& j) {
  if (!j.is_array()) throw validation_error("expected an array of matrix rows");
  std::size_t rows = j.size();
  std::size_t cols = rows == 0 ? 0 : j.at(0).is_array() ? j.at(0).size() : 0;
  IMat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const Json& row = j.at(i);
    if (!row.is_array() || row.size() != cols)
      throw validation_error("matrix rows must be arrays of equal length");
    for (std::size_t k = 0; k < cols; ++k) m.at(i, k) = int_from_json(row.at(k));
  }
  return m;
}

std::string rat_to_string(const Rat& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rat rat_from_string(const std::string& s) {
  auto slash = s.find('/');
  Int num = int_from_decimal(slash == std::string::npos ? s : s.substr(0, slash), "numerator");
  Int den = slash == std::string::npos ? Int(1) : int_from_decimal(s.substr(slash + 1), "denominator");
  if (den == 0) throw validation_error("rational '" + s + "' has denominator zero");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

Json to_json(const IntPolynomial& p) {
  Json a = Json::array();
  for (const Int& c : p.coeffs()) a.push_back(c.get_str());
  return a;
}

IntPolynomial poly_from_json(const Json& j) {
  if (!j.is_array()) throw validation_error("expected an array of polynomial coefficients");
  std::vector<Int> c;
  c.reserve(j.size());
  for (const Json& x : j) c.push_back(int_from_json(x));
  return IntPolynomial(std::move(c));
}

Json to_json(const Signature& s) {
  return Json{{"positive", s.pos}, {"zero", s.zero}, {"negative", s.neg}};
}

Json to_json(const GramLattice& l) {
  Json j{{"name", l.name()}, {"gram", to_json(l.gram())}};
  j["cone_reference"] = l.cone_reference() ? to_json(*l.cone_reference()) : Json();
  return j;
}

GramLattice lattice_from_json(const Json& j) {
  std::string name = string_from_json(field(j, "name"), "lattice name");
  GramLattice l(name, imat_from_json(field(j, "gram")));
  if (const Json* cone = optional_field(j, "cone_reference")) {
    IVec stored = ivec_from_json(*cone);
    if (!l.cone_reference() || *l.cone_reference() != stored)
      throw validation_error("stored cone reference does not match the Gram matrix");
  }
  return l;
}

Json to_json(const GeneratorSet& s, const GramLattice& l) {
  Json gens = Json::array();
  for (const Isometry& g : s.generators) gens.push_back(to_json(g.matrix()));
  return Json{{"lattice", l.name()}, {"e", to_json(s.e)}, {"generators", std::move(gens)}};
}

GeneratorSet generator_set_from_json(const Json& j, const std::shared_ptr<const GramLattice>& l) {
  if (!l) throw validation_error("generator set needs a lattice");
  const Json& lj = field(j, "lattice");
  if (lj.is_string()) {
    if (lj.get<std::string>() != l->name())
      throw validation_error("generator set references lattice '" + lj.get<std::string>() +
                             "' but '" + l->name() + "' was supplied");
  } else {
    if (lattice_from_json(lj).gram() != l->gram())
      throw validation_error("inline lattice disagrees with the supplied one");
  }
  GeneratorSet s;
  s.e = ivec_from_json(field(j, "e"));
  const Json& gens = field(j, "generators");
  if (!gens.is_array()) throw validation_error("'generators' must be an array of matrices");
  for (const Json& gj : gens) s.generators.push_back(validate(imat_from_json(gj), l));
  return s;
}

std::vector<GeneratorSet> generator_sets_from_json(const Json& j,
                                                   const std::shared_ptr<const GramLattice>& l) {
  std::vector<GeneratorSet> out;
  if (j.is_array()) {
    for (const Json& e : j) out.push_back(generator_set_from_json(e, l));
  } else {
    out.push_back(generator_set_from_json(j, l));
  }
  return out;
}

Json to_json(const SalemClassification& c) {
  Json factors = Json::array();
  for (auto [n, mult] : c.cyclotomic_factors) factors.push_back(Json::array({n, mult}));
  Json j{{"kind", to_string(c.kind)}, {"cyclotomic_factors", std::move(factors)}};
  j["salem_factor"] = c.salem_factor ? to_json(*c.salem_factor) : Json();
  j["salem_degree"] = c.salem_degree ? Json(*c.salem_degree) : Json();
  return j;
}

SalemClassification classification_from_json(const Json& j) {
  SalemClassification c;
  c.kind = kind_from_string(string_from_json(field(j, "kind"), "classification kind"));
  const Json& factors = field(j, "cyclotomic_factors");
  if (!factors.is_array()) throw validation_error("'cyclotomic_factors' must be an array");
  for (const Json& f : factors) {
    if (!f.is_array() || f.size() != 2)
      throw validation_error("each cyclotomic factor must be a [n, multiplicity] pair");
    c.cyclotomic_factors.emplace_back(static_cast<unsigned>(u64_from_json(f.at(0), "cyclotomic index")),
                                      static_cast<unsigned>(u64_from_json(f.at(1), "multiplicity")));
  }
  if (const Json* sf = optional_field(j, "salem_factor")) c.salem_factor = poly_from_json(*sf);
  if (const Json* sd = optional_field(j, "salem_degree"))
    c.salem_degree = static_cast<unsigned>(u64_from_json(*sd, "salem degree"));
  return c;
}

Json to_json(const EntropyInterval& e) {
  return Json{{"lower", rat_to_string(e.lower)},
              {"upper", rat_to_string(e.upper)},
              {"log_lower", e.log_lower},
              {"log_upper", e.log_upper}};
}

EntropyInterval entropy_from_json(const Json& j) {
  EntropyInterval e;
  e.lower = rat_from_string(string_from_json(field(j, "lower"), "entropy lower bound"));
  e.upper = rat_from_string(string_from_json(field(j, "upper"), "entropy upper bound"));
  e.log_lower = string_from_json(field(j, "log_lower"), "log_lower");
  e.log_upper = string_from_json(field(j, "log_upper"), "log_upper");
  return e;
}

Json to_json(const SearchStats& s) {
  return Json{{"words_examined", s.words_examined},
              {"dedup_hits", s.dedup_hits},
              {"pruned_det", s.pruned_det},
              {"pruned_bits", s.pruned_bits},
              {"degenerate_configuration", s.degenerate_configuration}};
}

SearchStats stats_from_json(const Json& j) {
  SearchStats s;
  s.words_examined = static_cast<std::size_t>(u64_from_json(field(j, "words_examined"), "words_examined"));
  s.dedup_hits = static_cast<std::size_t>(u64_from_json(field(j, "dedup_hits"), "dedup_hits"));
  s.pruned_det = static_cast<std::size_t>(u64_from_json(field(j, "pruned_det"), "pruned_det"));
  s.pruned_bits = static_cast<std::size_t>(u64_from_json(field(j, "pruned_bits"), "pruned_bits"));
  s.degenerate_configuration =
      bool_from_json(field(j, "degenerate_configuration"), "degenerate_configuration");
  return s;
}

Json to_json(const SalemCertificate& c) {
  Json word = Json::array();
  for (const WordLetter& w : c.word) {
    word.push_back(Json::array({w.set, w.gen, w.exp}));
  }
  return Json{
      {"schema", c.schema},
      {"lattice", Json{{"name", c.lattice_name}, {"hash", std::to_string(c.lattice_hash)}}},
      {"word", std::move(word)},
      {"matrix", to_json(c.matrix)},
      {"char_poly", to_json(c.char_poly)},
      {"classification", to_json(c.classification)},
      {"entropy", to_json(c.entropy)},
      {"full_degree", c.full_degree},
      {"non_liftable", c.non_liftable_flag},
      {"stats", to_json(c.stats)}};
}

SalemCertificate certificate_from_json(const Json& j) {
  SalemCertificate c;
  const Json& schema = field(j, "schema");
  if (!schema.is_number_integer() && !schema.is_number_unsigned())
    throw validation_error("'schema' must be an integer");
  c.schema = schema.get<int>();
  const Json& lat = field(j, "lattice");
  c.lattice_name = string_from_json(field(lat, "name"), "lattice name");
  {
    Int h = int_from_decimal(string_from_json(field(lat, "hash"), "lattice hash"), "lattice hash");
    if (h < 0 || !h.fits_ulong_p()) throw validation_error("lattice hash out of range");
    c.lattice_hash = static_cast<std::uint64_t>(h.get_ui());
  }
  const Json& word = field(j, "word");
  if (!word.is_array()) throw validation_error("'word' must be an array of letters");
  for (const Json& wj : word) {
    if (!wj.is_array() || wj.size() != 3)
      throw validation_error("each word letter must be a [set, generator, exponent] triple");
    WordLetter w;
    w.set = static_cast<std::size_t>(u64_from_json(wj.at(0), "letter set index"));
    w.gen = static_cast<std::size_t>(u64_from_json(wj.at(1), "letter generator index"));
    if (!wj.at(2).is_number_integer() && !wj.at(2).is_number_unsigned())
      throw validation_error("letter exponent must be an integer");
    w.exp = wj.at(2).get<int>();
    c.word.push_back(w);
  }
  c.matrix = imat_from_json(field(j, "matrix"));
  c.char_poly = poly_from_json(field(j, "char_poly"));
  c.classification = classification_from_json(field(j, "classification"));
  c.entropy = entropy_from_json(field(j, "entropy"));
  c.full_degree = bool_from_json(field(j, "full_degree"), "full_degree");
  c.non_liftable_flag = bool_from_json(field(j, "non_liftable"), "non_liftable");
  c.stats = stats_from_json(field(j, "stats"));
  return c;
}

Json to_json(const DiscriminantProfile& d) {
  Json divisors = Json::array();
  for (const Int& v : d.elementary_divisors) divisors.push_back(int_to_json(v));
  Json j{{"elementary_divisors", std::move(divisors)}, {"group_order", int_to_json(d.group_order)}};
  j["p_elementary"] = d.p_elementary
                          ? Json{{"p", int_to_json(d.p_elementary->first)}, {"sigma", d.p_elementary->second}}
                          : Json();
  return j;
}

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

Json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw validation_error("invalid JSON in '" + path + "': " + e.what());
  }
}

void write_text_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw io_error("cannot create directory '" + target.parent_path().string() + "': " + ec.message());
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + tmp.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp, ec);
      throw io_error("write to '" + tmp.string() + "' failed");
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw io_error("cannot move '" + tmp.string() + "' into place: " + ec.message());
  }
}

void write_json_atomic(const std::string& path, const Json& j) {
  write_text_atomic(path, canonical_dump(j));
}

}  // namespace salemforge
