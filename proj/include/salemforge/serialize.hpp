#pragma once

#include <json.hpp>
#include <memory>
#include <string>
#include <vector>

#include "salemforge/intpoly.hpp"
#include "salemforge/lattice.hpp"
#include "salemforge/search.hpp"

namespace salemforge {

// Sorted-key JSON keeps every dump deterministic, which the byte-identical
// reproduction guarantees rely on.
using Json = nlohmann::json;

// Integers are JSON numbers when they fit in 64 bits, decimal strings
// otherwise; both parse back exactly.
Json int_to_json(const Int& v);
Int int_from_json(const Json& j);

Json to_json(const IVec& v);
IVec ivec_from_json(const Json& j);

Json to_json(const IMat& m);
IMat imat_from_json(const Json& j);

// Always "p/q".
std::string rat_to_string(const Rat& r);
Rat rat_from_string(const std::string& s);

// Array of decimal integer strings, ascending degree.
Json to_json(const IntPolynomial& p);
IntPolynomial poly_from_json(const Json& j);

Json to_json(const Signature& s);

// {name, gram, cone_reference}; the cone reference is recomputed on load
// and must match when the file carries one.
Json to_json(const GramLattice& l);
GramLattice lattice_from_json(const Json& j);

// {lattice: <name or inline object>, e, generators}; every generator matrix
// is re-validated against the lattice on load.
Json to_json(const GeneratorSet& s, const GramLattice& l);
GeneratorSet generator_set_from_json(const Json& j, const std::shared_ptr<const GramLattice>& l);
// A file holds one set object or an array of them.
std::vector<GeneratorSet> generator_sets_from_json(const Json& j,
                                                   const std::shared_ptr<const GramLattice>& l);

Json to_json(const SalemClassification& c);
SalemClassification classification_from_json(const Json& j);

Json to_json(const EntropyInterval& e);
EntropyInterval entropy_from_json(const Json& j);

Json to_json(const SearchStats& s);
SearchStats stats_from_json(const Json& j);

Json to_json(const SalemCertificate& c);
SalemCertificate certificate_from_json(const Json& j);

Json to_json(const DiscriminantProfile& d);

std::string canonical_dump(const Json& j);

// Filesystem problems raise io_error; malformed content raises
// validation_error.
Json load_json_file(const std::string& path);
void write_text_atomic(const std::string& path, const std::string& text);
void write_json_atomic(const std::string& path, const Json& j);

}  // namespace salemforge
