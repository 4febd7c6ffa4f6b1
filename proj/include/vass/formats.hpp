#pragma once

#include "vass/gadgets.hpp"
#include "vass/model.hpp"
#include "vass/oracle.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vass::formats {

using Json = nlohmann::ordered_json;

// Integers are written as decimal strings. Parsing also accepts JSON integers.
Json int_to_json(const Int& value);
Json vec_to_json(const Vec& values);

Json scheme_to_json(const LinearScheme& scheme);
Json instance_to_json(const Instance& instance);
Json witness_to_json(const Witness& witness);

// Errors are SchemaError with a JSON pointer to the offending value.
LinearScheme scheme_from_json(const Json& doc);
Instance instance_from_json(const Json& doc);
Witness witness_from_json(const Json& doc);

// SchemaError on malformed input.
Json parse_json(const std::string& text);

// Canonical text: two-space indentation and a trailing newline.
std::string emit_instance(const Instance& instance);
Instance parse_instance(const std::string& text);
std::string emit_witness(const Witness& witness);
Witness parse_witness(const std::string& text);

struct DimacsResult {
    CnfFormula formula;
    std::vector<std::string> notes;  // normalization remarks
};

// Clauses of width 1..3 over distinct variables. Repeated literals are merged
// and tautological clauses dropped, each with a note.
DimacsResult parse_dimacs(const std::string& text);
std::string emit_dimacs(const CnfFormula& formula);

struct GeneratorSpec {
    std::size_t loops = 3;
    std::size_t dim = 2;
    long max_update = 2;
    std::optional<Int> endpoint_bound;  // endpoints in [0, bound]
    std::optional<unsigned> bits;       // endpoints below 2^bits
    std::uint64_t seed = 0;
};

// Deterministic for a fixed spec. Endpoints default to [0, 20].
Instance generate_random(const GeneratorSpec& spec);

}  // namespace vass::formats
