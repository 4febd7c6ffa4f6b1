#include "vass/formats.hpp"

#include "vass/error.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace vass::formats {

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
    throw Error(Errc::SchemaError, (where.empty() ? std::string("/") : where) + ": " + what);
}

const Json& member(const Json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object()) schema_error(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(where, "missing field \"" + key + "\"");
    return *it;
}

Int int_from_json(const Json& value, const std::string& where) {
    if (value.is_number_integer()) {
        if (value.is_number_unsigned()) return Int(std::to_string(value.get<std::uint64_t>()));
        return Int(std::to_string(value.get<std::int64_t>()));
    }
    if (!value.is_string()) schema_error(where, "expected an integer or a decimal string");
    try {
        return parse_int(value.get<std::string>());
    } catch (const Error&) {
        schema_error(where, "\"" + value.get<std::string>() + "\" is not a decimal integer");
    }
}

Vec vec_from_json(const Json& value, const std::string& where) {
    if (!value.is_array()) schema_error(where, "expected an array");
    Vec out;
    for (std::size_t i = 0; i < value.size(); ++i) out.push_back(int_from_json(value[i], where + "/" + std::to_string(i)));
    return out;
}

std::size_t index_from_json(const Json& value, const std::string& where) {
    Int v = int_from_json(value, where);
    if (sgn(v) < 0 || !v.fits_ulong_p()) schema_error(where, "expected a nonnegative index");
    return v.get_ui();
}

Configuration config_from_json(const Json& value, std::size_t dim, const std::string& where) {
    Vec v = vec_from_json(value, where);
    if (v.size() != dim)
        schema_error(where, "expected " + std::to_string(dim) + " entries, found " + std::to_string(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        if (sgn(v[i]) < 0) schema_error(where + "/" + std::to_string(i), "counter values must be nonnegative");
    return Configuration(std::move(v));
}

// Uniform draw in [lo, hi] from the raw engine output, which is fully specified.
long draw(std::mt19937_64& rng, long lo, long hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long>(rng() % span);
}

Int draw_bits(std::mt19937_64& rng, unsigned bits) {
    Int out = 0;
    unsigned left = bits;
    while (left > 0) {
        unsigned take = std::min(left, 32u);
        out <<= take;
        out += static_cast<unsigned long>(rng() & ((1ULL << take) - 1));
        left -= take;
    }
    return out;
}

Int draw_below(std::mt19937_64& rng, const Int& bound) {
    if (sgn(bound) <= 0) return 0;
    unsigned bits = static_cast<unsigned>(mpz_sizeinbase(bound.get_mpz_t(), 2)) + 64;
    Int x = draw_bits(rng, bits);
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), bound.get_mpz_t());
    return r;
}

}  // namespace

Json int_to_json(const Int& value) { return value.get_str(); }

Json vec_to_json(const Vec& values) {
    Json out = Json::array();
    for (const Int& v : values) out.push_back(int_to_json(v));
    return out;
}

Json scheme_to_json(const LinearScheme& scheme) {
    Json items = Json::array();
    for (const Item& it : scheme.items) {
        Json j;
        j["kind"] = it.is_loop() ? "loop" : "step";
        j["update"] = vec_to_json(it.update);
        if (!it.zero.empty()) j["zero"] = it.zero;
        items.push_back(std::move(j));
    }
    Json out;
    out["dim"] = scheme.dim;
    out["items"] = std::move(items);
    return out;
}

Json instance_to_json(const Instance& instance) {
    Json out = scheme_to_json(instance.scheme);
    out["source"] = vec_to_json(instance.source.values());
    out["target"] = vec_to_json(instance.target.values());
    return out;
}

Json witness_to_json(const Witness& witness) {
    Json out;
    if (witness.exponents) {
        out["exponents"] = vec_to_json(*witness.exponents);
    } else {
        out["walk"] = witness.walk;
    }
    return out;
}

LinearScheme scheme_from_json(const Json& doc) {
    std::size_t dim = index_from_json(member(doc, "dim", ""), "/dim");
    if (dim == 0) schema_error("/dim", "dimension must be positive");
    LinearScheme scheme(dim);
    const Json& items = member(doc, "items", "");
    if (!items.is_array()) schema_error("/items", "expected an array");
    for (std::size_t i = 0; i < items.size(); ++i) {
        const std::string where = "/items/" + std::to_string(i);
        const Json& kind = member(items[i], "kind", where);
        if (!kind.is_string()) schema_error(where + "/kind", "expected \"step\" or \"loop\"");
        Vec update = vec_from_json(member(items[i], "update", where), where + "/update");
        if (update.size() != dim)
            schema_error(where + "/update", "expected " + std::to_string(dim) + " entries, found " +
                                                std::to_string(update.size()));
        Counters zero;
        if (auto z = items[i].find("zero"); z != items[i].end()) {
            if (!z->is_array()) schema_error(where + "/zero", "expected an array");
            for (std::size_t j = 0; j < z->size(); ++j) {
                std::size_t c = index_from_json((*z)[j], where + "/zero/" + std::to_string(j));
                if (c >= dim) schema_error(where + "/zero/" + std::to_string(j), "counter index out of range");
                zero.push_back(c);
            }
        }
        const std::string k = kind.get<std::string>();
        if (k == "step") {
            scheme.add_step(std::move(update), std::move(zero));
        } else if (k == "loop") {
            if (!zero.empty()) schema_error(where + "/zero", "loops cannot carry zero tests");
            scheme.add_loop(std::move(update));
        } else {
            schema_error(where + "/kind", "expected \"step\" or \"loop\", found \"" + k + "\"");
        }
    }
    return scheme;
}

Instance instance_from_json(const Json& doc) {
    Instance inst;
    inst.scheme = scheme_from_json(doc);
    inst.source = config_from_json(member(doc, "source", ""), inst.scheme.dim, "/source");
    inst.target = config_from_json(member(doc, "target", ""), inst.scheme.dim, "/target");
    return inst;
}

Witness witness_from_json(const Json& doc) {
    Witness w;
    if (!doc.is_object()) schema_error("", "expected an object");
    if (auto e = doc.find("exponents"); e != doc.end()) {
        Vec exps = vec_from_json(*e, "/exponents");
        for (std::size_t i = 0; i < exps.size(); ++i)
            if (sgn(exps[i]) < 0) schema_error("/exponents/" + std::to_string(i), "exponents must be nonnegative");
        w.exponents = std::move(exps);
    } else if (auto walk = doc.find("walk"); walk != doc.end()) {
        if (!walk->is_array()) schema_error("/walk", "expected an array");
        for (std::size_t i = 0; i < walk->size(); ++i)
            w.walk.push_back(index_from_json((*walk)[i], "/walk/" + std::to_string(i)));
    } else {
        schema_error("", "expected \"exponents\" or \"walk\"");
    }
    return w;
}

std::string emit_instance(const Instance& instance) { return instance_to_json(instance).dump(2) + "\n"; }

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::SchemaError, std::string("invalid JSON at byte ") + std::to_string(e.byte) + ": " + e.what());
    }
}

Instance parse_instance(const std::string& text) { return instance_from_json(parse_json(text)); }

std::string emit_witness(const Witness& witness) { return witness_to_json(witness).dump(2) + "\n"; }

Witness parse_witness(const std::string& text) { return witness_from_json(parse_json(text)); }

DimacsResult parse_dimacs(const std::string& text) {
    DimacsResult result;
    std::istringstream in(text);
    std::string line;
    bool header = false;
    std::size_t declared_clauses = 0;
    std::size_t line_no = 0;
    std::vector<long> pending;
    std::vector<std::vector<long>> raw;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "c") continue;
        if (first == "%") break;
        if (first == "p") {
            std::string fmt;
            long n = -1, m = -1;
            if (header || !(ls >> fmt >> n >> m) || fmt != "cnf" || n < 0 || m < 0)
                throw Error(Errc::HeaderMismatch, "line " + std::to_string(line_no) + ": malformed problem line");
            header = true;
            result.formula.num_vars = static_cast<std::size_t>(n);
            declared_clauses = static_cast<std::size_t>(m);
            continue;
        }
        if (!header) throw Error(Errc::HeaderMismatch, "line " + std::to_string(line_no) + ": clause before the problem line");
        std::istringstream body(line);
        std::string tok;
        while (body >> tok) {
            long lit = 0;
            try {
                std::size_t used = 0;
                lit = std::stol(tok, &used);
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw Error(Errc::HeaderMismatch, "line " + std::to_string(line_no) + ": \"" + tok + "\" is not a literal");
            }
            if (lit == 0) {
                raw.push_back(pending);
                pending.clear();
                continue;
            }
            if (static_cast<std::size_t>(std::labs(lit)) > result.formula.num_vars)
                throw Error(Errc::HeaderMismatch, "line " + std::to_string(line_no) + ": variable " +
                                                      std::to_string(std::labs(lit)) + " exceeds the declared count");
            pending.push_back(lit);
        }
    }
    if (!header) throw Error(Errc::HeaderMismatch, "missing problem line");
    if (!pending.empty()) raw.push_back(pending);
    if (raw.size() != declared_clauses)
        throw Error(Errc::HeaderMismatch, "header declares " + std::to_string(declared_clauses) + " clauses, found " +
                                              std::to_string(raw.size()));
    for (std::size_t j = 0; j < raw.size(); ++j) {
        std::vector<long> lits;
        for (long l : raw[j])
            if (std::find(lits.begin(), lits.end(), l) == lits.end()) lits.push_back(l);
        if (lits.size() < raw[j].size()) result.notes.push_back("clause " + std::to_string(j + 1) + ": repeated literal merged");
        bool tautology = std::any_of(lits.begin(), lits.end(), [&](long l) {
            return std::find(lits.begin(), lits.end(), -l) != lits.end();
        });
        if (tautology) {
            result.notes.push_back("clause " + std::to_string(j + 1) + ": tautology dropped");
            continue;
        }
        if (lits.empty()) throw Error(Errc::NotThreeCnf, "clause " + std::to_string(j + 1) + " is empty");
        if (lits.size() > 3)
            throw Error(Errc::NotThreeCnf, "clause " + std::to_string(j + 1) + " has " + std::to_string(lits.size()) +
                                               " literals");
        if (lits.size() < 3)
            result.notes.push_back("clause " + std::to_string(j + 1) + ": width " + std::to_string(lits.size()) +
                                   " kept unpadded; padding needs distinct variables");
        Clause clause;
        for (long l : lits) clause.push_back(Literal{static_cast<std::size_t>(std::labs(l) - 1), l > 0});
        result.formula.clauses.push_back(std::move(clause));
    }
    result.formula.validate();
    return result;
}

std::string emit_dimacs(const CnfFormula& formula) {
    std::ostringstream out;
    out << "p cnf " << formula.num_vars << " " << formula.clauses.size() << "\n";
    for (const Clause& clause : formula.clauses) {
        for (const Literal& l : clause) out << (l.positive ? "" : "-") << (l.var + 1) << " ";
        out << "0\n";
    }
    return out.str();
}

Instance generate_random(const GeneratorSpec& spec) {
    if (spec.dim == 0) throw Error(Errc::DimensionMismatch, "dimension must be positive");
    if (spec.max_update < 0) throw Error(Errc::PreconditionViolated, "update bound must be nonnegative");
    std::mt19937_64 rng(spec.seed);
    auto update = [&] {
        Vec u(spec.dim);
        for (auto& x : u) x = draw(rng, -spec.max_update, spec.max_update);
        return u;
    };
    LinearScheme scheme(spec.dim);
    for (std::size_t i = 0; i < spec.loops; ++i) {
        if (rng() % 2 == 0) scheme.add_step(update());
        scheme.add_loop(update());
    }
    if (rng() % 2 == 0) scheme.add_step(update());
    auto endpoint = [&] {
        Vec v(spec.dim);
        for (auto& x : v) {
            if (spec.bits) x = draw_bits(rng, *spec.bits);
            else x = draw_below(rng, (spec.endpoint_bound ? *spec.endpoint_bound : Int(20)) + 1);
        }
        return Configuration(v);
    };
    Configuration s = endpoint();
    Configuration t = endpoint();
    return Instance{scheme, s, t};
}

}  // namespace vass::formats
