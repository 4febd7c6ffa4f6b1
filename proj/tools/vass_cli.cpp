#include "vass/error.hpp"
#include "vass/formats.hpp"
#include "vass/gadgets.hpp"
#include "vass/oracle.hpp"
#include "vass/poly2.hpp"
#include "vass/transforms.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

using namespace vass;
using formats::Json;

namespace {

constexpr int kYes = 0;
constexpr int kNo = 1;
constexpr int kError = 2;

std::string read_input(const std::string& path) {
    if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::SchemaError, "cannot open " + path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void print(const Json& doc) { std::cout << doc.dump(2) << "\n"; }

Int parse_assignment(const std::string& text, const std::string& name) {
    const std::string prefix = name + "=";
    std::string value = text.rfind(prefix, 0) == 0 ? text.substr(prefix.size()) : text;
    return parse_int(value);
}

Json role_groups(const RoleGroups& groups) {
    Json out = Json::array();
    for (const Counters& g : groups) out.push_back(g);
    return out;
}

Json explanation_json(const poly2::Explanation& ex) {
    Json constants;
    constants["norm"] = formats::int_to_json(ex.constants.norm);
    constants["delta"] = formats::int_to_json(ex.constants.delta);
    constants["N"] = formats::int_to_json(ex.constants.n);
    constants["B"] = formats::int_to_json(ex.constants.b);
    constants["C"] = formats::int_to_json(ex.constants.c);
    constants["M"] = formats::int_to_json(ex.constants.m);
    constants["R"] = formats::int_to_json(ex.constants.r);
    constants["P_dom"] = formats::int_to_json(ex.constants.p_dom);
    Json layers = Json::array();
    for (const auto& l : ex.layers) {
        Json row;
        row["index"] = l.index;
        row["before"] = l.before;
        row["after"] = l.after;
        layers.push_back(row);
    }
    Json out;
    out["constants"] = constants;
    out["threshold"] = formats::int_to_json(ex.threshold);
    out["ball_radius"] = formats::int_to_json(ex.ball_radius);
    out["prune_bound"] = formats::int_to_json(ex.prune_bound);
    out["layers"] = layers;
    out["final_checks"] = ex.final_checks;
    out["reverse_searches"] = ex.reverse_searches;
    out["pruned"] = ex.pruned;
    out["decided_by"] = ex.decided_by;
    return out;
}

struct SolveArgs {
    std::string input = "-";
    std::string method = "poly2";
    std::string threshold;
    bool no_dominance = false;
    bool explain = false;
    std::string max_norm;
};

poly2::Options poly2_options(const SolveArgs& a) {
    poly2::Options o;
    if (!a.threshold.empty()) o.m = parse_assignment(a.threshold, "M");
    o.dominance = !a.no_dominance;
    return o;
}

int run_solve(const SolveArgs& a) {
    Instance inst = formats::parse_instance(read_input(a.input));
    inst.validate();
    Json out;
    out["method"] = a.method;
    int code = kNo;
    if (a.method == "oracle") {
        SearchBound bound = auto_bound(inst.scheme, inst.source.values(), inst.target.values());
        if (!a.max_norm.empty()) bound.max_norm = parse_int(a.max_norm);
        BfsResult r = bfs_reach(inst, bound);
        out["verdict"] = r.verdict == Verdict::Reachable ? "reachable"
                         : r.verdict == Verdict::Exhausted ? "unknown"
                                                           : "unreachable";
        out["bounded"] = true;
        out["max_norm"] = formats::int_to_json(bound.max_norm);
        out["explored"] = r.explored;
        out["witness"] = r.verdict == Verdict::Reachable ? formats::witness_to_json(r.witness) : Json();
        code = r.verdict == Verdict::Reachable ? kYes : r.verdict == Verdict::Exhausted ? kError : kNo;
    } else if (a.method == "ilp") {
        IlpResult r = ilp_feasible(inst);
        out["verdict"] = r.reachable ? "reachable" : "unreachable";
        out["witness"] = r.reachable ? formats::witness_to_json(Witness{r.exponents, {}}) : Json();
        code = r.reachable ? kYes : kNo;
    } else if (a.method == "poly2") {
        poly2::Result r = poly2::decide_reach(inst, poly2_options(a));
        out["verdict"] = r.reachable ? "reachable" : "unreachable";
        out["witness"] = r.exponents ? formats::witness_to_json(Witness{r.exponents, {}}) : Json();
        if (a.explain) out["explanation"] = explanation_json(r.explanation);
        code = r.reachable ? kYes : kNo;
    } else {
        throw Error(Errc::PreconditionViolated, "unknown method " + a.method);
    }
    print(out);
    std::cerr << out["verdict"].get<std::string>() << "\n";
    return code;
}

int run_explain(const SolveArgs& a) {
    Instance inst = formats::parse_instance(read_input(a.input));
    poly2::Result r = poly2::decide_reach(inst, poly2_options(a));
    Json out = explanation_json(r.explanation);
    out["verdict"] = r.reachable ? "reachable" : "unreachable";
    print(out);
    std::cerr << out["verdict"].get<std::string>() << " (" << r.explanation.decided_by << ")\n";
    return r.reachable ? kYes : kNo;
}

int run_verify(const std::string& instance_path, const std::string& witness_path) {
    Instance inst = formats::parse_instance(read_input(instance_path));
    // Accepts a bare witness or the output of solve.
    Json doc = formats::parse_json(read_input(witness_path));
    if (doc.is_object() && doc.contains("witness")) doc = doc["witness"];
    Witness w = formats::witness_from_json(doc);
    bool ok = verify_witness(inst, w);
    Json out;
    out["valid"] = ok;
    print(out);
    std::cerr << (ok ? "valid" : "invalid") << "\n";
    return ok ? kYes : kNo;
}

int run_reduce(const std::string& path, const std::string& target, const std::string& bound) {
    formats::DimacsResult parsed = formats::parse_dimacs(read_input(path));
    for (const auto& note : parsed.notes) std::cerr << "note: " << note << "\n";
    Instance inst;
    if (target == "3slps") {
        inst = reduce_sat_to_unary_3slps(parsed.formula);
    } else if (target == "ultraflat4") {
        inst = reduce_sat_to_ultraflat_4vass(parsed.formula);
    } else if (target == "unitary") {
        UnitaryConfig config;
        if (!bound.empty()) config.bound = parse_int(bound);
        inst = reduce_sat_to_unitary_slps(parsed.formula, config);
    } else {
        throw Error(Errc::PreconditionViolated, "unknown target " + target);
    }
    std::cout << formats::emit_instance(inst);
    std::cerr << "dimension " << inst.scheme.dim << ", " << inst.scheme.items.size() << " items\n";
    return kYes;
}

struct TransformArgs {
    std::string input = "-";
    bool controlling = false;
    std::size_t unitary = 0;
    std::vector<std::string> triple;
};

int run_transform(const TransformArgs& a) {
    Instance inst = formats::parse_instance(read_input(a.input));
    inst.validate();
    const Vec& s = inst.source.values();
    const Vec& t = inst.target.values();
    int chosen = (a.controlling ? 1 : 0) + (a.unitary > 0 ? 1 : 0) + (a.triple.empty() ? 0 : 1);
    if (chosen != 1) throw Error(Errc::PreconditionViolated, "choose exactly one transformation");
    Instance out;
    if (a.controlling) {
        out = controlling_counter(inst.scheme, s, t);
    } else if (a.unitary > 0) {
        out = Instance{to_unitary(inst.scheme, a.unitary), Configuration(lift_unitary(s, a.unitary)),
                       Configuration(lift_unitary(t, a.unitary))};
    } else {
        Int bound = parse_int(a.triple[0]);
        Int tests = parse_int(a.triple[1]);
        std::size_t copies = std::stoul(a.triple[2]);
        if (tests != Int(static_cast<unsigned long>(inst.scheme.num_zero_tests())))
            throw Error(Errc::PreconditionViolated, "test count C must equal the zero tests in the scheme (" +
                                                        std::to_string(inst.scheme.num_zero_tests()) + ")");
        out = triple_instance(inst.scheme, s, t, bound, copies);
    }
    std::cout << formats::emit_instance(out);
    std::cerr << "dimension " << out.scheme.dim << ", " << out.scheme.items.size() << " items\n";
    return kYes;
}

struct GenArgs {
    std::vector<std::string> what;
    formats::GeneratorSpec spec;
    std::string bound;
};

int run_gen(const GenArgs& a) {
    if (a.what.empty()) throw Error(Errc::PreconditionViolated, "gen needs amplifier, generator or random");
    const std::string& kind = a.what[0];
    if (kind == "amplifier") {
        if (a.what.size() != 3) throw Error(Errc::PreconditionViolated, "usage: gen amplifier d B");
        Amplifier amp = amplifier(std::stoul(a.what[1]), parse_int(a.what[2]));
        Json out;
        out["scheme"] = formats::scheme_to_json(amp.scheme);
        out["inputs"] = role_groups(amp.inputs);
        out["outputs"] = role_groups(amp.outputs);
        out["tests"] = formats::int_to_json(amp.tests);
        out["value_in"] = formats::int_to_json(amp.value_in);
        out["value_out"] = formats::int_to_json(amp.value_out);
        out["warnings"] = amp.warnings;
        print(out);
        for (const auto& w : amp.warnings) std::cerr << "warning: " << w << "\n";
        return kYes;
    }
    if (kind == "generator") {
        if (a.what.size() != 2) throw Error(Errc::PreconditionViolated, "usage: gen generator d");
        Generator gen = generator(std::stoul(a.what[1]));
        Json out;
        out["scheme"] = formats::scheme_to_json(gen.scheme);
        out["outputs"] = role_groups(gen.outputs);
        out["value"] = formats::int_to_json(gen.value);
        out["warnings"] = gen.warnings;
        print(out);
        for (const auto& w : gen.warnings) std::cerr << "warning: " << w << "\n";
        return kYes;
    }
    if (kind == "random") {
        if (a.what.size() != 1) throw Error(Errc::PreconditionViolated, "usage: gen random [options]");
        formats::GeneratorSpec spec = a.spec;
        if (!a.bound.empty()) spec.endpoint_bound = parse_int(a.bound);
        std::cout << formats::emit_instance(formats::generate_random(spec));
        return kYes;
    }
    throw Error(Errc::PreconditionViolated, "unknown generator " + kind);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reachability tools for linear path schemes"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "Decide reachability of an instance");
    solve->add_option("instance", solve_args.input, "Instance JSON file, or - for stdin");
    solve->add_option("--method", solve_args.method, "oracle, ilp or poly2")
        ->check(CLI::IsMember({"oracle", "ilp", "poly2"}));
    solve->add_option("--const", solve_args.threshold, "Working threshold for poly2, as M=<integer>");
    solve->add_flag("--no-dominance", solve_args.no_dominance, "Disable dominance pruning in poly2");
    solve->add_flag("--explain", solve_args.explain, "Include the poly2 trace");
    solve->add_option("--max-norm", solve_args.max_norm, "Norm bound for the oracle");

    SolveArgs explain_args;
    auto* explain = app.add_subcommand("explain", "Print the poly2 trace for an instance");
    explain->add_option("instance", explain_args.input, "Instance JSON file, or - for stdin");
    explain->add_option("--const", explain_args.threshold, "Working threshold, as M=<integer>");
    explain->add_flag("--no-dominance", explain_args.no_dominance, "Disable dominance pruning");

    std::string verify_instance, verify_witness_path;
    auto* verify = app.add_subcommand("verify", "Check a witness against an instance");
    verify->add_option("instance", verify_instance, "Instance JSON file")->required();
    verify->add_option("witness", verify_witness_path, "Witness JSON file")->required();

    std::string reduce_kind, reduce_path, reduce_target = "3slps", reduce_bound;
    auto* reduce = app.add_subcommand("reduce", "Reduce a formula to a reachability instance");
    reduce->add_option("kind", reduce_kind, "Source problem")->required()->check(CLI::IsMember({"sat"}));
    reduce->add_option("formula", reduce_path, "DIMACS file, or - for stdin")->required();
    reduce->add_option("--target", reduce_target, "3slps, ultraflat4 or unitary")
        ->check(CLI::IsMember({"3slps", "ultraflat4", "unitary"}));
    reduce->add_option("--bound", reduce_bound, "Counter-sum bound for the unitary target");

    TransformArgs transform_args;
    auto* transform = app.add_subcommand("transform", "Apply a scheme transformation");
    transform->add_option("instance", transform_args.input, "Instance JSON file, or - for stdin");
    transform->add_flag("--controlling-counter", transform_args.controlling, "Replace zero tests by one counter");
    transform->add_option("--unitary", transform_args.unitary, "Split counters into u unit sub-counters");
    transform->add_option("--triple", transform_args.triple, "Eliminate zero tests with a triple: B C a")
        ->expected(3);

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "Generate schemes and instances");
    gen->add_option("what", gen_args.what, "amplifier d B | generator d | random")->required();
    gen->add_option("--loops", gen_args.spec.loops, "Number of loops (random)");
    gen->add_option("--dim", gen_args.spec.dim, "Dimension (random)");
    gen->add_option("--delta", gen_args.spec.max_update, "Largest update magnitude (random)");
    gen->add_option("--bits", gen_args.spec.bits, "Endpoints below 2^bits (random)");
    gen->add_option("--bound", gen_args.bound, "Endpoints in [0, bound] (random)");
    gen->add_option("--seed", gen_args.spec.seed, "Random seed (random)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kYes : kError;
    }

    try {
        if (solve->parsed()) return run_solve(solve_args);
        if (explain->parsed()) return run_explain(explain_args);
        if (verify->parsed()) return run_verify(verify_instance, verify_witness_path);
        if (reduce->parsed()) return run_reduce(reduce_path, reduce_target, reduce_bound);
        if (transform->parsed()) return run_transform(transform_args);
        if (gen->parsed()) return run_gen(gen_args);
    } catch (const Error& e) {
        Json out;
        out["error"] = errc_name(e.code());
        out["message"] = e.what();
        print(out);
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    } catch (const std::exception& e) {
        Json out;
        out["error"] = "InvalidArgument";
        out["message"] = e.what();
        print(out);
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
