#include "vass/gadgets.hpp"

#include "vass/transforms.hpp"

#include <algorithm>
#include <functional>
#include <string>

namespace vass {

void CnfFormula::validate() const {
    for (std::size_t j = 0; j < clauses.size(); ++j) {
        const Clause& clause = clauses[j];
        if (clause.empty() || clause.size() > 3)
            throw Error(Errc::NotThreeCnf, "clause " + std::to_string(j + 1) + " has " +
                                               std::to_string(clause.size()) + " literals");
        for (std::size_t a = 0; a < clause.size(); ++a) {
            if (clause[a].var >= num_vars)
                throw Error(Errc::NotThreeCnf, "clause " + std::to_string(j + 1) + " uses an undeclared variable");
            for (std::size_t b = a + 1; b < clause.size(); ++b)
                if (clause[a].var == clause[b].var)
                    throw Error(Errc::NotThreeCnf,
                                "clause " + std::to_string(j + 1) + " repeats variable " +
                                    std::to_string(clause[a].var + 1));
        }
    }
}

bool CnfFormula::eval(const std::vector<bool>& assignment) const {
    for (const Clause& clause : clauses) {
        bool sat = false;
        for (const Literal& lit : clause)
            if (assignment.at(lit.var) == lit.positive) sat = true;
        if (!sat) return false;
    }
    return true;
}

bool CnfFormula::satisfiable() const {
    if (num_vars > 24) throw Error(Errc::PreconditionViolated, "too many variables for exhaustive check");
    std::vector<bool> assignment(num_vars);
    for (unsigned long mask = 0; mask < (1UL << num_vars); ++mask) {
        for (std::size_t i = 0; i < num_vars; ++i) assignment[i] = (mask >> i) & 1UL;
        if (eval(assignment)) return true;
    }
    return false;
}

std::vector<Int> first_n_primes(std::size_t n) {
    std::vector<Int> primes;
    for (unsigned long candidate = 2; primes.size() < n; ++candidate) {
        bool prime = true;
        for (const Int& p : primes) {
            if (p * p > candidate) break;
            if (candidate % p.get_ui() == 0) {
                prime = false;
                break;
            }
        }
        if (prime) primes.emplace_back(candidate);
    }
    return primes;
}

namespace {

// x = r_i (mod m_i) for pairwise coprime moduli.
Int crt(const std::vector<Int>& residues, const std::vector<Int>& moduli) {
    Int result = 0;
    Int modulus = 1;
    for (std::size_t i = 0; i < moduli.size(); ++i) {
        Int inv;
        Int base = modulus % moduli[i];
        mpz_invert(inv.get_mpz_t(), base.get_mpz_t(), moduli[i].get_mpz_t());
        Int delta = residues[i] - result;
        Int k = (delta * inv) % moduli[i];
        if (k < 0) k += moduli[i];
        result += modulus * k;
        modulus *= moduli[i];
    }
    return result;
}

}  // namespace

ClauseModulus clause_modulus(const Clause& clause, const std::vector<Int>& primes) {
    std::vector<Int> residues, moduli;
    for (const Literal& lit : clause) {
        moduli.push_back(primes.at(lit.var));
        residues.emplace_back(lit.positive ? 0 : 1);
    }
    ClauseModulus cm;
    cm.modulus = 1;
    for (const Int& m : moduli) cm.modulus *= m;
    cm.residue = crt(residues, moduli);
    return cm;
}

ModulusPlan modulus_plan(const CnfFormula& formula) {
    formula.validate();
    ModulusPlan plan;
    plan.primes = first_n_primes(formula.num_vars);
    for (const Clause& clause : formula.clauses) plan.clauses.push_back(clause_modulus(clause, plan.primes));
    return plan;
}

Int encode_assignment(const std::vector<bool>& assignment, const std::vector<Int>& primes) {
    std::vector<Int> residues;
    for (std::size_t i = 0; i < primes.size(); ++i) residues.emplace_back(assignment.at(i) ? 1 : 0);
    return crt(residues, primes);
}

std::size_t Skeleton::num_nondiv() const {
    return static_cast<std::size_t>(
        std::count_if(ops.begin(), ops.end(), [](const SkeletonOp& op) { return op.kind == SkeletonOp::Kind::NonDiv; }));
}

std::size_t Skeleton::num_updates() const {
    return static_cast<std::size_t>(std::count_if(ops.begin(), ops.end(), [](const SkeletonOp& op) {
        return op.kind == SkeletonOp::Kind::Add || op.kind == SkeletonOp::Kind::Sub;
    }));
}

Skeleton sat_skeleton(const CnfFormula& formula) {
    ModulusPlan plan = modulus_plan(formula);
    Skeleton sk;
    using K = SkeletonOp::Kind;
    auto check = [&](const Int& modulus, const Int& residue) {
        Int shift = modulus - residue;
        sk.ops.push_back({K::Add, shift});
        sk.ops.push_back({K::NonDiv, modulus});
        sk.ops.push_back({K::Sub, shift});
    };
    sk.ops.push_back({K::Guess, 0});
    for (const Int& p : plan.primes)
        for (Int r = 2; r < p; ++r) check(p, r);
    for (const ClauseModulus& cm : plan.clauses) check(cm.modulus, cm.residue);
    sk.ops.push_back({K::Drain, 0});
    return sk;
}

const char* flavor_name(GadgetFlavor flavor) {
    switch (flavor) {
        case GadgetFlavor::Unary2: return "unary2";
        case GadgetFlavor::Unitary5: return "unitary5";
        case GadgetFlavor::Ultraflat3: return "ultraflat3";
    }
    return "?";
}

Vec Gadget::entry(const Int& v) const {
    Vec c{v};
    c.insert(c.end(), ancilla_rest.begin(), ancilla_rest.end());
    return c;
}

Vec Gadget::exit(const Int& v) const {
    return entry(v + shift);
}

Int Gadget::run_bound(const Int& v) const {
    return bound_factor * (v + bound_slack);
}

namespace {

Vec unit(std::size_t dim, std::initializer_list<std::pair<std::size_t, long>> entries) {
    Vec u = zeros(dim);
    for (auto [i, value] : entries) u[i] = value;
    return u;
}

Gadget unary2(const Int& p) {
    Gadget g;
    g.scheme = LinearScheme(2);
    g.scheme.add_step({1, p - 2})
        .add_loop({1, -1})
        .add_loop({-p, p})
        .add_test({0})
        .add_loop({1, -1})
        .add_test({1})
        .add_step({-(p - 1), 0});
    g.ancilla_rest = {0};
    g.bound_slack = p;
    return g;
}

Gadget unitary5(const Int& p) {
    enum { X, Y, A1, A2, A3 };
    Gadget g;
    LinearScheme& s = g.scheme;
    s = LinearScheme(5);
    // With p = 1 the guess range is empty; a blocking step keeps the gadget rejecting.
    if (p == 1) s.add_step(unit(5, {{Y, -1}}));
    for (Int i = 0; i < p - 2; ++i) s.add_step(unit(5, {{Y, 1}}));
    s.add_step(unit(5, {{X, 1}}));
    s.add_loop(unit(5, {{X, 1}, {Y, -1}}));
    s.add_loop(unit(5, {{A1, 1}}));
    for (Int i = 0; i < p; ++i) {
        s.add_loop(unit(5, {{A1, -1}, {A2, 1}, {A3, 1}}));
        s.add_test({A1});
        s.add_loop(unit(5, {{A1, 1}, {A2, -1}}));
        s.add_test({A2});
    }
    s.add_loop(unit(5, {{A1, -1}}));
    s.add_test({A1});
    s.add_loop(unit(5, {{X, -1}, {A3, -1}, {A1, 1}}));
    s.add_test({X, A3});
    s.add_loop(unit(5, {{X, 1}, {A1, -1}}));
    s.add_test({A1});
    s.add_loop(unit(5, {{X, 1}, {Y, -1}}));
    s.add_test({Y});
    for (Int i = 0; i < p - 1; ++i) s.add_step(unit(5, {{X, -1}}));
    g.ancilla_rest = {0, 0, 0, 0};
    // The final zero tests force p * quotient <= x <= v + p, so a1 + a2 + a3 <= 2x.
    g.bound_factor = 3;
    g.bound_slack = p;
    return g;
}

Gadget ultraflat3(const Int& p) {
    Gadget g;
    LinearScheme& s = g.scheme;
    s = LinearScheme(3);
    for (Int r = 1; r < p; ++r) s.add_loop({r, p + r, -1});
    s.add_test({2});
    s.add_loop({-p, 0, p});
    s.add_test({0});
    s.add_loop({1, 0, -1});
    s.add_test({2});
    for (Int r = 1; r < p; ++r) s.add_loop({-r, -(p + r), 1});
    s.add_test({1});
    g.ancilla_rest = {0, 1};
    g.bound_slack = 3 * p;
    return g;
}

}  // namespace

Gadget nondiv_gadget(GadgetFlavor flavor, const Int& p) {
    if (p < 1) throw Error(Errc::PreconditionViolated, "non-divisibility modulus must be positive");
    switch (flavor) {
        case GadgetFlavor::Unary2: return unary2(p);
        case GadgetFlavor::Unitary5: return unitary5(p);
        case GadgetFlavor::Ultraflat3: return ultraflat3(p);
    }
    throw Error(Errc::PreconditionViolated, "unknown gadget flavor");
}

Gadget ultraflat_update_gadget(const Int& u) {
    Gadget g;
    g.scheme = LinearScheme(3);
    g.scheme.add_loop({u, 1, -1}).add_test({2}).add_loop({0, -1, 1}).add_test({1});
    g.ancilla_rest = {0, 1};
    g.shift = u;
    g.bound_slack = abs(u) + 1;
    return g;
}

namespace {

struct ProgramLayout {
    std::size_t dim;
    Vec rest;  // ancilla values between gadgets
    GadgetFlavor flavor;
};

ProgramLayout layout_for(SatTarget target) {
    switch (target) {
        case SatTarget::Unary3Slps: return {2, {0}, GadgetFlavor::Unary2};
        case SatTarget::Ultraflat4: return {3, {0, 1}, GadgetFlavor::Ultraflat3};
        case SatTarget::Unitary: return {5, {0, 0, 0, 0}, GadgetFlavor::Unitary5};
    }
    throw Error(Errc::PreconditionViolated, "unknown reduction target");
}

void inline_gadget(LinearScheme& program, const ProgramLayout& layout, const Gadget& gadget) {
    if (gadget.scheme.dim != layout.dim || gadget.ancilla_rest != layout.rest)
        throw Error(Errc::PreconditionViolated, "gadget contract does not match the program's ancilla state");
    program.append(gadget.scheme);
}

void add_primary(LinearScheme& program, const ProgramLayout& layout, SatTarget target, const Int& amount) {
    if (amount == 0) return;
    if (target == SatTarget::Ultraflat4) {
        inline_gadget(program, layout, ultraflat_update_gadget(amount));
    } else if (target == SatTarget::Unitary) {
        Int sign = amount > 0 ? 1 : -1;
        Int steps = abs(amount);
        for (Int i = 0; i < steps; ++i) {
            Vec u = zeros(layout.dim);
            u[0] = sign;
            program.add_step(u);
        }
    } else {
        Vec u = zeros(layout.dim);
        u[0] = amount;
        program.add_step(u);
    }
}

}  // namespace

Instance sat_program(const CnfFormula& formula, SatTarget target) {
    ProgramLayout layout = layout_for(target);
    Skeleton sk = sat_skeleton(formula);
    LinearScheme program(layout.dim);
    Vec primary_up = zeros(layout.dim), primary_down = zeros(layout.dim);
    primary_up[0] = 1;
    primary_down[0] = -1;
    using K = SkeletonOp::Kind;
    for (const SkeletonOp& op : sk.ops) {
        switch (op.kind) {
            case K::Guess: program.add_loop(primary_up); break;
            case K::Drain: program.add_loop(primary_down); break;
            case K::Add: add_primary(program, layout, target, op.amount); break;
            case K::Sub: add_primary(program, layout, target, -op.amount); break;
            case K::NonDiv: inline_gadget(program, layout, nondiv_gadget(layout.flavor, op.amount)); break;
        }
    }
    Vec endpoint{0};
    endpoint.insert(endpoint.end(), layout.rest.begin(), layout.rest.end());
    Instance inst{program, Configuration(endpoint), Configuration(endpoint)};
    inst.validate();
    return inst;
}

Int sat_program_bound(const CnfFormula& formula, SatTarget target) {
    ProgramLayout layout = layout_for(target);
    ModulusPlan plan = modulus_plan(formula);
    Int product = 1;
    for (const Int& p : plan.primes) product *= p;
    Int rest = norm1(layout.rest);
    Int x = product - 1;
    Int best = x + rest;
    using K = SkeletonOp::Kind;
    for (const SkeletonOp& op : sat_skeleton(formula).ops) {
        Int before = x;
        if (op.kind == K::Add) x += op.amount;
        if (op.kind == K::Sub) x -= op.amount;
        if (op.kind == K::NonDiv) {
            Int b = nondiv_gadget(layout.flavor, op.amount).run_bound(x);
            if (b > best) best = b;
        }
        if (target == SatTarget::Ultraflat4 && (op.kind == K::Add || op.kind == K::Sub)) {
            Int b = ultraflat_update_gadget(x - before).run_bound(before);
            if (b > best) best = b;
        }
        if (x + rest > best) best = x + rest;
    }
    return best;
}

Int controlled_norm_bound(const CnfFormula& formula, SatTarget target) {
    Instance program = sat_program(formula, target);
    Int tests = static_cast<unsigned long>(program.scheme.num_zero_tests());
    return sat_program_bound(formula, target) * (tests + 1);
}

ControlledInstance reduce_sat_traced(const CnfFormula& formula, SatTarget target) {
    if (target == SatTarget::Unitary)
        throw Error(Errc::PreconditionViolated, "the unitary reduction uses a multiplication triple");
    Instance program = sat_program(formula, target);
    return controlling_counter_traced(program.scheme, program.source.values(), program.target.values());
}

Instance reduce_sat_to_unary_3slps(const CnfFormula& formula) {
    return reduce_sat_traced(formula, SatTarget::Unary3Slps).instance;
}

Instance reduce_sat_to_ultraflat_4vass(const CnfFormula& formula) {
    return reduce_sat_traced(formula, SatTarget::Ultraflat4).instance;
}

Int unitary_sum_bound(const CnfFormula& formula) {
    ModulusPlan plan = modulus_plan(formula);
    Int product = 1;
    Int largest = 0;
    for (const Int& p : plan.primes) {
        product *= p;
        if (p > 2 && p > largest) largest = p;
    }
    for (const ClauseModulus& cm : plan.clauses)
        if (cm.modulus > largest) largest = cm.modulus;
    // A satisfying value stays below the prime product; inside a gadget for
    // modulus q the counters sum to at most three times x + q.
    return 3 * (product + largest);
}

Instance reduce_sat_to_unitary_slps(const CnfFormula& formula, const UnitaryConfig& config) {
    Instance program = sat_program(formula, SatTarget::Unitary);
    Int tests = static_cast<unsigned long>(program.scheme.num_zero_tests());
    if (config.tests && *config.tests != tests)
        throw Error(Errc::PreconditionViolated, "triple test count " + to_string(*config.tests) +
                                                    " differs from the program's " + to_string(tests) + " zero tests");
    Int needed = unitary_sum_bound(formula);
    Int bound = config.bound == 0 ? needed : config.bound;
    if (bound < needed)
        throw Error(Errc::TripleTooSmall,
                    "counter-sum bound " + to_string(bound) + " is below the required " + to_string(needed));
    if (!config.generator_depth)
        return triple_instance(program.scheme, program.source.values(), program.target.values(), bound, 1);

    Generator gen = generator(*config.generator_depth);
    if (gen.value < needed)
        throw Error(Errc::TripleTooSmall, "generator value " + to_string(gen.value) + " is below the required " +
                                              to_string(needed));
    return generator_prefixed_triple(gen, program.scheme, program.target.values(), 1);
}

namespace {

using ClauseKey = std::vector<unsigned>;  // sorted codes 2*var + negated

ClauseKey clause_key(const Clause& clause, const std::vector<std::size_t>& perm, unsigned flips) {
    ClauseKey key;
    for (const Literal& lit : clause) {
        bool positive = lit.positive != (((flips >> lit.var) & 1U) != 0);
        key.push_back(static_cast<unsigned>(2 * perm[lit.var] + (positive ? 0 : 1)));
    }
    std::sort(key.begin(), key.end());
    return key;
}

// Sorted clause keys of the formula after renaming and sign flips.
std::vector<ClauseKey> formula_key(const std::vector<Clause>& clauses, const std::vector<std::size_t>& perm,
                                   unsigned flips) {
    std::vector<ClauseKey> key;
    for (const Clause& c : clauses) key.push_back(clause_key(c, perm, flips));
    std::sort(key.begin(), key.end());
    return key;
}

// True when no renaming or sign flip yields a smaller key.
bool is_canonical(const std::vector<Clause>& clauses, std::size_t n) {
    std::vector<std::size_t> identity(n);
    for (std::size_t i = 0; i < n; ++i) identity[i] = i;
    const std::vector<ClauseKey> own = formula_key(clauses, identity, 0);
    std::vector<std::size_t> perm = identity;
    do {
        for (unsigned flips = 0; flips < (1U << n); ++flips)
            if (formula_key(clauses, perm, flips) < own) return false;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return true;
}

}  // namespace

std::vector<CnfFormula> canonical_formulas(std::size_t max_vars, std::size_t max_clauses) {
    std::vector<CnfFormula> out;
    for (std::size_t n = 1; n <= max_vars; ++n) {
        std::vector<Clause> all;
        for (unsigned vars = 1; vars < (1U << n); ++vars) {
            std::size_t width = static_cast<std::size_t>(__builtin_popcount(vars));
            if (width > 3) continue;
            for (unsigned signs = 0; signs < (1U << width); ++signs) {
                Clause c;
                std::size_t slot = 0;
                for (std::size_t i = 0; i < n; ++i)
                    if ((vars >> i) & 1U) c.push_back({i, ((signs >> slot++) & 1U) == 0});
                all.push_back(c);
            }
        }
        std::vector<Clause> chosen;
        std::function<void(std::size_t)> extend = [&](std::size_t from) {
            if (is_canonical(chosen, n)) {
                CnfFormula f;
                f.num_vars = n;
                f.clauses = chosen;
                out.push_back(f);
            }
            if (chosen.size() == max_clauses) return;
            for (std::size_t j = from; j < all.size(); ++j) {
                chosen.push_back(all[j]);
                extend(j + 1);
                chosen.pop_back();
            }
        };
        extend(0);
    }
    return out;
}

}  // namespace vass
