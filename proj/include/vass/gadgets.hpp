#pragma once

#include "vass/model.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace vass {

struct Literal {
    std::size_t var = 0;  // 0-based
    bool positive = true;
    bool operator==(const Literal& other) const = default;
};

using Clause = std::vector<Literal>;

struct CnfFormula {
    std::size_t num_vars = 0;
    std::vector<Clause> clauses;

    // Clauses hold 1 to 3 literals over distinct variables.
    void validate() const;
    bool eval(const std::vector<bool>& assignment) const;
    bool satisfiable() const;  // exhaustive, for small formulas
    bool operator==(const CnfFormula& other) const = default;
};

std::vector<Int> first_n_primes(std::size_t n);

struct ClauseModulus {
    Int modulus;  // product of the clause's variable primes
    Int residue;  // the unique residue falsifying every literal
};

ClauseModulus clause_modulus(const Clause& clause, const std::vector<Int>& primes);

struct ModulusPlan {
    std::vector<Int> primes;
    std::vector<ClauseModulus> clauses;
};

ModulusPlan modulus_plan(const CnfFormula& formula);

// Value encoding an assignment: v = 1 (mod p_i) iff variable i is true.
Int encode_assignment(const std::vector<bool>& assignment, const std::vector<Int>& primes);

struct SkeletonOp {
    enum class Kind { Guess, Add, Sub, NonDiv, Drain };
    Kind kind = Kind::Guess;
    Int amount = 0;  // Add/Sub amount or NonDiv modulus
    bool operator==(const SkeletonOp& other) const = default;
};

struct Skeleton {
    std::vector<SkeletonOp> ops;
    std::size_t num_nondiv() const;
    std::size_t num_updates() const;
};

Skeleton sat_skeleton(const CnfFormula& formula);

enum class GadgetFlavor { Unary2, Unitary5, Ultraflat3 };

const char* flavor_name(GadgetFlavor flavor);

// Counter 0 is the primary counter; the others are ancillas that hold
// `ancilla_rest` on entry and on exit.
struct Gadget {
    LinearScheme scheme;
    Vec ancilla_rest;
    Int shift = 0;  // change of the primary counter on acceptance
    Int bound_factor = 1;
    Int bound_slack = 0;

    Vec entry(const Int& v) const;
    Vec exit(const Int& v) const;
    // Counter sum along every accepting run from entry(v): factor * (v + slack).
    Int run_bound(const Int& v) const;
};

Gadget nondiv_gadget(GadgetFlavor flavor, const Int& p);
Gadget ultraflat_update_gadget(const Int& u);

enum class SatTarget { Unary3Slps, Ultraflat4, Unitary };

// The skeleton with gadgets inlined; zero tests are still present.
Instance sat_program(const CnfFormula& formula, SatTarget target);

// Counter-sum bound along an accepting run of sat_program(formula, target)
// guessing a value below the prime product.
Int sat_program_bound(const CnfFormula& formula, SatTarget target);

// Norm bound for the controlled instance: the program bound times one plus
// the zero-test count, since the extra counter holds weights times values.
Int controlled_norm_bound(const CnfFormula& formula, SatTarget target);

struct ControlledInstance;

// Unary3Slps or Ultraflat4 reduction with the controlling-counter trace.
ControlledInstance reduce_sat_traced(const CnfFormula& formula, SatTarget target);

Instance reduce_sat_to_unary_3slps(const CnfFormula& formula);
Instance reduce_sat_to_ultraflat_4vass(const CnfFormula& formula);

struct UnitaryConfig {
    Int bound = 0;                      // counter-sum bound for the triple; 0 selects the minimum
    std::optional<Int> tests;           // must match the program's zero-test count when given
    std::optional<std::size_t> generator_depth;
};

// Least counter-sum bound covering an accepting run of the unitary program.
Int unitary_sum_bound(const CnfFormula& formula);

Instance reduce_sat_to_unitary_slps(const CnfFormula& formula, const UnitaryConfig& config);

// Canonical small-formula corpus: for each n <= max_vars, every set of at most
// `max_clauses` distinct clauses of width 1..3 over n variables, keeping one
// representative per orbit under variable renaming and sign flips.
std::vector<CnfFormula> canonical_formulas(std::size_t max_vars, std::size_t max_clauses);

}  // namespace vass
