#pragma once

#include "vass/model.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace vass {

// Number of zero tests each counter receives along the unique path.
Vec zero_test_budget(const LinearScheme& scheme);

struct ControlledInstance {
    Instance instance;
    Vec initial_copy;             // weights before the first item
    std::vector<Vec> copy_after;  // weights in force after each output item
};

// Replaces zero tests by one extra counter that must end at zero.
ControlledInstance controlling_counter_traced(const LinearScheme& scheme, const Vec& s, const Vec& t);
Instance controlling_counter(const LinearScheme& scheme, const Vec& s, const Vec& t);

// Layer weights (-copy, 1): the extra counter minus the weighted counters
// never decreases, and is zero on honest runs.
std::vector<Vec> controlling_potential(const ControlledInstance& controlled);

// Splits each counter into `u` sub-counters with unit updates.
LinearScheme to_unitary(const LinearScheme& scheme, std::size_t u, bool spreading = true);
Vec lift_unitary(const Vec& x, std::size_t u);
Vec fold_unitary(const Vec& y, std::size_t u);

Int max_aggregate_effect(const LinearScheme& scheme);

// Counters of the result: the originals, then b_1..b_a, c, and the product counter.
LinearScheme eliminate_zero_tests_with_triple(const LinearScheme& scheme, const Int& tests, std::size_t a);

// Source (s, 0^{a-1}, bound - sum(s), 2T, 2*bound*T) and target (t, 0, ..., 0).
Instance triple_instance(const LinearScheme& scheme, const Vec& s, const Vec& t, const Int& bound, std::size_t a);

// Triple roles, in this order.
enum Role { Value = 0, Scale = 1, Product = 2 };
using RoleGroups = std::array<Counters, 3>;

struct Amplifier {
    LinearScheme scheme;
    RoleGroups inputs;
    RoleGroups outputs;
    std::size_t depth = 0;
    Int parameter = 0;
    Int tests = 0;       // zero tests eliminated through the input triple
    Int value_in = 0;    // required input value (depth >= 2)
    Int value_out = 0;   // output value for input value `parameter` (depth 1) or value_in
    std::vector<std::string> warnings;
};

// Raw doubling program on (x_in, y_in, z_in, x_out, y_out, z_out); not unitary.
Amplifier g1_amplifier();
Amplifier amplifier(std::size_t depth, const Int& parameter);

struct Generator {
    LinearScheme scheme;
    RoleGroups outputs;
    Int value = 0;
    std::vector<std::string> warnings;
};

Generator generator(std::size_t depth);

// Generator, then transfer loops into the triple counters, then the
// eliminated scheme. Source is all zero.
Instance generator_prefixed_triple(const Generator& gen, const LinearScheme& scheme, const Vec& t, std::size_t a);

// Size ceiling from VASS_SIZE_CEILING, default 1000000.
Int size_ceiling();

Int fast_growing_eval(std::size_t level, const Int& n, const Int& ceiling);
Int fast_growing_eval(std::size_t level, const Int& n);
Int ackermann_value(const Int& n);
Int ackermann_depth_for_size(const Int& k, std::size_t max_level = 64);

}  // namespace vass
