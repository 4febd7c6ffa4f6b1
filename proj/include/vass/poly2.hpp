#pragma once

#include "vass/model.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vass::poly2 {

struct Constants {
    Int norm = 0;   // unary size of the scheme
    Int delta = 0;  // largest update magnitude
    Int n = 0;      // bound on minimal solutions of 2x2 systems: 2 * delta^2
    Int b = 0;      // n * norm^2 + 2 * n * norm
    Int c = 0;      // norm^2 * (b + (2n + 3) * norm)
    Int m = 0;      // (c + norm)^3
    Int r = 0;      // ball radius: 2m + m * norm^2
    Int p_dom = 0;  // tuple count above which a dominated pair must exist
};

// Requires a 2-dimensional scheme.
Constants compute_constants(const LinearScheme& scheme);

// R and P_dom for a given threshold m.
Int ball_radius(const Int& norm, const Int& m);
Int prune_bound(const Int& norm, std::size_t loops, const Int& m);

// Threshold used by decide_reach when no override is given.
Int working_threshold(const LinearScheme& scheme);

// Exact up to the search radius c0 * (p + norm)^2 around s in the
// one- and two-small-coordinate cases; integer programming otherwise.
bool close_reachability(const LinearScheme& scheme, const Vec& s, const Vec& t, const Int& p, const Int& c0 = 1);

// Loop indices are 0-based; the loops after a tuple at layer i are i..k-1.
struct DpTuple {
    std::size_t index = 0;
    Vec config;
    std::optional<std::pair<std::size_t, std::size_t>> pair;  // opposite mixed loops, or none

    bool operator==(const DpTuple& other) const = default;
};

bool is_mixed(const Vec& v);
bool are_opposite(const Vec& a, const Vec& b);
bool is_slim(const Vec& config, const Int& m);

// Whether `from` traverses to `to` with exactly the transition shape for threshold m.
bool tuple_step(const LinearScheme& scheme, const DpTuple& from, const DpTuple& to, const Int& m);

// Signed combination of a non-parallel opposite pair that clears the small axis:
// x1 * first + x2 * second = h on the big axis and 0 on the small one.
struct PairCombination {
    Int x1 = 0;
    Int x2 = 0;
    Int h = 0;
};
PairCombination pair_combination(const Vec& first, const Vec& second, std::size_t small_axis);

// Removes dominated tuples while the set is larger than `limit`. Tuples of one
// layer only; untagged tuples and parallel pairs are left alone.
std::vector<DpTuple> dominance_prune(const LinearScheme& scheme, std::vector<DpTuple> tuples, const Int& m,
                                     std::size_t limit = 0);

// Layer-0 tuples: the source with every opposite pair and the untagged tuple.
std::vector<DpTuple> initial_tuples(const LinearScheme& scheme, const Vec& s);

// Tuples at layer `index` reached from the earlier sets, with every tag for each
// configuration, then pruned. Index k + 1 holds the target alone when it is reached.
std::vector<DpTuple> important_set(const LinearScheme& scheme, const Vec& t, std::size_t index,
                                   const std::vector<std::vector<DpTuple>>& prior, const Int& m, bool dominance = true);

struct Options {
    std::optional<Int> m;  // working threshold override
    bool dominance = true;
    std::size_t prune_limit = 0;
};

struct LayerCount {
    std::size_t index = 0;
    std::size_t before = 0;
    std::size_t after = 0;
};

struct Explanation {
    Constants constants;
    Int threshold = 0;
    Int ball_radius = 0;  // R for the threshold in use
    Int prune_bound = 0;  // P_dom for the threshold in use
    std::vector<LayerCount> layers;
    std::size_t final_checks = 0;
    std::size_t reverse_searches = 0;
    std::size_t pruned = 0;
    std::string decided_by;
};

struct Result {
    bool reachable = false;
    std::optional<PathExponents> exponents;
    Explanation explanation;
};

Result decide_reach(const LinearScheme& scheme, const Vec& s, const Vec& t, const Options& options = {});
Result decide_reach(const Instance& instance, const Options& options = {});

}  // namespace vass::poly2
