#pragma once

#include "vass/model.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace vass {

struct SearchBound {
    Int max_norm = 0;                 // bound on the 1-norm of explored configurations
    std::size_t max_steps = 250000000;  // cap on configurations explored
    // Optional layer potentials: weights[i] applies after i items. When set,
    // every item must keep the potential nondecreasing (checked), and states
    // whose potential exceeds the target's are dropped.
    std::vector<Vec> potential;
};

// Throws PreconditionViolated unless the potential is nondecreasing along
// every transition of the scheme.
void check_potential(const LinearScheme& scheme, const std::vector<Vec>& weights);

SearchBound auto_bound(const LinearScheme& scheme, const Vec& s, const Vec& t);

enum class Verdict { Reachable, UnreachableWithinBound, Exhausted };

const char* verdict_name(Verdict v);

struct Witness {
    std::optional<PathExponents> exponents;
    Walk walk;
};

struct BfsResult {
    Verdict verdict = Verdict::UnreachableWithinBound;
    Witness witness;
    bool truncated = false;  // some configuration was cut by the norm bound
    std::size_t explored = 0;
};

BfsResult bfs_reach(const LinearScheme& scheme, const Vec& s, const Vec& t, const SearchBound& bound);
BfsResult bfs_reach(const Instance& instance, const SearchBound& bound);
BfsResult bfs_reach(const Instance& instance);

struct FinalLayer {
    std::vector<Vec> configs;
    bool truncated = false;
    bool exhausted = false;
};

FinalLayer reachable_finals(const LinearScheme& scheme, const Vec& s, const SearchBound& bound);

struct LoopRange {
    Int lo = 0;
    std::optional<Int> hi;
};

// Exponents for loops first..last-1 leading from the midpoint before block
// `first` to `target`. With include_last_block the steps of block `last` are
// taken too and `target` is the configuration after them.
struct SegmentQuery {
    std::size_t first = 0;
    std::size_t last = 0;
    bool include_last_block = true;
    std::vector<LoopRange> ranges;
};

std::optional<PathExponents> solve_segment(const SlpsShape& shape, const Vec& start, const Vec& target,
                                           const SegmentQuery& query, std::size_t* nodes = nullptr);

struct IlpResult {
    bool reachable = false;
    PathExponents exponents;
};

IlpResult ilp_feasible(const LinearScheme& scheme, const Vec& s, const Vec& t);
IlpResult ilp_feasible(const Instance& instance);
IlpResult ilp_const_vars(const LinearScheme& scheme, const Vec& s, const Vec& t,
                         const std::vector<std::size_t>& free_loops, const PathExponents& fixed);

bool verify_witness(const Instance& instance, const Witness& witness);

}  // namespace vass
