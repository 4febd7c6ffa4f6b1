#pragma once

#include "vass/bigint.hpp"
#include "vass/error.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace vass {

using Counters = std::vector<std::size_t>;

struct Item {
    enum class Kind { Step, Loop };

    Kind kind = Kind::Step;
    Vec update;
    Counters zero;

    static Item step(Vec update, Counters zero = {});
    static Item loop(Vec update);

    bool is_loop() const { return kind == Kind::Loop; }
    bool is_step() const { return kind == Kind::Step; }
    bool operator==(const Item& other) const = default;
};

struct LinearScheme {
    std::size_t dim = 0;
    std::vector<Item> items;

    LinearScheme() = default;
    explicit LinearScheme(std::size_t d) : dim(d) {}

    LinearScheme& add_step(Vec update, Counters zero = {});
    LinearScheme& add_test(Counters zero);
    LinearScheme& add_loop(Vec update);
    LinearScheme& append(const LinearScheme& other);

    void validate() const;
    std::size_t num_loops() const;
    std::vector<std::size_t> loop_items() const;
    std::size_t num_zero_tests() const;

    bool is_slps() const;
    bool is_unitary() const;
    bool is_ultraflat() const;
    bool is_unary_size(const Int& bound) const;
    Int max_update() const;
    Int unary_size() const;

    bool operator==(const LinearScheme& other) const = default;
};

class Configuration {
public:
    Configuration() = default;
    explicit Configuration(Vec values);

    const Vec& values() const { return values_; }
    std::size_t dim() const { return values_.size(); }
    const Int& operator[](std::size_t i) const { return values_[i]; }
    bool operator==(const Configuration& other) const = default;

private:
    Vec values_;
};

struct Instance {
    LinearScheme scheme;
    Configuration source;
    Configuration target;

    void validate() const;
    bool operator==(const Instance& other) const = default;
};

using PathExponents = std::vector<Int>;
using Walk = std::vector<std::size_t>;

// Steps between consecutive loops, folded into one block.
struct StepBlock {
    Vec effect;
    Vec guard;  // least pre-state keeping every prefix nonnegative
};

struct SlpsShape {
    std::size_t dim = 0;
    std::vector<StepBlock> alpha;  // k + 1 blocks
    std::vector<Vec> beta;         // k loop updates
    std::vector<std::size_t> loop_item;

    std::size_t k() const { return beta.size(); }
};

SlpsShape decompose(const LinearScheme& scheme);

Vec effect(const LinearScheme& scheme, const PathExponents& exps);
std::vector<Vec> midpoints(const LinearScheme& scheme, const Vec& s, const PathExponents& exps);
bool check_run(const LinearScheme& scheme, const Vec& s, const PathExponents& exps, const Vec& t);

Walk expand_walk(const LinearScheme& scheme, const PathExponents& exps);
PathExponents walk_exponents(const LinearScheme& scheme, const Walk& walk);
void check_walk_shape(const LinearScheme& scheme, const Walk& walk);
Configuration simulate(const LinearScheme& scheme, const Configuration& s, const Walk& walk);
std::vector<Vec> trace(const LinearScheme& scheme, const Vec& s, const Walk& walk);

PathExponents shift_path(const PathExponents& exps, const std::vector<std::size_t>& indices,
                         const std::vector<Int>& coeffs);

LinearScheme reverse_scheme(const LinearScheme& scheme);
Instance reverse(const Instance& instance);

LinearScheme drop_zero_loops(const LinearScheme& scheme);

}  // namespace vass
