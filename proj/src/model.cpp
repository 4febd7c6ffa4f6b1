#include "vass/model.hpp"

#include <algorithm>
#include <string>

namespace vass {

namespace {

void require_dim(const Vec& v, std::size_t dim, const char* what) {
    if (v.size() != dim)
        throw Error(Errc::DimensionMismatch, std::string(what) + " has length " +
                                                 std::to_string(v.size()) + ", expected " +
                                                 std::to_string(dim));
}

void require_exps(const LinearScheme& scheme, const PathExponents& exps) {
    if (exps.size() != scheme.num_loops())
        throw Error(Errc::DimensionMismatch, "expected " + std::to_string(scheme.num_loops()) +
                                                 " exponents, got " + std::to_string(exps.size()));
    for (const auto& n : exps)
        if (sgn(n) < 0) throw Error(Errc::NegativeExponent, "exponent " + n.get_str());
}

}  // namespace

Item Item::step(Vec update, Counters zero) {
    std::sort(zero.begin(), zero.end());
    zero.erase(std::unique(zero.begin(), zero.end()), zero.end());
    return Item{Kind::Step, std::move(update), std::move(zero)};
}

Item Item::loop(Vec update) { return Item{Kind::Loop, std::move(update), {}}; }

LinearScheme& LinearScheme::add_step(Vec update, Counters zero) {
    require_dim(update, dim, "step update");
    items.push_back(Item::step(std::move(update), std::move(zero)));
    return *this;
}

LinearScheme& LinearScheme::add_test(Counters zero) { return add_step(zeros(dim), std::move(zero)); }

LinearScheme& LinearScheme::add_loop(Vec update) {
    require_dim(update, dim, "loop update");
    items.push_back(Item::loop(std::move(update)));
    return *this;
}

LinearScheme& LinearScheme::append(const LinearScheme& other) {
    if (other.dim != dim) throw Error(Errc::DimensionMismatch, "appending scheme of other dimension");
    items.insert(items.end(), other.items.begin(), other.items.end());
    return *this;
}

void LinearScheme::validate() const {
    if (dim == 0) throw Error(Errc::DimensionMismatch, "dimension must be positive");
    for (std::size_t i = 0; i < items.size(); ++i) {
        require_dim(items[i].update, dim, "item update");
        if (items[i].is_loop() && !items[i].zero.empty())
            throw Error(Errc::ZeroTestOnLoop, "loop at item " + std::to_string(i) + " carries a zero test");
        for (auto c : items[i].zero)
            if (c >= dim)
                throw Error(Errc::DimensionMismatch, "zero test on counter " + std::to_string(c + 1) +
                                                         " outside dimension " + std::to_string(dim));
    }
}

std::size_t LinearScheme::num_loops() const {
    return static_cast<std::size_t>(std::count_if(items.begin(), items.end(), [](const Item& it) { return it.is_loop(); }));
}

std::vector<std::size_t> LinearScheme::loop_items() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < items.size(); ++i)
        if (items[i].is_loop()) out.push_back(i);
    return out;
}

std::size_t LinearScheme::num_zero_tests() const {
    std::size_t total = 0;
    for (const auto& it : items) total += it.zero.size();
    return total;
}

bool LinearScheme::is_slps() const {
    return std::all_of(items.begin(), items.end(), [](const Item& it) { return it.zero.empty(); });
}

bool LinearScheme::is_unitary() const {
    for (const auto& it : items)
        for (const auto& x : it.update)
            if (abs(x) > 1) return false;
    return true;
}

bool LinearScheme::is_ultraflat() const {
    for (const auto& it : items)
        if (it.is_step())
            for (const auto& x : it.update)
                if (sgn(x) != 0) return false;
    return true;
}

bool LinearScheme::is_unary_size(const Int& bound) const { return unary_size() <= bound; }

Int LinearScheme::max_update() const {
    Int best = 0;
    for (const auto& it : items) {
        Int m = norm_inf(it.update);
        if (m > best) best = m;
    }
    return best;
}

Int LinearScheme::unary_size() const {
    Int total = 0;
    for (const auto& it : items) total += 1 + norm1(it.update);
    return total;
}

Configuration::Configuration(Vec values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (sgn(values_[i]) < 0)
            throw Error(Errc::NegativeCounter, "configuration entry " + std::to_string(i + 1) + " is " +
                                                   values_[i].get_str());
}

void Instance::validate() const {
    scheme.validate();
    if (source.dim() != scheme.dim || target.dim() != scheme.dim)
        throw Error(Errc::DimensionMismatch, "endpoint dimension differs from scheme dimension");
}

SlpsShape decompose(const LinearScheme& scheme) {
    if (!scheme.is_slps()) throw Error(Errc::NotSlps, "scheme has zero tests");
    SlpsShape shape;
    shape.dim = scheme.dim;
    StepBlock block{zeros(scheme.dim), zeros(scheme.dim)};
    for (std::size_t i = 0; i < scheme.items.size(); ++i) {
        const Item& it = scheme.items[i];
        if (it.is_loop()) {
            shape.alpha.push_back(block);
            block = StepBlock{zeros(scheme.dim), zeros(scheme.dim)};
            shape.beta.push_back(it.update);
            shape.loop_item.push_back(i);
        } else {
            for (std::size_t c = 0; c < scheme.dim; ++c) {
                block.effect[c] += it.update[c];
                if (-block.effect[c] > block.guard[c]) block.guard[c] = -block.effect[c];
            }
        }
    }
    shape.alpha.push_back(block);
    return shape;
}

Vec effect(const LinearScheme& scheme, const PathExponents& exps) {
    require_exps(scheme, exps);
    Vec total = zeros(scheme.dim);
    std::size_t j = 0;
    for (const auto& it : scheme.items) {
        require_dim(it.update, scheme.dim, "item update");
        const Int& times = it.is_loop() ? exps[j++] : Int(1);
        for (std::size_t c = 0; c < scheme.dim; ++c) total[c] += times * it.update[c];
    }
    return total;
}

std::vector<Vec> midpoints(const LinearScheme& scheme, const Vec& s, const PathExponents& exps) {
    require_dim(s, scheme.dim, "source");
    require_exps(scheme, exps);
    SlpsShape shape = decompose(scheme);
    std::vector<Vec> out;
    Vec a = s;
    for (std::size_t i = 0; i <= shape.k(); ++i) {
        if (i > 0) a = add(out.back(), scale(shape.beta[i - 1], exps[i - 1]));
        out.push_back(a);
        out.push_back(add(a, shape.alpha[i].effect));
    }
    return out;
}

bool check_run(const LinearScheme& scheme, const Vec& s, const PathExponents& exps, const Vec& t) {
    require_dim(t, scheme.dim, "target");
    std::vector<Vec> mids = midpoints(scheme, s, exps);
    SlpsShape shape = decompose(scheme);
    if (mids.back() != t) return false;
    for (std::size_t i = 0; i <= shape.k(); ++i) {
        if (!leq(shape.alpha[i].guard, mids[2 * i])) return false;
        if (!nonnegative(mids[2 * i + 1])) return false;
    }
    return true;
}

Walk expand_walk(const LinearScheme& scheme, const PathExponents& exps) {
    require_exps(scheme, exps);
    Walk walk;
    std::size_t j = 0;
    for (std::size_t i = 0; i < scheme.items.size(); ++i) {
        if (scheme.items[i].is_loop()) {
            for (Int n = 0; n < exps[j]; ++n) walk.push_back(i);
            ++j;
        } else {
            walk.push_back(i);
        }
    }
    return walk;
}

void check_walk_shape(const LinearScheme& scheme, const Walk& walk) {
    std::size_t expect = 0;  // next step item that must appear
    for (std::size_t pos = 0; pos < walk.size(); ++pos) {
        std::size_t i = walk[pos];
        if (i >= scheme.items.size())
            throw Error(Errc::IllegalWalk, "item " + std::to_string(i) + " out of range at position " + std::to_string(pos));
        if (pos > 0 && i < walk[pos - 1])
            throw Error(Errc::IllegalWalk, "walk moves backwards at position " + std::to_string(pos));
        for (; expect < i; ++expect)
            if (scheme.items[expect].is_step())
                throw Error(Errc::IllegalWalk, "step " + std::to_string(expect) + " skipped");
        if (scheme.items[i].is_step()) {
            if (pos > 0 && walk[pos - 1] == i)
                throw Error(Errc::IllegalWalk, "step " + std::to_string(i) + " repeated");
            expect = i + 1;
        }
    }
    for (; expect < scheme.items.size(); ++expect)
        if (scheme.items[expect].is_step())
            throw Error(Errc::IllegalWalk, "step " + std::to_string(expect) + " never taken");
}

PathExponents walk_exponents(const LinearScheme& scheme, const Walk& walk) {
    check_walk_shape(scheme, walk);
    std::vector<std::size_t> slot(scheme.items.size(), 0);
    std::size_t j = 0;
    for (std::size_t i = 0; i < scheme.items.size(); ++i)
        if (scheme.items[i].is_loop()) slot[i] = j++;
    PathExponents exps(j, Int(0));
    for (auto i : walk)
        if (scheme.items[i].is_loop()) exps[slot[i]] += 1;
    return exps;
}

std::vector<Vec> trace(const LinearScheme& scheme, const Vec& s, const Walk& walk) {
    require_dim(s, scheme.dim, "source");
    check_walk_shape(scheme, walk);
    std::vector<Vec> configs{s};
    Vec cur = s;
    for (std::size_t pos = 0; pos < walk.size(); ++pos) {
        const Item& it = scheme.items[walk[pos]];
        for (auto c : it.zero)
            if (sgn(cur[c]) != 0)
                throw Error(Errc::ZeroTestFailed, "counter " + std::to_string(c + 1) + " is " + cur[c].get_str() +
                                                      " at walk position " + std::to_string(pos));
        for (std::size_t c = 0; c < scheme.dim; ++c) {
            cur[c] += it.update[c];
            if (sgn(cur[c]) < 0)
                throw Error(Errc::NegativeCounter, "counter " + std::to_string(c + 1) +
                                                       " negative at walk position " + std::to_string(pos));
        }
        configs.push_back(cur);
    }
    return configs;
}

Configuration simulate(const LinearScheme& scheme, const Configuration& s, const Walk& walk) {
    return Configuration(trace(scheme, s.values(), walk).back());
}

PathExponents shift_path(const PathExponents& exps, const std::vector<std::size_t>& indices,
                         const std::vector<Int>& coeffs) {
    if (indices.size() != coeffs.size() || indices.size() > 3)
        throw Error(Errc::DimensionMismatch, "shift needs at most three positions with matching coefficients");
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= exps.size()) throw Error(Errc::DimensionMismatch, "shift position out of range");
        if (i > 0 && indices[i] <= indices[i - 1])
            throw Error(Errc::PreconditionViolated, "shift positions must be strictly increasing");
    }
    PathExponents out = exps;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        out[indices[i]] += coeffs[i];
        if (sgn(out[indices[i]]) < 0)
            throw Error(Errc::NegativeExponent, "shift makes exponent " + std::to_string(indices[i]) + " negative");
    }
    return out;
}

LinearScheme reverse_scheme(const LinearScheme& scheme) {
    if (!scheme.is_slps()) throw Error(Errc::NotSlps, "reverse requires a scheme without zero tests");
    LinearScheme out(scheme.dim);
    for (auto it = scheme.items.rbegin(); it != scheme.items.rend(); ++it) {
        Item copy = *it;
        copy.update = negate(copy.update);
        out.items.push_back(std::move(copy));
    }
    return out;
}

Instance reverse(const Instance& instance) {
    return Instance{reverse_scheme(instance.scheme), instance.target, instance.source};
}

LinearScheme drop_zero_loops(const LinearScheme& scheme) {
    LinearScheme out(scheme.dim);
    for (const auto& it : scheme.items)
        if (!(it.is_loop() && norm1(it.update) == 0)) out.items.push_back(it);
    return out;
}

}  // namespace vass
