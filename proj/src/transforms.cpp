#include "vass/transforms.hpp"

#include <cstdlib>
#include <string>

namespace vass {

namespace {

Int dot(const Vec& a, const Vec& b) {
    Int r = 0;
    for (std::size_t i = 0; i < a.size(); ++i) r += a[i] * b[i];
    return r;
}

Vec extend(const Vec& v, const Int& extra) {
    Vec r = v;
    r.push_back(extra);
    return r;
}

Vec embed(const Vec& v, std::size_t offset, std::size_t dim) {
    Vec r = zeros(dim);
    for (std::size_t i = 0; i < v.size(); ++i) r[offset + i] = v[i];
    return r;
}

Item shifted(const Item& item, std::size_t offset, std::size_t dim) {
    Item out = item;
    out.update = embed(item.update, offset, dim);
    for (auto& j : out.zero) j += offset;
    return out;
}

Vec unit_update(std::size_t dim, std::initializer_list<std::pair<std::size_t, long>> entries) {
    Vec u = zeros(dim);
    for (auto [i, value] : entries) u[i] += value;
    return u;
}

void check_ceiling(const LinearScheme& scheme, const char* what) {
    if (Int(static_cast<unsigned long>(scheme.items.size())) > size_ceiling())
        throw Error(Errc::DepthTooLarge, std::string(what) + " exceeds the size ceiling of " +
                                             to_string(size_ceiling()) + " items");
}

}  // namespace

Vec zero_test_budget(const LinearScheme& scheme) {
    Vec budget = zeros(scheme.dim);
    for (const Item& item : scheme.items) {
        if (item.is_loop() && !item.zero.empty())
            throw Error(Errc::ZeroTestOnLoop, "zero tests must sit on steps");
        for (std::size_t j : item.zero) budget[j] += 1;
    }
    return budget;
}

ControlledInstance controlling_counter_traced(const LinearScheme& scheme, const Vec& s, const Vec& t) {
    scheme.validate();
    if (s.size() != scheme.dim || t.size() != scheme.dim)
        throw Error(Errc::DimensionMismatch, "endpoints do not match the scheme dimension");
    ControlledInstance out;
    out.initial_copy = zero_test_budget(scheme);
    Vec copy = out.initial_copy;
    LinearScheme result(scheme.dim + 1);
    for (const Item& item : scheme.items) {
        for (std::size_t j : item.zero) copy[j] -= 1;
        Vec update = extend(item.update, dot(copy, item.update));
        if (item.is_loop())
            result.add_loop(update);
        else
            result.add_step(update);
        out.copy_after.push_back(copy);
    }
    out.instance.scheme = result;
    out.instance.source = Configuration(extend(s, dot(out.initial_copy, s)));
    out.instance.target = Configuration(extend(t, 0));
    return out;
}

Instance controlling_counter(const LinearScheme& scheme, const Vec& s, const Vec& t) {
    return controlling_counter_traced(scheme, s, t).instance;
}

std::vector<Vec> controlling_potential(const ControlledInstance& controlled) {
    std::vector<Vec> weights;
    auto weight = [](const Vec& copy) { return extend(negate(copy), 1); };
    weights.push_back(weight(controlled.initial_copy));
    for (const Vec& copy : controlled.copy_after) weights.push_back(weight(copy));
    return weights;
}

namespace {

// Loops moving mass between the first sub-counter of a group and the others.
void spreading_block(LinearScheme& out, const Counters& group) {
    for (std::size_t j = 1; j < group.size(); ++j) {
        Vec u = zeros(out.dim);
        u[group[j]] = -1;
        u[group[0]] = 1;
        out.add_loop(u);
    }
    for (std::size_t j = 1; j < group.size(); ++j) {
        Vec u = zeros(out.dim);
        u[group[0]] = -1;
        u[group[j]] = 1;
        out.add_loop(u);
    }
}

Counters group_of(std::size_t counter, std::size_t u) {
    Counters g;
    for (std::size_t j = 0; j < u; ++j) g.push_back(counter * u + j);
    return g;
}

}  // namespace

LinearScheme to_unitary(const LinearScheme& scheme, std::size_t u, bool spreading) {
    scheme.validate();
    if (u == 0) throw Error(Errc::PreconditionViolated, "split factor must be positive");
    if (scheme.max_update() > Int(static_cast<unsigned long>(u)))
        throw Error(Errc::UpdateExceedsBound, "an update exceeds the split factor " + std::to_string(u));
    LinearScheme out(scheme.dim * u);
    auto spread = [&] {
        if (!spreading) return;
        for (std::size_t i = 0; i < scheme.dim; ++i) spreading_block(out, group_of(i, u));
    };
    spread();
    for (const Item& item : scheme.items) {
        Item mapped;
        mapped.kind = item.kind;
        mapped.update = zeros(out.dim);
        for (std::size_t i = 0; i < scheme.dim; ++i) {
            const Int& value = item.update[i];
            long sign = value > 0 ? 1 : -1;
            unsigned long magnitude = Int(abs(value)).get_ui();
            for (unsigned long j = 0; j < magnitude; ++j) mapped.update[i * u + j] = sign;
        }
        for (std::size_t j : item.zero)
            for (std::size_t k : group_of(j, u)) mapped.zero.push_back(k);
        out.items.push_back(mapped);
        spread();
    }
    return out;
}

Vec lift_unitary(const Vec& x, std::size_t u) {
    Vec y = zeros(x.size() * u);
    for (std::size_t i = 0; i < x.size(); ++i) y[i * u] = x[i];
    return y;
}

Vec fold_unitary(const Vec& y, std::size_t u) {
    if (u == 0 || y.size() % u != 0) throw Error(Errc::DimensionMismatch, "vector length is not a multiple of u");
    Vec x = zeros(y.size() / u);
    for (std::size_t i = 0; i < y.size(); ++i) x[i / u] += y[i];
    return x;
}

Int max_aggregate_effect(const LinearScheme& scheme) {
    Int best = 0;
    for (const Item& item : scheme.items) {
        Int sum = 0;
        for (const Int& x : item.update) sum += x;
        if (abs(sum) > best) best = abs(sum);
    }
    return best;
}

LinearScheme eliminate_zero_tests_with_triple(const LinearScheme& scheme, const Int& tests, std::size_t a) {
    scheme.validate();
    if (!scheme.is_unitary()) throw Error(Errc::UpdateExceedsBound, "zero-test elimination needs a unitary scheme");
    if (max_aggregate_effect(scheme) > Int(static_cast<unsigned long>(a)))
        throw Error(Errc::AggregateEffectTooLarge, "aggregate effect " + to_string(max_aggregate_effect(scheme)) +
                                                       " exceeds " + std::to_string(a));
    if (Int(static_cast<unsigned long>(scheme.num_zero_tests())) != tests)
        throw Error(Errc::PreconditionViolated, "scheme performs " + std::to_string(scheme.num_zero_tests()) +
                                                    " zero tests, not " + to_string(tests));
    if (a == 0) a = 1;
    const std::size_t d = scheme.dim;
    const std::size_t c = d + a;
    const std::size_t prod = d + a + 1;
    LinearScheme out(d + a + 2);
    Counters bgroup;
    for (std::size_t j = 0; j < a; ++j) bgroup.push_back(d + j);

    auto rotation = [&](std::size_t tested) {
        Counters chain{tested};
        for (std::size_t i = 0; i < d; ++i)
            if (i != tested) chain.push_back(i);
        chain.insert(chain.end(), bgroup.begin(), bgroup.end());
        for (std::size_t k = 0; k + 1 < chain.size(); ++k)
            out.add_loop(unit_update(out.dim, {{chain[k], 1}, {chain[k + 1], -1}, {prod, -1}}));
        for (std::size_t k = chain.size() - 1; k > 0; --k)
            out.add_loop(unit_update(out.dim, {{chain[k], 1}, {chain[k - 1], -1}, {prod, -1}}));
        out.add_step(unit_update(out.dim, {{c, -1}}));
        out.add_step(unit_update(out.dim, {{c, -1}}));
    };

    spreading_block(out, bgroup);
    for (const Item& item : scheme.items) {
        for (std::size_t j : item.zero) rotation(j);
        Vec u = embed(item.update, 0, out.dim);
        Int aggregate = 0;
        for (const Int& x : item.update) aggregate += x;
        long sign = aggregate > 0 ? -1 : 1;
        unsigned long magnitude = Int(abs(aggregate)).get_ui();
        for (unsigned long j = 0; j < magnitude; ++j) u[bgroup[j]] = sign;
        bool pure_test = !item.zero.empty() && item.update == zeros(d);
        if (!pure_test) {
            if (item.is_loop())
                out.add_loop(u);
            else
                out.add_step(u);
        }
        spreading_block(out, bgroup);
    }
    for (std::size_t j : bgroup) out.add_loop(unit_update(out.dim, {{j, -1}}));
    out.add_loop(unit_update(out.dim, {{c, -1}}));
    return out;
}

Instance triple_instance(const LinearScheme& scheme, const Vec& s, const Vec& t, const Int& bound, std::size_t a) {
    Int tests = static_cast<unsigned long>(scheme.num_zero_tests());
    LinearScheme out = eliminate_zero_tests_with_triple(scheme, tests, a);
    if (a == 0) a = 1;
    Int start_sum = norm1(s);
    if (bound < start_sum || bound < norm1(t))
        throw Error(Errc::TripleTooSmall, "bound " + to_string(bound) + " is below the endpoint counter sums");
    Vec source = s;
    for (std::size_t j = 0; j + 1 < a; ++j) source.push_back(0);
    source.push_back(bound - start_sum);
    source.push_back(2 * tests);
    source.push_back(2 * bound * tests);
    Vec target = t;
    for (std::size_t j = 0; j < a + 2; ++j) target.push_back(0);
    Instance inst{out, Configuration(source), Configuration(target)};
    inst.validate();
    return inst;
}

Amplifier g1_amplifier() {
    Amplifier amp;
    amp.scheme = LinearScheme(6);
    amp.scheme.add_loop({-1, 0, 0, 1, 0, 0}).add_loop({0, -1, 0, 0, 2, 0}).add_loop({0, 0, -1, 0, 0, 2});
    // The scale rides on x, the doubled value on y.
    amp.inputs = {Counters{1}, Counters{0}, Counters{2}};
    amp.outputs = {Counters{4}, Counters{3}, Counters{5}};
    amp.depth = 1;
    return amp;
}

namespace {

RoleGroups split_groups(const RoleGroups& groups, std::size_t u) {
    RoleGroups out;
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t counter : groups[r])
            for (std::size_t k : group_of(counter, u)) out[r].push_back(k);
    return out;
}

RoleGroups shift_groups(const RoleGroups& groups, std::size_t offset) {
    RoleGroups out = groups;
    for (auto& g : out)
        for (auto& c : g) c += offset;
    return out;
}

void add_group_test(LinearScheme& scheme, const Counters& group) {
    scheme.add_test(group);
}

void add_transfer(LinearScheme& scheme, const Counters& from, std::size_t to) {
    for (std::size_t k : from) {
        Vec u = zeros(scheme.dim);
        u[k] = -1;
        u[to] += 1;
        scheme.add_loop(u);
    }
}

}  // namespace

Amplifier amplifier(std::size_t depth, const Int& parameter) {
    if (depth == 0) throw Error(Errc::PreconditionViolated, "amplifier depth must be at least 1");
    if (depth == 1) {
        Amplifier raw = g1_amplifier();
        Amplifier amp;
        amp.scheme = to_unitary(raw.scheme, 2);
        amp.inputs = split_groups(raw.inputs, 2);
        amp.outputs = split_groups(raw.outputs, 2);
        amp.depth = 1;
        amp.parameter = parameter;
        amp.value_out = 2 * parameter;
        return amp;
    }

    Amplifier amp;
    amp.depth = depth;
    amp.parameter = parameter;
    if (parameter < 0) throw Error(Errc::PreconditionViolated, "amplifier parameter must be nonnegative");
    Int iterations = parameter / 12;
    if (parameter % 12 != 0)
        amp.warnings.push_back("parameter " + to_string(parameter) + " is not a multiple of 12; using " +
                               to_string(iterations) + " iterations");
    if (iterations > size_ceiling())
        throw Error(Errc::DepthTooLarge, "iteration count exceeds the size ceiling");

    // The nested layout does not depend on its parameter.
    Amplifier shape = amplifier(depth - 1, 0);
    const RoleGroups& outs = shape.inputs;
    const RoleGroups& aux = shape.outputs;
    LinearScheme program(shape.scheme.dim);
    program.add_step(unit_update(program.dim, {{outs[Value][0], 1}}));
    program.add_loop(unit_update(program.dim, {{outs[Scale][0], 1}, {outs[Product][0], 1}}));

    Int value = 1;
    for (Int i = 0; i < iterations; ++i) {
        Amplifier nested = amplifier(depth - 1, value);
        for (const std::string& w : nested.warnings) amp.warnings.push_back(w);
        program.append(nested.scheme);
        for (const Counters& g : outs) add_group_test(program, g);
        for (std::size_t r = 0; r < 3; ++r) add_transfer(program, aux[r], outs[r][0]);
        for (const Counters& g : aux) add_group_test(program, g);
        check_ceiling(program, "amplifier");
        value = fast_growing_eval(depth - 1, value);
    }

    amp.tests = static_cast<unsigned long>(program.num_zero_tests());
    amp.scheme = eliminate_zero_tests_with_triple(program, amp.tests, 2);
    const std::size_t d = program.dim;
    amp.inputs = {Counters{d + 2}, Counters{d, d + 1}, Counters{d + 3}};
    amp.outputs = outs;
    amp.value_in = 2 * amp.tests;
    amp.value_out = value;
    check_ceiling(amp.scheme, "amplifier");
    return amp;
}

Generator generator(std::size_t depth) {
    LinearScheme raw(3);
    raw.add_step({3, 0, 0}).add_loop({0, 1, 3});
    Generator gen;
    gen.scheme = to_unitary(raw, 3);
    gen.outputs = split_groups({Counters{0}, Counters{1}, Counters{2}}, 3);
    gen.value = 3;
    if (depth == 0) return gen;

    Amplifier amp = amplifier(depth, 3);
    const std::size_t base = gen.scheme.dim;
    LinearScheme combined(base + amp.scheme.dim);
    for (const Item& item : gen.scheme.items) combined.items.push_back(shifted(item, 0, combined.dim));
    RoleGroups inputs = shift_groups(amp.inputs, base);
    for (std::size_t r = 0; r < 3; ++r) add_transfer(combined, gen.outputs[r], inputs[r][0]);
    for (const Item& item : amp.scheme.items) combined.items.push_back(shifted(item, base, combined.dim));
    check_ceiling(combined, "generator");
    gen.scheme = combined;
    gen.outputs = shift_groups(amp.outputs, base);
    gen.value = amp.value_out;
    gen.warnings = amp.warnings;
    return gen;
}

Instance generator_prefixed_triple(const Generator& gen, const LinearScheme& scheme, const Vec& t, std::size_t a) {
    Int tests = static_cast<unsigned long>(scheme.num_zero_tests());
    LinearScheme elim = eliminate_zero_tests_with_triple(scheme, tests, a);
    if (a == 0) a = 1;
    const std::size_t base = gen.scheme.dim;
    const std::size_t d = scheme.dim;
    LinearScheme combined(base + elim.dim);
    for (const Item& item : gen.scheme.items) combined.items.push_back(shifted(item, 0, combined.dim));
    // The generated value bounds the counter sum, the scale counts tests.
    add_transfer(combined, gen.outputs[Value], base + d + a - 1);
    add_transfer(combined, gen.outputs[Scale], base + d + a);
    add_transfer(combined, gen.outputs[Product], base + d + a + 1);
    for (const Item& item : elim.items) combined.items.push_back(shifted(item, base, combined.dim));
    Vec target = zeros(combined.dim);
    for (std::size_t i = 0; i < t.size(); ++i) target[base + i] = t[i];
    Instance inst{combined, Configuration(zeros(combined.dim)), Configuration(target)};
    inst.validate();
    return inst;
}

Int size_ceiling() {
    if (const char* env = std::getenv("VASS_SIZE_CEILING")) {
        try {
            Int value = parse_int(env);
            if (value > 0) return value;
        } catch (const Error&) {
        }
    }
    return 1000000;
}

Int fast_growing_eval(std::size_t level, const Int& n, const Int& ceiling) {
    if (level == 0) throw Error(Errc::PreconditionViolated, "fast-growing level starts at 1");
    if (n < 0) throw Error(Errc::PreconditionViolated, "fast-growing argument must be nonnegative");
    if (level == 1) {
        Int r = 2 * n;
        if (r > ceiling) throw Error(Errc::CeilingExceeded, "value " + to_string(r) + " exceeds the ceiling");
        return r;
    }
    Int rounds = n / 12;
    if (rounds > ceiling) throw Error(Errc::CeilingExceeded, "composition count exceeds the ceiling");
    Int value = 1;
    for (Int i = 0; i < rounds; ++i) value = fast_growing_eval(level - 1, value, ceiling);
    return value;
}

Int fast_growing_eval(std::size_t level, const Int& n) {
    return fast_growing_eval(level, n, size_ceiling());
}

Int ackermann_value(const Int& n) {
    if (n < 18 || (n - 14) % 4 != 0)
        throw Error(Errc::PreconditionViolated, "argument must be 18 + 4k");
    Int level = (n - 14) / 4;
    return fast_growing_eval(level.get_ui(), 3);
}

Int ackermann_depth_for_size(const Int& k, std::size_t max_level) {
    Int best = 0;
    for (std::size_t level = 1; level <= max_level; ++level) {
        Int n = Int(14) + 4 * Int(static_cast<unsigned long>(level));
        if (ackermann_value(n) <= k) best = n;
    }
    return best;
}

}  // namespace vass
