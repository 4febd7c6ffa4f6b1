#include "vass/poly2.hpp"

#include "vass/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace vass::poly2 {

namespace {

Int floor_div(const Int& a, const Int& b) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

Int ceil_div(const Int& a, const Int& b) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

Int mod_floor(const Int& a, const Int& b) {
    Int r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

void require_two_dim(const LinearScheme& scheme) {
    scheme.validate();
    if (scheme.dim != 2) throw Error(Errc::UnsupportedScheme, "scheme must have exactly two counters");
    if (!scheme.is_slps()) throw Error(Errc::UnsupportedScheme, "scheme must not contain zero tests");
}

bool low(const Vec& c, const Int& m) { return c[0] < m || c[1] < m; }
bool in_box(const Vec& c, const Int& m) { return c[0] <= m && c[1] <= m; }

using Pair = std::pair<std::size_t, std::size_t>;
using StateMap = std::unordered_map<Vec, PathExponents, VecHash>;

enum class Move { Short, Big };

// Exponents n for one loop: short ones are below m; big ones are at least m
// and leave some decreased counter below m.
template <class F>
void apply_loop(const Vec& b, const Vec& beta, Move mode, const Int& m, F&& take) {
    const bool drains = sgn(beta[0]) < 0 || sgn(beta[1]) < 0;
    if (mode == Move::Short) {
        Vec d = b;
        for (Int n = 0; n < m; ++n) {
            if (!nonnegative(d)) break;
            take(n, d);
            if (norm1(beta) == 0) break;
            d = add(d, beta);
        }
        return;
    }
    if (!drains) return;
    std::optional<Int> hi;
    std::optional<Int> lo;
    for (std::size_t c = 0; c < 2; ++c) {
        if (sgn(beta[c]) >= 0) continue;
        Int step = -beta[c];
        Int top = floor_div(b[c], step);
        Int bottom = ceil_div(b[c] - (m - 1), step);
        if (!hi || top < *hi) hi = top;
        if (!lo || bottom < *lo) lo = bottom;
    }
    Int start = std::max(*lo, m);
    for (Int n = start; n <= *hi; ++n) {
        Vec d = add(b, scale(beta, n));
        bool lands = false;
        for (std::size_t c = 0; c < 2; ++c)
            if (sgn(beta[c]) < 0 && d[c] < m) lands = true;
        if (lands && nonnegative(d)) take(n, d);
    }
}

// Walks the loops after layer `from` with the moves allowed by `tag` and
// reports configurations at later layers: low ones once the tagged pair has
// been used, and every configuration at the last layer.
template <class Emit>
void expand(const SlpsShape& shape, std::size_t from, const Vec& a, const std::optional<Pair>& tag, const Int& m,
            Emit&& emit) {
    StateMap states{{a, {}}};
    const std::size_t k = shape.k();
    for (std::size_t l = from; l < k && !states.empty(); ++l) {
        Move mode = tag && (l == tag->first || l == tag->second) ? Move::Big : Move::Short;
        StateMap next;
        for (const auto& [c, e] : states) {
            if (!leq(shape.alpha[l].guard, c)) continue;
            Vec b = add(c, shape.alpha[l].effect);
            apply_loop(b, shape.beta[l], mode, m, [&](const Int& n, const Vec& d) {
                if (next.count(d)) return;
                PathExponents e2 = e;
                e2.push_back(n);
                next.emplace(d, std::move(e2));
            });
        }
        states.clear();
        const bool pair_done = !tag || l >= tag->second;
        for (auto& [d, e] : next) {
            if (pair_done && (l + 1 == k || low(d, m))) {
                if (emit(l + 1, d, e)) return;
            } else {
                states.emplace(d, std::move(e));
            }
        }
    }
}

bool reaches_target(const SlpsShape& shape, const Vec& c, const Vec& t) {
    const StepBlock& last = shape.alpha[shape.k()];
    return leq(last.guard, c) && add(c, last.effect) == t;
}

std::vector<std::vector<std::size_t>> subsets(std::size_t lo, std::size_t hi, std::size_t size) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t next) {
        if (cur.size() == size) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = next; i < hi; ++i) {
            cur.push_back(i);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(lo);
    return out;
}

// Final transition: at most three loops after layer i reach m, the rest stay below.
std::optional<PathExponents> final_transition(const SlpsShape& shape, std::size_t i, const Vec& a, const Vec& t,
                                              const Int& m, std::size_t& checks) {
    const std::size_t k = shape.k();
    if (i == k) return reaches_target(shape, a, t) ? std::optional<PathExponents>(PathExponents{}) : std::nullopt;
    SegmentQuery open{i, k, true, std::vector<LoopRange>(k - i)};
    ++checks;
    if (!solve_segment(shape, a, t, open)) return std::nullopt;
    std::size_t free_count = std::min<std::size_t>(3, k - i);
    for (const auto& chosen : subsets(i, k, free_count)) {
        SegmentQuery q{i, k, true, std::vector<LoopRange>(k - i)};
        for (std::size_t l = i; l < k; ++l) {
            bool is_free = std::find(chosen.begin(), chosen.end(), l) != chosen.end();
            q.ranges[l - i] = is_free ? LoopRange{0, std::nullopt} : LoopRange{0, m - 1};
        }
        ++checks;
        if (auto exps = solve_segment(shape, a, t, q)) return exps;
    }
    return std::nullopt;
}

std::vector<Pair> opposite_pairs(const SlpsShape& shape, std::size_t from) {
    std::vector<Pair> out;
    for (std::size_t i1 = from; i1 < shape.k(); ++i1)
        for (std::size_t i2 = i1 + 1; i2 < shape.k(); ++i2)
            if (are_opposite(shape.beta[i1], shape.beta[i2])) out.push_back({i1, i2});
    return out;
}

bool parallel(const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0] == 0; }

// One layer of the table: each configuration with the tags still alive.
struct LayerTable {
    std::vector<Vec> configs;
    std::vector<PathExponents> prefix;
    std::vector<std::vector<char>> alive;  // per tag; index 0 is the untagged tuple
    std::unordered_map<Vec, std::size_t, VecHash> index;
};

// Marks tags of dominated tuples dead. Returns the number removed.
std::size_t prune_layer(const SlpsShape& shape, const std::vector<Pair>& tags, LayerTable& table, const Int& m,
                        const Int& norm) {
    std::size_t removed = 0;
    const Int norm2 = norm * norm;
    const Int floor_value = 2 * m * norm2 * norm + m;
    for (std::size_t ti = 0; ti < tags.size(); ++ti) {
        const Vec& first = shape.beta[tags[ti].first];
        const Vec& second = shape.beta[tags[ti].second];
        if (parallel(first, second)) continue;
        for (std::size_t small = 0; small < 2; ++small) {
            const std::size_t big = 1 - small;
            PairCombination comb = pair_combination(first, second, small);
            Int h_abs = abs(comb.h);
            // (small value, residue) -> sorted big values with row indices
            std::map<std::pair<Int, Int>, std::vector<std::pair<Int, std::size_t>>> groups;
            for (std::size_t row = 0; row < table.configs.size(); ++row) {
                const Vec& c = table.configs[row];
                if (!table.alive[row][ti + 1]) continue;
                if (!(c[small] <= m && c[big] > m)) continue;
                groups[{c[small], mod_floor(c[big], h_abs)}].push_back({c[big], row});
            }
            for (auto& [key, members] : groups) {
                std::sort(members.begin(), members.end());
                for (std::size_t idx = 0; idx < members.size(); ++idx) {
                    const Int& v = members[idx].first;
                    if (v < floor_value) continue;
                    // |u - v| < v / (2 norm^2) - m norm^2, with u - v of the sign of h
                    Int reach = floor_div(v - 1, 2 * norm2) - m * norm2;
                    if (sgn(reach) <= 0) continue;
                    bool dominated = false;
                    if (sgn(comb.h) > 0) {
                        dominated = idx + 1 < members.size() && members[idx + 1].first - v <= reach;
                    } else {
                        dominated = idx > 0 && v - members[idx - 1].first <= reach;
                    }
                    if (dominated) {
                        table.alive[members[idx].second][ti + 1] = 0;
                        ++removed;
                    }
                }
            }
        }
    }
    return removed;
}

struct Engine {
    const SlpsShape& shape;
    Vec target;
    Int m;
    Int norm;
    const Options& options;
    Explanation& explanation;

    std::optional<PathExponents> run(const std::vector<std::pair<std::size_t, std::pair<Vec, PathExponents>>>& seeds) {
        const std::size_t k = shape.k();
        std::vector<std::vector<Pair>> tags(k + 1);
        for (std::size_t j = 0; j <= k; ++j) tags[j] = opposite_pairs(shape, j);
        std::vector<LayerTable> layers(k + 1);
        auto add = [&](std::size_t j, const Vec& c, const PathExponents& prefix) {
            LayerTable& t = layers[j];
            if (t.index.count(c)) return;
            t.index.emplace(c, t.configs.size());
            t.configs.push_back(c);
            t.prefix.push_back(prefix);
            t.alive.emplace_back(tags[j].size() + 1, 1);
        };
        for (const auto& [j, seed] : seeds) {
            if (j == k) {
                if (reaches_target(shape, seed.first, target)) return seed.second;
                continue;
            }
            add(j, seed.first, seed.second);
        }
        for (std::size_t i = 0; i < k; ++i) {
            LayerTable& table = layers[i];
            std::size_t before = 0;
            for (const auto& row : table.alive)
                for (char a : row) before += a;
            std::size_t after = before;
            if (options.dominance && before > options.prune_limit) {
                std::size_t removed = prune_layer(shape, tags[i], table, m, norm);
                explanation.pruned += removed;
                after -= removed;
            }
            explanation.layers.push_back({i, before, after});
            for (std::size_t row = 0; row < table.configs.size(); ++row) {
                const Vec config = table.configs[row];
                const PathExponents prefix = table.prefix[row];
                if (auto tail = final_transition(shape, i, config, target, m, explanation.final_checks)) {
                    PathExponents full = prefix;
                    full.insert(full.end(), tail->begin(), tail->end());
                    return full;
                }
                for (std::size_t ti = 0; ti <= tags[i].size(); ++ti) {
                    if (!table.alive[row][ti]) continue;
                    std::optional<Pair> tag;
                    if (ti > 0) tag = tags[i][ti - 1];
                    std::optional<PathExponents> found;
                    expand(shape, i, config, tag, m, [&](std::size_t j, const Vec& d, const PathExponents& e) {
                        PathExponents full = prefix;
                        full.insert(full.end(), e.begin(), e.end());
                        if (j == k) {
                            if (reaches_target(shape, d, target)) {
                                found = full;
                                return true;
                            }
                            return false;
                        }
                        add(j, d, full);
                        return false;
                    });
                    if (found) return found;
                }
            }
        }
        return std::nullopt;
    }
};

// Scheme made of the items up to and including loop `loops - 1`.
LinearScheme prefix_scheme(const LinearScheme& scheme, const SlpsShape& shape, std::size_t loops) {
    LinearScheme out(scheme.dim);
    std::size_t end = loops == 0 ? 0 : shape.loop_item[loops - 1] + 1;
    for (std::size_t i = 0; i < end; ++i) out.items.push_back(scheme.items[i]);
    return out;
}

// Layer states reachable from the seeds with every midpoint inside [0, m]^2.
std::vector<std::pair<std::size_t, std::pair<Vec, PathExponents>>> box_closure(
    const SlpsShape& shape, const std::vector<std::pair<std::size_t, std::pair<Vec, PathExponents>>>& seeds,
    const Int& m) {
    const std::size_t k = shape.k();
    std::vector<StateMap> layers(k + 1);
    for (const auto& [j, seed] : seeds) layers[j].emplace(seed.first, seed.second);
    for (std::size_t l = 0; l < k; ++l) {
        for (const auto& [c, e] : layers[l]) {
            if (!leq(shape.alpha[l].guard, c)) continue;
            Vec b = add(c, shape.alpha[l].effect);
            if (!in_box(b, m)) continue;
            Vec d = b;
            for (Int n = 0;; ++n) {
                if (!nonnegative(d) || !in_box(d, m)) break;
                if (!layers[l + 1].count(d)) {
                    PathExponents e2 = e;
                    e2.push_back(n);
                    layers[l + 1].emplace(d, std::move(e2));
                }
                if (norm1(shape.beta[l]) == 0) break;
                d = add(d, shape.beta[l]);
            }
        }
    }
    std::vector<std::pair<std::size_t, std::pair<Vec, PathExponents>>> out;
    for (std::size_t l = 0; l <= k; ++l)
        for (const auto& [c, e] : layers[l]) out.push_back({l, {c, e}});
    return out;
}

}  // namespace

Int ball_radius(const Int& norm, const Int& m) { return 2 * m + m * norm * norm; }

Int prune_bound(const Int& norm, std::size_t loops, const Int& m) {
    Int k = static_cast<unsigned long>(loops);
    Int window = 2 * m * norm * norm * norm + m;
    return k * k * k * 2 * (m + 1) * 2 * norm * norm * window;
}

Constants compute_constants(const LinearScheme& scheme) {
    require_two_dim(scheme);
    Constants k;
    k.norm = scheme.unary_size();
    k.delta = scheme.max_update();
    k.n = 2 * k.delta * k.delta;
    k.b = k.n * k.norm * k.norm + 2 * k.n * k.norm;
    k.c = k.norm * k.norm * (k.b + (2 * k.n + 3) * k.norm);
    Int base = k.c + k.norm;
    k.m = base * base * base;
    k.r = ball_radius(k.norm, k.m);
    k.p_dom = prune_bound(k.norm, scheme.num_loops(), k.m);
    return k;
}

Int working_threshold(const LinearScheme& scheme) {
    Int delta = scheme.max_update();
    return 2 * delta + 2;
}

bool is_mixed(const Vec& v) {
    return v.size() == 2 && ((sgn(v[0]) > 0 && sgn(v[1]) < 0) || (sgn(v[0]) < 0 && sgn(v[1]) > 0));
}

bool are_opposite(const Vec& a, const Vec& b) {
    return is_mixed(a) && is_mixed(b) && sgn(a[0]) != sgn(b[0]);
}

bool is_slim(const Vec& config, const Int& m) {
    bool below = config[0] <= m && config[1] <= m;
    bool above = config[0] >= m && config[1] >= m;
    return !below && !above;
}

PairCombination pair_combination(const Vec& first, const Vec& second, std::size_t small_axis) {
    if (small_axis > 1) throw Error(Errc::DimensionMismatch, "axis must be 0 or 1");
    const std::size_t big = 1 - small_axis;
    PairCombination pc;
    pc.x1 = abs(second[small_axis]);
    pc.x2 = abs(first[small_axis]);
    pc.h = pc.x1 * first[big] + pc.x2 * second[big];
    return pc;
}

bool close_reachability(const LinearScheme& scheme, const Vec& s, const Vec& t, const Int& p, const Int& c0) {
    require_two_dim(scheme);
    if (s.size() != 2 || t.size() != 2) throw Error(Errc::DimensionMismatch, "configurations must have two counters");
    if (!nonnegative(s) || !nonnegative(t)) throw Error(Errc::NegativeCounter, "configurations must be nonnegative");
    if (norm1(sub(t, s)) > p) throw Error(Errc::PreconditionViolated, "target is farther than the given distance");
    SlpsShape shape = decompose(scheme);
    const Int norm = scheme.unary_size();
    const Int radius = c0 * (p + norm) * (p + norm);
    if (s[0] >= p + radius && s[1] >= p + radius) {
        SegmentQuery q{0, shape.k(), true, std::vector<LoopRange>(shape.k())};
        return solve_segment(shape, s, t, q).has_value();
    }
    // Search over displacements from s within the radius.
    if (!radius.fits_slong_p()) throw Error(Errc::CeilingExceeded, "search radius too large");
    const long r = radius.get_si();
    long floor_off[2];
    for (std::size_t c = 0; c < 2; ++c) floor_off[c] = s[c] < radius ? -s[c].get_si() : -r;
    using Off = std::pair<long, long>;
    struct OffHash {
        std::size_t operator()(const Off& o) const noexcept {
            return std::hash<long>()(o.first) * 0x9e3779b97f4a7c15ULL ^ std::hash<long>()(o.second);
        }
    };
    auto fits = [&](const Off& o) {
        return o.first >= floor_off[0] && o.second >= floor_off[1] && o.first <= r && o.second <= r;
    };
    auto small = [](const Vec& v) { return Off(v[0].get_si(), v[1].get_si()); };
    // Least offset meeting a guard; offsets never go below -r.
    auto guard_floor = [&](const Vec& guard) {
        Off out;
        long* parts[2] = {&out.first, &out.second};
        for (std::size_t c = 0; c < 2; ++c) {
            Int need = guard[c] - s[c];
            *parts[c] = need < -radius ? -r : need.get_si();
        }
        return out;
    };
    auto meets = [](const Off& o, const Off& need) { return o.first >= need.first && o.second >= need.second; };
    std::unordered_set<Off, OffHash> layer{{0, 0}};
    for (std::size_t l = 0; l < shape.k(); ++l) {
        Off need = guard_floor(shape.alpha[l].guard);
        Off eff = small(shape.alpha[l].effect);
        Off beta = small(shape.beta[l]);
        std::unordered_set<Off, OffHash> next;
        for (const Off& o : layer) {
            if (!meets(o, need)) continue;
            Off cur{o.first + eff.first, o.second + eff.second};
            while (fits(cur) && !next.count(cur)) {
                next.insert(cur);
                if (beta.first == 0 && beta.second == 0) break;
                cur = {cur.first + beta.first, cur.second + beta.second};
            }
        }
        layer = std::move(next);
    }
    Off want = small(sub(t, s));
    Off need = guard_floor(shape.alpha[shape.k()].guard);
    Off eff = small(shape.alpha[shape.k()].effect);
    for (const Off& o : layer) {
        if (meets(o, need) && o.first + eff.first == want.first && o.second + eff.second == want.second) return true;
    }
    return false;
}

bool tuple_step(const LinearScheme& scheme, const DpTuple& from, const DpTuple& to, const Int& m) {
    require_two_dim(scheme);
    SlpsShape shape = decompose(scheme);
    const std::size_t k = shape.k();
    if (from.index >= to.index || to.index > k) return false;
    if (to.index > 0 && to.index < k && !is_slim(to.config, m)) return false;
    if (from.pair) {
        auto [i1, i2] = *from.pair;
        if (!(from.index <= i1 && i1 < i2 && i2 < k)) return false;
        if (!are_opposite(shape.beta[i1], shape.beta[i2])) return false;
        if (to.index <= i2) return false;
    }
    bool hit = false;
    expand(shape, from.index, from.config, from.pair, m, [&](std::size_t j, const Vec& d, const PathExponents&) {
        if (j == to.index && d == to.config) hit = true;
        return hit;
    });
    return hit;
}

std::vector<DpTuple> dominance_prune(const LinearScheme& scheme, std::vector<DpTuple> tuples, const Int& m,
                                     std::size_t limit) {
    require_two_dim(scheme);
    if (tuples.size() <= limit || tuples.empty()) return tuples;
    SlpsShape shape = decompose(scheme);
    const std::size_t layer = tuples.front().index;
    for (const auto& t : tuples)
        if (t.index != layer) throw Error(Errc::PreconditionViolated, "tuples must share one layer");
    std::vector<Pair> tags = opposite_pairs(shape, layer);
    LayerTable table;
    for (const auto& t : tuples) {
        auto it = table.index.find(t.config);
        if (it == table.index.end()) {
            it = table.index.emplace(t.config, table.configs.size()).first;
            table.configs.push_back(t.config);
            table.prefix.emplace_back();
            table.alive.emplace_back(tags.size() + 1, 0);
        }
        std::size_t ti = 0;
        if (t.pair) {
            auto pos = std::find(tags.begin(), tags.end(), *t.pair);
            if (pos == tags.end()) throw Error(Errc::PreconditionViolated, "tuple pair is not an opposite pair");
            ti = static_cast<std::size_t>(pos - tags.begin()) + 1;
        }
        table.alive[it->second][ti] = 1;
    }
    prune_layer(shape, tags, table, m, scheme.unary_size());
    std::vector<DpTuple> out;
    for (const auto& t : tuples) {
        std::size_t row = table.index.at(t.config);
        std::size_t ti = 0;
        if (t.pair) ti = static_cast<std::size_t>(std::find(tags.begin(), tags.end(), *t.pair) - tags.begin()) + 1;
        if (table.alive[row][ti]) out.push_back(t);
    }
    return out;
}

std::vector<DpTuple> initial_tuples(const LinearScheme& scheme, const Vec& s) {
    require_two_dim(scheme);
    SlpsShape shape = decompose(scheme);
    std::vector<DpTuple> out{DpTuple{0, s, std::nullopt}};
    for (const Pair& p : opposite_pairs(shape, 0)) out.push_back(DpTuple{0, s, p});
    return out;
}

std::vector<DpTuple> important_set(const LinearScheme& scheme, const Vec& t, std::size_t index,
                                   const std::vector<std::vector<DpTuple>>& prior, const Int& m, bool dominance) {
    require_two_dim(scheme);
    SlpsShape shape = decompose(scheme);
    const std::size_t k = shape.k();
    if (index == 0 || index > k + 1) throw Error(Errc::PreconditionViolated, "layer index out of range");
    std::vector<Vec> found;
    std::unordered_set<Vec, VecHash> seen;
    bool target_hit = false;
    std::size_t checks = 0;
    for (const auto& set : prior) {
        for (const DpTuple& tuple : set) {
            if (tuple.index >= index) throw Error(Errc::PreconditionViolated, "prior tuple is not earlier");
            if (index == k + 1 && !tuple.pair && !target_hit)
                target_hit = final_transition(shape, tuple.index, tuple.config, t, m, checks).has_value();
            expand(shape, tuple.index, tuple.config, tuple.pair, m, [&](std::size_t j, const Vec& d, const PathExponents&) {
                if (index == k + 1) {
                    if (j == k && reaches_target(shape, d, t)) target_hit = true;
                } else if (j == index && seen.insert(d).second) {
                    found.push_back(d);
                }
                return false;
            });
        }
    }
    if (index == k + 1) {
        if (!target_hit) return {};
        return {DpTuple{k + 1, t, std::nullopt}};
    }
    std::vector<Pair> tags = opposite_pairs(shape, index);
    std::sort(found.begin(), found.end());
    std::vector<DpTuple> out;
    for (const Vec& c : found) {
        out.push_back(DpTuple{index, c, std::nullopt});
        for (const Pair& p : tags) out.push_back(DpTuple{index, c, p});
    }
    if (dominance) out = dominance_prune(scheme, std::move(out), m);
    return out;
}

Result decide_reach(const LinearScheme& input, const Vec& s, const Vec& t, const Options& options) {
    require_two_dim(input);
    if (s.size() != 2 || t.size() != 2) throw Error(Errc::DimensionMismatch, "configurations must have two counters");
    if (!nonnegative(s) || !nonnegative(t)) throw Error(Errc::NegativeCounter, "configurations must be nonnegative");
    Result result;
    Explanation& ex = result.explanation;
    ex.constants = compute_constants(input);

    // Zero loops never matter; they get exponent 0 in the witness.
    LinearScheme scheme = drop_zero_loops(input);
    SlpsShape shape = decompose(scheme);
    const Int m = options.m ? *options.m : working_threshold(input);
    if (m < 1) throw Error(Errc::PreconditionViolated, "threshold must be positive");
    ex.threshold = m;
    ex.ball_radius = ball_radius(input.unary_size(), m);
    ex.prune_bound = prune_bound(input.unary_size(), input.num_loops(), m);
    const Int norm = input.unary_size();

    auto finish = [&](const PathExponents& exps, const std::string& how) {
        PathExponents full;
        std::size_t j = 0;
        for (const auto& it : input.items) {
            if (!it.is_loop()) continue;
            if (norm1(it.update) == 0) {
                full.push_back(0);
            } else {
                full.push_back(exps[j++]);
            }
        }
        result.reachable = true;
        if (check_run(input, s, full, t)) result.exponents = full;
        ex.decided_by = how;
        return result;
    };

    using Seeds = std::vector<std::pair<std::size_t, std::pair<Vec, PathExponents>>>;
    Engine forward{shape, t, m, norm, options, ex};

    if (in_box(s, m)) {
        Seeds seeds = box_closure(shape, {{0, {s, {}}}}, m);
        if (auto exps = forward.run(seeds)) return finish(*exps, "box-start");
        ex.decided_by = "exhausted";
        return result;
    }
    if (auto exps = forward.run({{0, {s, {}}}})) return finish(*exps, "forward");

    // First midpoint inside the box at layer p >= 1: the prefix is searched
    // backwards from each box configuration.
    Seeds entry;
    for (std::size_t p = 1; p <= shape.k(); ++p) {
        LinearScheme rev = reverse_scheme(prefix_scheme(scheme, shape, p));
        SlpsShape rev_shape = decompose(rev);
        for (Int x = 0; x <= m; ++x)
            for (Int y = 0; y <= m; ++y) {
                Vec a{x, y};
                Explanation scratch;
                Engine backward{rev_shape, s, m, norm, options, scratch};
                ++ex.reverse_searches;
                auto exps = backward.run({{0, {a, {}}}});
                ex.final_checks += scratch.final_checks;
                ex.pruned += scratch.pruned;
                if (!exps) continue;
                PathExponents prefix(exps->rbegin(), exps->rend());
                entry.push_back({p, {a, prefix}});
            }
    }
    if (entry.empty()) {
        ex.decided_by = "exhausted";
        return result;
    }
    if (auto exps = forward.run(box_closure(shape, entry, m))) return finish(*exps, "box-middle");
    ex.decided_by = "exhausted";
    return result;
}

Result decide_reach(const Instance& instance, const Options& options) {
    return decide_reach(instance.scheme, instance.source.values(), instance.target.values(), options);
}

}  // namespace vass::poly2
