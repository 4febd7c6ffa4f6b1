#include "vass/oracle.hpp"

#include "vass/lp.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>

namespace vass {

SearchBound auto_bound(const LinearScheme& scheme, const Vec& s, const Vec& t) {
    Int size = scheme.unary_size();
    SearchBound b;
    b.max_norm = 2 * (norm1(s) + norm1(t) + size * size);
    return b;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Reachable: return "reachable";
        case Verdict::UnreachableWithinBound: return "unreachable-within-bound";
        case Verdict::Exhausted: return "exhausted";
    }
    return "?";
}

void check_potential(const LinearScheme& scheme, const std::vector<Vec>& weights) {
    if (weights.size() != scheme.items.size() + 1)
        throw Error(Errc::PreconditionViolated, "potential needs one weight vector per layer");
    for (const Vec& w : weights)
        if (w.size() != scheme.dim) throw Error(Errc::DimensionMismatch, "potential weight has wrong dimension");
    for (std::size_t i = 0; i < scheme.items.size(); ++i) {
        const Vec& before = weights[i];
        const Vec& after = weights[i + 1];
        for (std::size_t j = 0; j < scheme.dim; ++j)
            if (after[j] < before[j])
                throw Error(Errc::PreconditionViolated, "potential weight decreases at item " + std::to_string(i));
        Int gain = 0;
        for (std::size_t j = 0; j < scheme.dim; ++j) gain += after[j] * scheme.items[i].update[j];
        if (gain < 0) throw Error(Errc::PreconditionViolated, "item " + std::to_string(i) + " lowers the potential");
    }
}

namespace {

Int weigh(const Vec& w, const Vec& c) {
    Int r = 0;
    for (std::size_t j = 0; j < c.size(); ++j) r += w[j] * c[j];
    return r;
}

struct Layer {
    std::vector<Vec> configs;
    std::vector<std::size_t> parent;
    std::vector<Int> count;
    std::unordered_map<Vec, std::size_t, VecHash> index;

    bool insert(Vec c, std::size_t from, Int times) {
        auto [it, fresh] = index.emplace(c, configs.size());
        if (!fresh) return false;
        configs.push_back(std::move(c));
        parent.push_back(from);
        count.push_back(std::move(times));
        return true;
    }
};

struct Explorer {
    const LinearScheme& scheme;
    const SearchBound& bound;
    std::optional<Int> limit;
    std::vector<Layer> layers;
    bool truncated = false;
    bool exhausted = false;
    std::size_t explored = 0;

    bool dead(std::size_t layer, const Vec& c) const {
        return limit && weigh(bound.potential[layer], c) > *limit;
    }

    void run(const Vec& s) {
        layers.assign(scheme.items.size() + 1, Layer{});
        if (!nonnegative(s) || dead(0, s)) return;
        if (norm1(s) > bound.max_norm) {
            truncated = true;
            return;
        }
        layers[0].insert(s, 0, 0);
        for (std::size_t i = 0; i < scheme.items.size() && !exhausted; ++i) {
            const Item& it = scheme.items[i];
            Layer& from = layers[i];
            Layer& to = layers[i + 1];
            for (std::size_t p = 0; p < from.configs.size() && !exhausted; ++p) {
                const Vec& c = from.configs[p];
                if (it.is_step()) {
                    bool ok = true;
                    for (auto z : it.zero)
                        if (sgn(c[z]) != 0) ok = false;
                    if (!ok) continue;
                    Vec next = add(c, it.update);
                    if (!nonnegative(next)) continue;
                    if (norm1(next) > bound.max_norm) {
                        truncated = true;
                        continue;
                    }
                    if (dead(i + 1, next)) continue;
                    if (to.insert(std::move(next), p, 1)) ++explored;
                } else {
                    Vec cur = c;
                    bool moving = norm1(it.update) != 0;
                    for (Int m = 0;; ++m) {
                        if (dead(i + 1, cur) || !to.insert(cur, p, m)) break;
                        if (++explored > bound.max_steps) {
                            exhausted = true;
                            break;
                        }
                        if (!moving) break;
                        cur = add(cur, it.update);
                        if (!nonnegative(cur)) break;
                        if (norm1(cur) > bound.max_norm) {
                            truncated = true;
                            break;
                        }
                    }
                }
                if (explored > bound.max_steps) exhausted = true;
            }
        }
    }

    Witness witness_for(std::size_t final_index) const {
        std::vector<Int> counts(scheme.items.size());
        std::size_t idx = final_index;
        for (std::size_t i = scheme.items.size(); i > 0; --i) {
            counts[i - 1] = layers[i].count[idx];
            idx = layers[i].parent[idx];
        }
        Witness w;
        PathExponents exps;
        for (std::size_t i = 0; i < scheme.items.size(); ++i)
            if (scheme.items[i].is_loop()) exps.push_back(counts[i]);
        w.walk = expand_walk(scheme, exps);
        if (scheme.is_slps()) w.exponents = exps;
        return w;
    }
};

// Machine-integer explorer; layers are bitmaps over the norm box when small
// enough, hash sets otherwise. Witnesses are rebuilt backwards from layer
// membership, so no parent pointers are stored.
class FastExplorer {
public:
    FastExplorer(const LinearScheme& scheme, const SearchBound& bound, const std::optional<Int>& limit)
        : scheme_(scheme), dim_(scheme.dim), norm_(bound.max_norm.get_si()), cap_(bound.max_steps) {
        if (limit) {
            has_limit_ = true;
            limit_ = limit->get_si();
            for (const Vec& w : bound.potential) {
                std::vector<std::int64_t> row(dim_);
                for (std::size_t c = 0; c < dim_; ++c) row[c] = w[c].get_si();
                weights_.push_back(std::move(row));
            }
        }
        updates_.reserve(scheme.items.size());
        for (const auto& it : scheme.items) {
            std::vector<std::int64_t> u(dim_);
            for (std::size_t c = 0; c < dim_; ++c) u[c] = it.update[c].get_si();
            updates_.push_back(std::move(u));
        }
        long double cells = 1;
        for (std::size_t c = 0; c < dim_; ++c) cells *= static_cast<long double>(norm_ + 1);
        long double bytes = cells / 8 * static_cast<long double>(scheme.items.size() + 1);
        dense_ = bytes <= static_cast<long double>(256u << 20);
        if (dense_) {
            stride_.assign(dim_, 1);
            for (std::size_t c = 1; c < dim_; ++c) stride_[c] = stride_[c - 1] * static_cast<std::uint64_t>(norm_ + 1);
            cells_ = static_cast<std::uint64_t>(cells);
        }
    }

    static bool fits(const LinearScheme& scheme, const Vec& s, const SearchBound& bound,
                     const std::optional<Int>& limit) {
        if (bound.max_norm > Int(1) << 60 || norm1(s) > Int(1) << 60) return false;
        if (limit) {
            if (abs(*limit) > Int(1) << 62) return false;
            for (const Vec& w : bound.potential)
                for (const Int& x : w)
                    if (abs(x) > Int(1) << 31) return false;
        }
        return sgn(bound.max_norm) >= 0 && scheme.max_update() < Int(1) << 30;
    }

    void run(const Vec& s) {
        layers_.clear();
        for (std::size_t i = 0; i <= scheme_.items.size(); ++i) layers_.emplace_back(make_layer());
        frontier_.clear();
        if (!nonnegative(s)) return;
        if (norm1(s) > norm_) {
            truncated = true;
            return;
        }
        std::vector<std::int64_t> start(dim_);
        for (std::size_t c = 0; c < dim_; ++c) start[c] = s[c].get_si();
        if (dead(0, start.data())) return;
        insert(layers_[0], start.data());
        frontier_ = start;
        std::vector<std::int64_t> cur(dim_), next_frontier;
        for (std::size_t i = 0; i < scheme_.items.size() && !exhausted; ++i) {
            const Item& it = scheme_.items[i];
            const auto& u = updates_[i];
            bool moving = std::any_of(u.begin(), u.end(), [](std::int64_t x) { return x != 0; });
            next_frontier.clear();
            Layer& to = layers_[i + 1];
            for (std::size_t p = 0; p < frontier_.size(); p += dim_) {
                const std::int64_t* c = frontier_.data() + p;
                if (it.is_step()) {
                    bool ok = true;
                    for (auto z : it.zero)
                        if (c[z] != 0) ok = false;
                    if (!ok) continue;
                    if (!advance(c, u.data(), cur.data())) continue;
                    if (dead(i + 1, cur.data())) continue;
                    if (insert(to, cur.data())) push(next_frontier, cur.data());
                } else {
                    std::copy(c, c + dim_, cur.begin());
                    for (;;) {
                        if (dead(i + 1, cur.data()) || !insert(to, cur.data())) break;
                        push(next_frontier, cur.data());
                        if (++explored > cap_) {
                            exhausted = true;
                            break;
                        }
                        if (!moving || !advance(cur.data(), u.data(), cur.data())) break;
                    }
                }
                if (exhausted) break;
            }
            frontier_.swap(next_frontier);
        }
    }

    bool contains_final(const Vec& t) const {
        if (t.size() != dim_ || !nonnegative(t) || norm1(t) > norm_) return false;
        std::vector<std::int64_t> x(dim_);
        for (std::size_t c = 0; c < dim_; ++c) x[c] = t[c].get_si();
        return contains(layers_.back(), x.data());
    }

    PathExponents exponents_to(const Vec& t) const {
        std::vector<std::int64_t> c(dim_), p(dim_);
        for (std::size_t i = 0; i < dim_; ++i) c[i] = t[i].get_si();
        std::vector<Int> counts(scheme_.items.size());
        for (std::size_t i = scheme_.items.size(); i > 0; --i) {
            const Item& it = scheme_.items[i - 1];
            const auto& u = updates_[i - 1];
            std::int64_t m = 0;
            if (it.is_step()) {
                for (std::size_t j = 0; j < dim_; ++j) p[j] = c[j] - u[j];
                m = 1;
            } else {
                for (;; ++m) {
                    bool inside = true;
                    std::int64_t total = 0;
                    for (std::size_t j = 0; j < dim_; ++j) {
                        p[j] = c[j] - m * u[j];
                        if (p[j] < 0) inside = false;
                        total += p[j];
                    }
                    if (!inside || total > norm_)
                        throw Error(Errc::PreconditionViolated, "witness reconstruction failed");
                    if (contains(layers_[i - 1], p.data())) break;
                }
            }
            counts[i - 1] = static_cast<long>(m);
            c = p;
        }
        PathExponents exps;
        for (std::size_t i = 0; i < scheme_.items.size(); ++i)
            if (scheme_.items[i].is_loop()) exps.push_back(counts[i]);
        return exps;
    }

    std::vector<Vec> final_configs() const {
        std::vector<Vec> out;
        for (std::size_t p = 0; p < frontier_.size(); p += dim_) {
            Vec c(dim_);
            for (std::size_t j = 0; j < dim_; ++j) c[j] = static_cast<long>(frontier_[p + j]);
            out.push_back(std::move(c));
        }
        return out;
    }

    bool truncated = false;
    bool exhausted = false;
    std::size_t explored = 0;

private:
    struct KeyHash {
        std::size_t operator()(const std::vector<std::int64_t>& k) const noexcept {
            std::size_t h = k.size();
            for (auto x : k) h ^= static_cast<std::size_t>(x) * 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            return h;
        }
    };

    struct Layer {
        std::vector<std::uint64_t> bits;
        std::unordered_set<std::vector<std::int64_t>, KeyHash> keys;
    };

    Layer make_layer() const {
        Layer l;
        if (dense_) l.bits.assign(cells_ / 64 + 1, 0);
        return l;
    }

    std::uint64_t cell(const std::int64_t* c) const {
        std::uint64_t idx = 0;
        for (std::size_t j = 0; j < dim_; ++j) idx += static_cast<std::uint64_t>(c[j]) * stride_[j];
        return idx;
    }

    bool insert(Layer& l, const std::int64_t* c) {
        if (dense_) {
            std::uint64_t idx = cell(c);
            std::uint64_t mask = 1ULL << (idx & 63);
            if (l.bits[idx >> 6] & mask) return false;
            l.bits[idx >> 6] |= mask;
            return true;
        }
        return l.keys.emplace(c, c + dim_).second;
    }

    bool contains(const Layer& l, const std::int64_t* c) const {
        if (dense_) {
            std::uint64_t idx = cell(c);
            return (l.bits[idx >> 6] >> (idx & 63)) & 1;
        }
        return l.keys.count(std::vector<std::int64_t>(c, c + dim_)) > 0;
    }

    bool dead(std::size_t layer, const std::int64_t* c) const {
        if (!has_limit_) return false;
        __int128 total = 0;
        const auto& w = weights_[layer];
        for (std::size_t j = 0; j < dim_; ++j) total += static_cast<__int128>(w[j]) * c[j];
        return total > limit_;
    }

    void push(std::vector<std::int64_t>& list, const std::int64_t* c) const { list.insert(list.end(), c, c + dim_); }

    // out = c + u when nonnegative and inside the norm bound
    bool advance(const std::int64_t* c, const std::int64_t* u, std::int64_t* out) {
        std::int64_t total = 0;
        bool ok = true;
        for (std::size_t j = 0; j < dim_; ++j) {
            std::int64_t x = c[j] + u[j];
            if (x < 0) ok = false;
            out[j] = x;
            total += x;
        }
        if (!ok) return false;
        if (total > norm_) {
            truncated = true;
            return false;
        }
        return true;
    }

    const LinearScheme& scheme_;
    std::size_t dim_;
    std::int64_t norm_;
    std::size_t cap_;
    std::vector<std::vector<std::int64_t>> updates_;
    bool dense_ = false;
    std::vector<std::uint64_t> stride_;
    std::uint64_t cells_ = 0;
    std::vector<Layer> layers_;
    std::vector<std::int64_t> frontier_;
    bool has_limit_ = false;
    std::int64_t limit_ = 0;
    std::vector<std::vector<std::int64_t>> weights_;
};

}  // namespace

BfsResult bfs_reach(const LinearScheme& scheme, const Vec& s, const Vec& t, const SearchBound& bound) {
    scheme.validate();
    if (s.size() != scheme.dim || t.size() != scheme.dim)
        throw Error(Errc::DimensionMismatch, "endpoint dimension differs from scheme dimension");
    std::optional<Int> limit;
    if (!bound.potential.empty()) {
        check_potential(scheme, bound.potential);
        limit = weigh(bound.potential.back(), t);
    }
    BfsResult result;
    if (FastExplorer::fits(scheme, s, bound, limit)) {
        FastExplorer ex(scheme, bound, limit);
        ex.run(s);
        result.truncated = ex.truncated;
        result.explored = ex.explored;
        if (ex.contains_final(t)) {
            result.verdict = Verdict::Reachable;
            PathExponents exps = ex.exponents_to(t);
            result.witness.walk = expand_walk(scheme, exps);
            if (scheme.is_slps()) result.witness.exponents = exps;
        } else {
            result.verdict = ex.exhausted ? Verdict::Exhausted : Verdict::UnreachableWithinBound;
        }
        return result;
    }
    Explorer ex{scheme, bound, limit, {}};
    ex.run(s);
    result.truncated = ex.truncated;
    result.explored = ex.explored;
    const Layer& last = ex.layers.back();
    auto hit = last.index.find(t);
    if (hit != last.index.end()) {
        result.verdict = Verdict::Reachable;
        result.witness = ex.witness_for(hit->second);
    } else {
        result.verdict = ex.exhausted ? Verdict::Exhausted : Verdict::UnreachableWithinBound;
    }
    return result;
}

BfsResult bfs_reach(const Instance& instance, const SearchBound& bound) {
    return bfs_reach(instance.scheme, instance.source.values(), instance.target.values(), bound);
}

BfsResult bfs_reach(const Instance& instance) {
    return bfs_reach(instance,
                     auto_bound(instance.scheme, instance.source.values(), instance.target.values()));
}

FinalLayer reachable_finals(const LinearScheme& scheme, const Vec& s, const SearchBound& bound) {
    scheme.validate();
    if (!bound.potential.empty())
        throw Error(Errc::PreconditionViolated, "potential pruning needs a target configuration");
    if (FastExplorer::fits(scheme, s, bound, std::nullopt)) {
        FastExplorer ex(scheme, bound, std::nullopt);
        ex.run(s);
        return FinalLayer{ex.final_configs(), ex.truncated, ex.exhausted};
    }
    Explorer ex{scheme, bound, std::nullopt, {}};
    ex.run(s);
    return FinalLayer{ex.layers.back().configs, ex.truncated, ex.exhausted};
}

std::optional<PathExponents> solve_segment(const SlpsShape& shape, const Vec& start, const Vec& target,
                                           const SegmentQuery& q, std::size_t* nodes) {
    const std::size_t d = shape.dim;
    const std::size_t nloops = q.last - q.first;
    if (q.last > shape.k() || q.first > q.last || q.ranges.size() != nloops)
        throw Error(Errc::DimensionMismatch, "segment query does not match scheme");
    if (!leq(shape.alpha[q.first].guard, start)) return std::nullopt;
    if (!q.include_last_block && !nonnegative(target)) return std::nullopt;

    // offsets[q'] = constant part of the midpoint before block first + q'
    std::vector<Vec> offsets{start};
    for (std::size_t l = 0; l < nloops; ++l) {
        Vec next = add(offsets.back(), shape.alpha[q.first + l].effect);
        next = add(next, scale(shape.beta[q.first + l], q.ranges[l].lo));
        offsets.push_back(std::move(next));
    }
    Vec rhs = sub(target, offsets.back());
    if (q.include_last_block) rhs = sub(rhs, shape.alpha[q.last].effect);

    std::vector<Vec> matrix(d, Vec(nloops));
    for (std::size_t c = 0; c < d; ++c)
        for (std::size_t l = 0; l < nloops; ++l) matrix[c][l] = shape.beta[q.first + l][c];
    lp::Lattice lat = lp::solve_integer_equalities(matrix, rhs, nloops);
    if (!lat.solvable) return std::nullopt;

    const std::size_t nz = lat.kernel.size();
    std::vector<lp::Row> rows;
    for (std::size_t l = 0; l < nloops; ++l) {
        lp::Row low{Vec(nz), -lat.base[l]};
        for (std::size_t z = 0; z < nz; ++z) low.coeffs[z] = lat.kernel[z][l];
        rows.push_back(low);
        if (q.ranges[l].hi) {
            lp::Row high{Vec(nz), lat.base[l] - (*q.ranges[l].hi - q.ranges[l].lo)};
            for (std::size_t z = 0; z < nz; ++z) high.coeffs[z] = -lat.kernel[z][l];
            rows.push_back(high);
        }
    }
    // midpoint before block first + m, for m = 1..nloops
    Vec acc_const = zeros(d);
    std::vector<Vec> acc_coef(nz, zeros(d));
    for (std::size_t l = 0; l < nloops; ++l) {
        const Vec& beta = shape.beta[q.first + l];
        for (std::size_t c = 0; c < d; ++c) {
            acc_const[c] += beta[c] * lat.base[l];
            for (std::size_t z = 0; z < nz; ++z) acc_coef[z][c] += beta[c] * lat.kernel[z][l];
        }
        std::size_t block = q.first + l + 1;
        bool last = block == q.last;
        if (last && !q.include_last_block) break;
        const Vec& guard = shape.alpha[block].guard;
        for (std::size_t c = 0; c < d; ++c) {
            lp::Row r{Vec(nz), guard[c] - offsets[l + 1][c] - acc_const[c]};
            bool any = false;
            for (std::size_t z = 0; z < nz; ++z) {
                r.coeffs[z] = acc_coef[z][c];
                if (sgn(r.coeffs[z]) != 0) any = true;
            }
            if (!any) {
                if (sgn(r.rhs) > 0) return std::nullopt;
                continue;
            }
            rows.push_back(std::move(r));
        }
    }
    if (nloops == 0 && q.include_last_block && !leq(shape.alpha[q.last].guard, start)) return std::nullopt;

    lp::IntResult ir = lp::integer_point(rows, nz);
    if (nodes) *nodes += ir.nodes;
    if (ir.status == lp::IntStatus::BudgetExceeded)
        throw Error(Errc::CeilingExceeded, "branch and bound node budget exhausted");
    if (ir.status == lp::IntStatus::Infeasible) return std::nullopt;
    PathExponents exps(nloops);
    for (std::size_t l = 0; l < nloops; ++l) {
        exps[l] = q.ranges[l].lo + lat.base[l];
        for (std::size_t z = 0; z < nz; ++z) exps[l] += lat.kernel[z][l] * ir.point[z];
    }
    return exps;
}

IlpResult ilp_feasible(const LinearScheme& scheme, const Vec& s, const Vec& t) {
    scheme.validate();
    SlpsShape shape = decompose(scheme);
    if (s.size() != scheme.dim || t.size() != scheme.dim)
        throw Error(Errc::DimensionMismatch, "endpoint dimension differs from scheme dimension");
    SegmentQuery q{0, shape.k(), true, std::vector<LoopRange>(shape.k())};
    auto exps = solve_segment(shape, s, t, q);
    if (!exps) return {};
    return IlpResult{true, *exps};
}

IlpResult ilp_feasible(const Instance& instance) {
    return ilp_feasible(instance.scheme, instance.source.values(), instance.target.values());
}

IlpResult ilp_const_vars(const LinearScheme& scheme, const Vec& s, const Vec& t,
                         const std::vector<std::size_t>& free_loops, const PathExponents& fixed) {
    scheme.validate();
    SlpsShape shape = decompose(scheme);
    if (free_loops.size() > 3) throw Error(Errc::PreconditionViolated, "at most three free exponents");
    if (fixed.size() != shape.k()) throw Error(Errc::DimensionMismatch, "fixed exponents length differs from loop count");
    SegmentQuery q{0, shape.k(), true, std::vector<LoopRange>(shape.k())};
    std::vector<bool> is_free(shape.k(), false);
    for (auto f : free_loops) {
        if (f >= shape.k()) throw Error(Errc::DimensionMismatch, "free loop index out of range");
        is_free[f] = true;
    }
    for (std::size_t l = 0; l < shape.k(); ++l)
        if (!is_free[l]) {
            if (sgn(fixed[l]) < 0) throw Error(Errc::NegativeExponent, "fixed exponent is negative");
            q.ranges[l] = LoopRange{fixed[l], fixed[l]};
        }
    auto exps = solve_segment(shape, s, t, q);
    if (!exps) return {};
    return IlpResult{true, *exps};
}

bool verify_witness(const Instance& instance, const Witness& witness) {
    const LinearScheme& scheme = instance.scheme;
    if (witness.exponents) {
        if (witness.exponents->size() != scheme.num_loops())
            throw Error(Errc::MalformedWitness, "exponent count differs from loop count");
        for (const auto& n : *witness.exponents)
            if (sgn(n) < 0) throw Error(Errc::MalformedWitness, "negative exponent");
        if (scheme.is_slps())
            return check_run(scheme, instance.source.values(), *witness.exponents, instance.target.values());
        Walk walk = expand_walk(scheme, *witness.exponents);
        return verify_witness(instance, Witness{std::nullopt, walk});
    }
    for (auto i : witness.walk)
        if (i >= scheme.items.size()) throw Error(Errc::MalformedWitness, "walk item out of range");
    try {
        return trace(scheme, instance.source.values(), witness.walk).back() == instance.target.values();
    } catch (const Error& e) {
        if (e.code() == Errc::ZeroTestFailed || e.code() == Errc::NegativeCounter || e.code() == Errc::IllegalWalk)
            return false;
        throw;
    }
}

}  // namespace vass
