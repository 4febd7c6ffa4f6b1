// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include "testutil.hpp"
#include "vass/gadgets.hpp"
#include "vass/oracle.hpp"
#include "vass/poly2.hpp"
#include "vass/transforms.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace vass;
using vass::testing::v;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Records the first few failure descriptions and counts the rest.
class Failures {
public:
    void add(const std::string& what) {
        if (count_++ < 5) first_ += (first_.empty() ? "" : "; ") + what;
    }
    std::size_t count() const { return count_; }
    std::string summary() const {
        if (count_ == 0) return "";
        return std::to_string(count_) + " failures: " + first_ + (count_ > 5 ? "; ..." : "");
    }

private:
    std::size_t count_ = 0;
    std::string first_;
};

Outcome finish(const Failures& f, const std::string& ok_detail) {
    if (f.count() == 0) return {true, ok_detail};
    return {false, f.summary()};
}

Outcome gadget_contracts() {
    Failures f;
    std::size_t cases = 0;
    for (GadgetFlavor fl : {GadgetFlavor::Unary2, GadgetFlavor::Unitary5, GadgetFlavor::Ultraflat3}) {
        for (int p = 1; p <= 7; ++p) {
            Gadget g = nondiv_gadget(fl, p);
            for (int val = 0; val <= 30; ++val) {
                ++cases;
                SearchBound bound;
                bound.max_norm = g.run_bound(val);
                FinalLayer finals = reachable_finals(g.scheme, g.entry(val), bound);
                std::string tag = std::string(flavor_name(fl)) + " p=" + std::to_string(p) + " v=" + std::to_string(val);
                if (finals.exhausted) {
                    f.add(tag + " exhausted");
                    continue;
                }
                bool accepts = !finals.configs.empty();
                if (accepts != (val % p != 0)) f.add(tag + " verdict");
                if (accepts && (finals.configs.size() != 1 || finals.configs[0] != g.entry(val)))
                    f.add(tag + " counters not restored");
            }
        }
    }
    return finish(f, std::to_string(cases) + " cases");
}

Outcome update_gadget() {
    Failures f;
    for (int u = -5; u <= 5; ++u) {
        Gadget g = ultraflat_update_gadget(u);
        for (int val = 0; val <= 10; ++val) {
            SearchBound bound;
            bound.max_norm = g.run_bound(val);
            FinalLayer finals = reachable_finals(g.scheme, g.entry(val), bound);
            std::string tag = "u=" + std::to_string(u) + " v=" + std::to_string(val);
            bool accepts = !finals.configs.empty();
            if (accepts != (val + u >= 0)) f.add(tag + " verdict");
            if (accepts && (finals.configs.size() != 1 || finals.configs[0][0] != val + u))
                f.add(tag + " final counter");
        }
    }
    return finish(f, "121 cases");
}

struct SatRun {
    const CnfFormula* formula;
    SatTarget target;
    ControlledInstance controlled;
    BfsResult result;
};

// Accepting runs of criterion 3, reused by criterion 4.
std::vector<SatRun> g_sat_runs;

Outcome sat_reductions() {
    Failures f;
    static const std::vector<CnfFormula> corpus = canonical_formulas(3, 4);
    std::size_t satisfiable = 0;
    for (const CnfFormula& phi : corpus) {
        if (phi.satisfiable()) ++satisfiable;
        for (SatTarget target : {SatTarget::Unary3Slps, SatTarget::Ultraflat4}) {
            ControlledInstance ci = reduce_sat_traced(phi, target);
            Instance plain = target == SatTarget::Unary3Slps ? reduce_sat_to_unary_3slps(phi)
                                                             : reduce_sat_to_ultraflat_4vass(phi);
            std::string tag = std::string(target == SatTarget::Unary3Slps ? "3slps" : "ultraflat4") + " " +
                              std::to_string(&phi - corpus.data());
            if (!(ci.instance == plain)) f.add(tag + " traced reduction differs");
            SearchBound bound;
            bound.max_norm = controlled_norm_bound(phi, target);
            bound.potential = controlling_potential(ci);
            BfsResult r = bfs_reach(ci.instance, bound);
            if (r.verdict == Verdict::Exhausted) {
                f.add(tag + " exhausted");
                continue;
            }
            bool reach = r.verdict == Verdict::Reachable;
            if (reach != phi.satisfiable()) f.add(tag + " verdict");
            if (reach && !verify_witness(ci.instance, r.witness)) f.add(tag + " witness");
            if (reach) g_sat_runs.push_back({&phi, target, std::move(ci), std::move(r)});
        }
    }
    return finish(f, std::to_string(corpus.size()) + " formulas, " + std::to_string(satisfiable) +
                         " satisfiable, 2 targets");
}

Outcome controlling_invariant() {
    Failures f;
    std::size_t configs_checked = 0;
    for (const SatRun& run : g_sat_runs) {
        const Instance& inst = run.controlled.instance;
        const Walk& walk = run.result.witness.walk;
        std::vector<Vec> configs = trace(inst.scheme, inst.source.values(), walk);
        std::size_t extra = inst.scheme.dim - 1;
        auto weighted = [&](const Vec& weights, const Vec& c) {
            Int sum = 0;
            for (std::size_t j = 0; j < extra; ++j) sum += weights[j] * c[j];
            return sum;
        };
        bool ok = configs[0][extra] == weighted(run.controlled.initial_copy, configs[0]);
        for (std::size_t k = 0; k < walk.size(); ++k)
            ok = ok && configs[k + 1][extra] == weighted(run.controlled.copy_after[walk[k]], configs[k + 1]);
        ok = ok && configs.back()[extra] == 0;
        configs_checked += configs.size();
        if (!ok) f.add("formula run broke the invariant");
    }
    if (g_sat_runs.empty()) f.add("no accepting runs available");
    return finish(f, std::to_string(g_sat_runs.size()) + " runs, " + std::to_string(configs_checked) +
                         " configurations");
}

Outcome worked_example() {
    Failures f;
    LinearScheme s = vass::testing::worked_example();
    SearchBound bound;
    bound.max_norm = 100;
    BfsResult r = bfs_reach(s, v({0, 0}), v({0, 2}), bound);
    if (r.verdict != Verdict::Reachable || !r.witness.exponents || *r.witness.exponents != PathExponents{Int(4)})
        f.add("(0,2) not reached with exponent 4");
    for (long n = 0; n <= 100; ++n)
        if (n != 4 && check_run(s, v({0, 0}), {Int(n)}, v({0, 2}))) f.add("exponent " + std::to_string(n) + " also works");
    for (long y = 0; y <= 100; ++y) {
        if (y == 2) continue;
        if (bfs_reach(s, v({0, 0}), v({0, y}), bound).verdict != Verdict::UnreachableWithinBound)
            f.add("(0," + std::to_string(y) + ") reachable");
    }
    return finish(f, "unique exponent 4, 100 other targets unreachable");
}

Outcome amplifier_contract() {
    Failures f;
    Amplifier g = g1_amplifier();
    for (auto [b, c] : std::vector<std::pair<long, long>>{{3, 2}, {4, 1}}) {
        SearchBound bound;
        bound.max_norm = 60;
        FinalLayer finals = reachable_finals(g.scheme, v({b, c, b * c, 0, 0, 0}), bound);
        std::string tag = "(" + std::to_string(b) + "," + std::to_string(c) + ")";
        if (finals.exhausted || finals.truncated) f.add(tag + " enumeration incomplete");
        std::set<Vec> outputs;
        for (const Vec& cfg : finals.configs)
            if (cfg[0] == 0 && cfg[1] == 0 && cfg[2] == 0) outputs.insert(Vec{cfg[3], cfg[4], cfg[5]});
        if (outputs != std::set<Vec>{v({b, 2 * c, 2 * b * c})}) f.add(tag + " outputs differ");
    }
    return finish(f, "(3,2) and (4,1) give exactly (B,2C,2BC)");
}

struct Generated {
    LinearScheme scheme;
    Vec source, target;
};

Generated random_instance(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> loops(0, 6);
    std::uniform_int_distribution<long> delta(1, 3), endpoint(0, 20);
    std::size_t k = loops(rng);
    long d = delta(rng);
    Generated g{vass::testing::random_slps(rng, 2, k, d), {}, {}};
    g.source = v({endpoint(rng), endpoint(rng)});
    g.target = v({endpoint(rng), endpoint(rng)});
    return g;
}

Outcome triple_agreement() {
    Failures f;
    std::mt19937_64 rng(20240601);
    std::size_t reachable = 0;
    for (int i = 0; i < 1000; ++i) {
        Generated g = random_instance(rng);
        BfsResult bfs = bfs_reach(g.scheme, g.source, g.target, auto_bound(g.scheme, g.source, g.target));
        std::string tag = "instance " + std::to_string(i);
        if (bfs.verdict == Verdict::Exhausted) {
            f.add(tag + " bfs exhausted");
            continue;
        }
        bool by_bfs = bfs.verdict == Verdict::Reachable;
        bool by_ilp = ilp_feasible(g.scheme, g.source, g.target).reachable;
        poly2::Result dp = poly2::decide_reach(g.scheme, g.source, g.target);
        if (by_bfs != by_ilp || by_bfs != dp.reachable) f.add(tag + " disagreement");
        if (dp.reachable && (!dp.exponents || !check_run(g.scheme, g.source, *dp.exponents, g.target)))
            f.add(tag + " bad witness");
        if (by_bfs) ++reachable;
    }
    return finish(f, "1000 instances, " + std::to_string(reachable) + " reachable, 0 disagreements");
}

Outcome binary_scaling() {
    Failures f;
    LinearScheme zz = vass::testing::zigzag(3);
    std::vector<double> log_w, log_t;
    std::ostringstream times;
    for (int w : {10, 20, 40, 60}) {
        Int x = 1;
        x <<= w;
        Vec s{x, 0};
        PathExponents exps;
        Vec c = s;
        for (int r = 0; r < 3; ++r) {
            Int half = c[0] / 2;
            exps.push_back(half);
            exps.push_back(half);
            c = Vec{c[0] + 3 * half, Int(0)};
        }
        Vec t = add(s, effect(zz, exps));
        if (t != c) f.add("w=" + std::to_string(w) + " simulation mismatch");
        // Best of three runs to damp scheduler noise.
        double best = 1e30;
        bool reach = true;
        for (int rep = 0; rep < 3; ++rep) {
            auto start = Clock::now();
            reach = reach && poly2::decide_reach(zz, s, t).reachable;
            best = std::min(best, seconds_since(start));
        }
        if (!reach) f.add("w=" + std::to_string(w) + " not reachable");
        if (w <= 40 && !ilp_feasible(zz, s, t).reachable) f.add("w=" + std::to_string(w) + " ilp disagrees");
        log_w.push_back(std::log(static_cast<double>(w)));
        log_t.push_back(std::log(std::max(best, 1e-4)));
        char buf[64];
        std::snprintf(buf, sizeof buf, "%sw=%d %.3fs", times.str().empty() ? "" : " ", w, best);
        times << buf;
    }
    // Least-squares fit of log t = a + b log w.
    double n = static_cast<double>(log_w.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < log_w.size(); ++i) {
        sx += log_w[i];
        sy += log_t[i];
        sxx += log_w[i] * log_w[i];
        sxy += log_w[i] * log_t[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    double worst = 0;
    for (std::size_t i = 0; i < log_w.size(); ++i)
        worst = std::max(worst, std::abs(log_t[i] - (intercept + slope * log_w[i])));
    char fit[96];
    std::snprintf(fit, sizeof fit, "; degree %.2f, worst residual factor %.2f", slope, std::exp(worst));
    if (slope > 5) f.add("fitted degree above 5");
    if (std::exp(worst) > 3) f.add("residual above factor 3");
    return finish(f, times.str() + fit);
}

Outcome factorial_family() {
    Failures f;
    for (std::size_t n : {2, 3, 4}) {
        LinearScheme s = vass::testing::factorial_scheme(n);
        Int fact = 1;
        for (std::size_t i = 2; i <= n; ++i) fact *= static_cast<unsigned long>(i);
        if (!s.is_ultraflat()) f.add("n=" + std::to_string(n) + " not ultraflat");
        IlpResult r = ilp_feasible(s, v({1, 0}), Vec{fact, Int(0)});
        if (!r.reachable || !check_run(s, v({1, 0}), r.exponents, Vec{fact, Int(0)}))
            f.add("n=" + std::to_string(n) + " not reached");
    }
    return finish(f, "(1,0) reaches (2,0), (6,0), (24,0)");
}

Int big_value(std::mt19937_64& rng, int bits) {
    Int x = 1;
    for (int b = 0; b < bits; ++b) x = 2 * x + static_cast<unsigned long>(rng() & 1);
    return x;
}

// Alternating mixed loops with a large first coordinate, so opposite pairs
// produce many slim configurations and dominance has something to remove.
Outcome dominance_soundness() {
    Failures f;
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<long> small(0, 5), tiny(0, 20), three(0, 2);
    std::size_t pruned = 0, reachable = 0;
    for (int i = 0; i < 200; ++i) {
        LinearScheme s(2);
        long d = 2 + i % 2;
        std::uniform_int_distribution<long> entry(-d, d), mag(1, d);
        for (int l = 0; l < 5; ++l) {
            if (three(rng) == 0) s.add_step(Vec{Int(entry(rng)), Int(entry(rng))});
            Int a = mag(rng), b = mag(rng);
            s.add_loop(l % 2 == 0 ? Vec{-a, b} : Vec{a, -b});
        }
        Vec src{big_value(rng, 30), Int(small(rng))};
        Vec tgt = three(rng) == 0 ? Vec{Int(tiny(rng)), Int(tiny(rng))} : Vec{big_value(rng, 30), Int(small(rng))};
        poly2::Options off;
        off.dominance = false;
        poly2::Result with = poly2::decide_reach(s, src, tgt);
        poly2::Result without = poly2::decide_reach(s, src, tgt, off);
        pruned += with.explanation.pruned;
        if (with.reachable != without.reachable) f.add("instance " + std::to_string(i) + " flipped");
        if (with.reachable) ++reachable;
    }
    if (pruned == 0) f.add("pruning never fired");
    return finish(f, "200 instances, " + std::to_string(reachable) + " reachable, " + std::to_string(pruned) +
                         " tags pruned, 0 flips");
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria{
        {1, "non-divisibility gadgets", gadget_contracts},
        {2, "ultraflat update gadget", update_gadget},
        {3, "SAT reductions", sat_reductions},
        {4, "controlling-counter invariant", controlling_invariant},
        {5, "worked example", worked_example},
        {6, "amplifier contract", amplifier_contract},
        {7, "solver agreement", triple_agreement},
        {8, "binary-endpoint scaling", binary_scaling},
        {9, "factorial ultraflat family", factorial_family},
        {10, "dominance soundness", dominance_soundness},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        auto start = Clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(),
                    seconds_since(start));
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
