#include "testutil.hpp"
#include "vass/gadgets.hpp"
#include "vass/oracle.hpp"
#include "vass/transforms.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace vass;
using vass::testing::v;

namespace {

CnfFormula formula(std::size_t n, std::vector<Clause> clauses) {
    CnfFormula f;
    f.num_vars = n;
    f.clauses = std::move(clauses);
    return f;
}

Literal pos(std::size_t var) { return {var, true}; }
Literal neg(std::size_t var) { return {var, false}; }

FinalLayer gadget_finals(const Gadget& g, const Int& v) {
    SearchBound bound;
    bound.max_norm = g.run_bound(v);
    return reachable_finals(g.scheme, g.entry(v), bound);
}

bool reaches_exit(const Gadget& g, const Int& v) {
    FinalLayer f = gadget_finals(g, v);
    for (const Vec& c : f.configs)
        if (c == g.exit(v)) return true;
    return false;
}

}  // namespace

TEST(Primes, FirstFew) {
    EXPECT_EQ(first_n_primes(1), (std::vector<Int>{2}));
    EXPECT_EQ(first_n_primes(3), (std::vector<Int>{2, 3, 5}));
    EXPECT_EQ(first_n_primes(5), (std::vector<Int>{2, 3, 5, 7, 11}));
}

TEST(ClauseModulus, Examples) {
    std::vector<Int> primes{2, 3, 5};
    ClauseModulus mixed = clause_modulus({pos(0), neg(1), pos(2)}, primes);
    EXPECT_EQ(mixed.modulus, 30);
    EXPECT_EQ(mixed.residue, 10);
    EXPECT_EQ(clause_modulus({pos(0), pos(1), pos(2)}, primes).residue, 0);
    EXPECT_EQ(clause_modulus({neg(0), neg(1), neg(2)}, primes).residue, 1);
}

TEST(ClauseModulus, ResidueFalsifiesEveryLiteral) {
    std::mt19937_64 rng(7);
    std::vector<Int> primes = first_n_primes(6);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::size_t> vars{0, 1, 2, 3, 4, 5};
        std::shuffle(vars.begin(), vars.end(), rng);
        Clause c;
        for (int i = 0; i < 3; ++i) c.push_back({vars[i], (rng() & 1) != 0});
        ClauseModulus cm = clause_modulus(c, primes);
        ASSERT_GE(cm.residue, 0);
        ASSERT_LT(cm.residue, cm.modulus);
        for (const Literal& lit : c) EXPECT_EQ(Int(cm.residue % primes[lit.var]), lit.positive ? 0 : 1);
    }
}

TEST(ClauseModulus, EncodedAssignmentSatisfiesIffOffResidue) {
    CnfFormula f = formula(3, {{pos(0), neg(1), pos(2)}, {neg(0), neg(1), neg(2)}});
    ModulusPlan plan = modulus_plan(f);
    for (unsigned mask = 0; mask < 8; ++mask) {
        std::vector<bool> a{(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0};
        Int value = encode_assignment(a, plan.primes);
        bool off_all = true;
        for (const ClauseModulus& cm : plan.clauses)
            if (Int(value % cm.modulus) == cm.residue) off_all = false;
        EXPECT_EQ(off_all, f.eval(a));
    }
}

TEST(Formula, Validation) {
    EXPECT_THROW(formula(2, {{pos(0), neg(0)}}).validate(), Error);
    EXPECT_THROW(formula(1, {{pos(3)}}).validate(), Error);
    EXPECT_THROW(formula(1, {{}}).validate(), Error);
    EXPECT_NO_THROW(formula(3, {{pos(0), neg(1), pos(2)}}).validate());
    EXPECT_TRUE(formula(1, {{pos(0)}}).satisfiable());
    EXPECT_FALSE(formula(1, {{pos(0)}, {neg(0)}}).satisfiable());
}

// Orbit counts computed independently by brute force over all clause sets.
TEST(Formula, CanonicalCorpusSize) {
    std::vector<CnfFormula> corpus = canonical_formulas(3, 4);
    EXPECT_EQ(corpus.size(), 539u);
    EXPECT_EQ(canonical_formulas(1, 4).size(), 3u);
    EXPECT_EQ(canonical_formulas(2, 4).size(), 35u);
    std::size_t unsat = 0;
    for (const CnfFormula& f : corpus) {
        EXPECT_NO_THROW(f.validate());
        if (!f.satisfiable()) ++unsat;
    }
    EXPECT_EQ(unsat, 79u);
}

TEST(Skeleton, SingleVariable) {
    Skeleton sk = sat_skeleton(formula(1, {{pos(0)}}));
    using K = SkeletonOp::Kind;
    std::vector<SkeletonOp> expected{{K::Guess, 0}, {K::Add, 2}, {K::NonDiv, 2}, {K::Sub, 2}, {K::Drain, 0}};
    EXPECT_EQ(sk.ops, expected);
}

TEST(Skeleton, PlaceholderCount) {
    EXPECT_EQ(sat_skeleton(formula(2, {})).num_nondiv(), 1u);
    CnfFormula f = formula(3, {{pos(0), neg(1), pos(2)}, {neg(0)}});
    // (3 - 2) + (5 - 2) variable checks plus one per clause
    EXPECT_EQ(sat_skeleton(f).num_nondiv(), 6u);
}

TEST(Skeleton, UnitaryAfterUnrolling) {
    CnfFormula f = formula(3, {{pos(0), neg(1), pos(2)}});
    Instance prog = sat_program(f, SatTarget::Unitary);
    EXPECT_TRUE(prog.scheme.is_unitary());
    EXPECT_FALSE(sat_program(f, SatTarget::Unary3Slps).scheme.is_unitary());
}

TEST(NonDiv, UnaryExamples) {
    Gadget g = nondiv_gadget(GadgetFlavor::Unary2, 3);
    FinalLayer f = gadget_finals(g, 4);
    ASSERT_EQ(f.configs.size(), 1u);
    EXPECT_EQ(f.configs[0], v({4, 0}));
    EXPECT_TRUE(gadget_finals(g, 6).configs.empty());
}

TEST(NonDiv, ZeroIsDivisible) {
    for (GadgetFlavor fl : {GadgetFlavor::Unary2, GadgetFlavor::Unitary5, GadgetFlavor::Ultraflat3})
        for (int p = 1; p <= 5; ++p) EXPECT_FALSE(reaches_exit(nondiv_gadget(fl, p), 0)) << flavor_name(fl) << p;
}

TEST(NonDiv, Structure) {
    for (int p = 1; p <= 9; ++p) {
        Gadget u2 = nondiv_gadget(GadgetFlavor::Unary2, p);
        EXPECT_EQ(u2.scheme.dim, 2u);
        EXPECT_EQ(u2.scheme.num_zero_tests(), 2u);
        Gadget u5 = nondiv_gadget(GadgetFlavor::Unitary5, p);
        EXPECT_EQ(u5.scheme.dim, 5u);
        EXPECT_TRUE(u5.scheme.is_unitary());
        EXPECT_EQ(u5.scheme.num_zero_tests(), static_cast<std::size_t>(2 * p + 5));
        Gadget f3 = nondiv_gadget(GadgetFlavor::Ultraflat3, p);
        EXPECT_EQ(f3.scheme.dim, 3u);
        EXPECT_TRUE(f3.scheme.is_ultraflat());
        EXPECT_EQ(f3.scheme.num_zero_tests(), 4u);
        EXPECT_LE(u2.scheme.unary_size(), Int(20 * p + 20));
        EXPECT_LE(f3.scheme.unary_size(), Int(10 * p * p + 20));
    }
}

// Reachability of the exit from the entry holds iff p does not divide v, and
// the exit is the only final configuration.
TEST(NonDiv, IffContractAllFlavors) {
    for (GadgetFlavor fl : {GadgetFlavor::Unary2, GadgetFlavor::Unitary5, GadgetFlavor::Ultraflat3}) {
        for (int p = 1; p <= 7; ++p) {
            Gadget g = nondiv_gadget(fl, p);
            for (int val = 0; val <= 30; ++val) {
                FinalLayer f = gadget_finals(g, val);
                ASSERT_FALSE(f.exhausted);
                if (val % p != 0) {
                    ASSERT_EQ(f.configs.size(), 1u) << flavor_name(fl) << " p=" << p << " v=" << val;
                    EXPECT_EQ(f.configs[0], g.exit(val));
                } else {
                    EXPECT_TRUE(f.configs.empty()) << flavor_name(fl) << " p=" << p << " v=" << val;
                }
            }
        }
    }
}

TEST(UpdateGadget, Examples) {
    Gadget g = ultraflat_update_gadget(-3);
    FinalLayer f = gadget_finals(g, 5);
    ASSERT_EQ(f.configs.size(), 1u);
    EXPECT_EQ(f.configs[0], v({2, 0, 1}));
    EXPECT_TRUE(gadget_finals(g, 2).configs.empty());
    Gadget id = ultraflat_update_gadget(0);
    FinalLayer z = gadget_finals(id, 0);
    ASSERT_EQ(z.configs.size(), 1u);
    EXPECT_EQ(z.configs[0], v({0, 0, 1}));
}

TEST(UpdateGadget, Sweep) {
    for (int u = -5; u <= 5; ++u) {
        Gadget g = ultraflat_update_gadget(u);
        EXPECT_TRUE(g.scheme.is_ultraflat());
        EXPECT_EQ(g.scheme.num_zero_tests(), 2u);
        for (int val = 0; val <= 10; ++val) {
            FinalLayer f = gadget_finals(g, val);
            if (val + u >= 0) {
                ASSERT_EQ(f.configs.size(), 1u);
                EXPECT_EQ(f.configs[0], v({val + u, 0, 1}));
            } else {
                EXPECT_TRUE(f.configs.empty());
            }
        }
    }
}

TEST(Reduction, UnaryThreeSlpsExamples) {
    CnfFormula sat = formula(1, {{pos(0)}});
    CnfFormula unsat = formula(1, {{pos(0)}, {neg(0)}});
    for (const CnfFormula& f : {sat, unsat}) {
        Instance inst = reduce_sat_to_unary_3slps(f);
        EXPECT_EQ(inst.scheme.dim, 3u);
        EXPECT_TRUE(inst.scheme.is_slps());
        SearchBound b;
        b.max_norm = controlled_norm_bound(f, SatTarget::Unary3Slps);
        BfsResult r = bfs_reach(inst, b);
        EXPECT_EQ(r.verdict == Verdict::Reachable, f.satisfiable());
        if (r.verdict == Verdict::Reachable) EXPECT_TRUE(verify_witness(inst, r.witness));
    }
}

TEST(Reduction, ZeroTestCounts) {
    CnfFormula f = formula(3, {{pos(0), neg(1), pos(2)}, {neg(0), pos(2)}});
    Skeleton sk = sat_skeleton(f);
    Instance unary = sat_program(f, SatTarget::Unary3Slps);
    EXPECT_EQ(unary.scheme.num_zero_tests(), 2 * sk.num_nondiv());
    EXPECT_EQ(sk.num_nondiv(), f.clauses.size() + (3 - 2) + (5 - 2));
    Instance flat = sat_program(f, SatTarget::Ultraflat4);
    EXPECT_EQ(flat.scheme.num_zero_tests(), 4 * sk.num_nondiv() + 2 * sk.num_updates());
    EXPECT_TRUE(flat.scheme.is_ultraflat());
    Instance reduced = reduce_sat_to_ultraflat_4vass(f);
    EXPECT_EQ(reduced.scheme.dim, 4u);
    EXPECT_TRUE(reduced.scheme.is_ultraflat());
    EXPECT_TRUE(reduced.scheme.is_slps());
}

TEST(Reduction, UltraflatExamples) {
    CnfFormula sat = formula(1, {{pos(0)}});
    CnfFormula unsat = formula(1, {{pos(0)}, {neg(0)}});
    for (const CnfFormula& f : {sat, unsat}) {
        Instance inst = reduce_sat_to_ultraflat_4vass(f);
        SearchBound b;
        b.max_norm = controlled_norm_bound(f, SatTarget::Ultraflat4);
        EXPECT_EQ(bfs_reach(inst, b).verdict == Verdict::Reachable, f.satisfiable());
    }
}

// Plain search on the unary target; the ultraflat target is searched
// plainly for one variable and with the controlling potential for two.
TEST(Reduction, CorpusSubsetAgreesWithSat) {
    for (const CnfFormula& f : canonical_formulas(2, 4)) {
        Instance unary = reduce_sat_to_unary_3slps(f);
        SearchBound b;
        b.max_norm = controlled_norm_bound(f, SatTarget::Unary3Slps);
        EXPECT_EQ(bfs_reach(unary, b).verdict == Verdict::Reachable, f.satisfiable());

        ControlledInstance flat = reduce_sat_traced(f, SatTarget::Ultraflat4);
        SearchBound fb;
        fb.max_norm = controlled_norm_bound(f, SatTarget::Ultraflat4);
        if (f.num_vars == 1) EXPECT_EQ(bfs_reach(flat.instance, fb).verdict == Verdict::Reachable, f.satisfiable());
        fb.potential = controlling_potential(flat);
        EXPECT_EQ(bfs_reach(flat.instance, fb).verdict == Verdict::Reachable, f.satisfiable());
    }
}

TEST(Reduction, SizesArePolynomial) {
    std::mt19937_64 rng(11);
    for (std::size_t n = 1; n <= 6; ++n) {
        std::vector<Int> primes = first_n_primes(n);
        const Int& largest = primes.back();
        for (std::size_t m = 0; m <= 6; ++m) {
            CnfFormula f;
            f.num_vars = n;
            for (std::size_t j = 0; j < m; ++j) {
                std::vector<std::size_t> vars(n);
                for (std::size_t i = 0; i < n; ++i) vars[i] = i;
                std::shuffle(vars.begin(), vars.end(), rng);
                Clause c;
                for (std::size_t i = 0; i < std::min<std::size_t>(3, n); ++i) c.push_back({vars[i], (rng() & 1) != 0});
                f.clauses.push_back(c);
            }
            Int cube = largest * largest * largest;
            Int budget = 64 * (Int(static_cast<unsigned long>(m)) * cube + Int(static_cast<unsigned long>(n)) * largest * largest + 1);
            Instance program = sat_program(f, SatTarget::Unary3Slps);
            EXPECT_LE(program.scheme.unary_size(), budget);
            EXPECT_LE(sat_program(f, SatTarget::Unitary).scheme.unary_size(), budget);
            EXPECT_LE(sat_program(f, SatTarget::Ultraflat4).scheme.unary_size(), budget * cube);
            // The controlling counter scales updates by at most the test count.
            Int tests = static_cast<unsigned long>(program.scheme.num_zero_tests());
            EXPECT_LE(reduce_sat_to_unary_3slps(f).scheme.unary_size(), budget * (tests + 2));
        }
    }
}

TEST(Reduction, UnitaryStructure) {
    CnfFormula f = formula(1, {{pos(0)}});
    Instance inst = reduce_sat_to_unitary_slps(f, UnitaryConfig{16, std::nullopt, std::nullopt});
    EXPECT_TRUE(inst.scheme.is_unitary());
    EXPECT_TRUE(inst.scheme.is_slps());
    EXPECT_EQ(inst.scheme.dim, 8u);
    Instance prog = sat_program(f, SatTarget::Unitary);
    // one clause gadget with q = 2
    EXPECT_EQ(prog.scheme.num_zero_tests(), 2u * 2 + 5);
    Int tests = 9;
    EXPECT_EQ(inst.source.values(), v({0, 0, 0, 0, 0, 16, 18, 2 * 16 * 9}));
    EXPECT_EQ(inst.target.values(), zeros(8));
    EXPECT_NO_THROW(reduce_sat_to_unitary_slps(f, UnitaryConfig{16, tests, std::nullopt}));
    EXPECT_THROW(reduce_sat_to_unitary_slps(f, UnitaryConfig{16, Int(3), std::nullopt}), Error);
}

TEST(Reduction, UnitaryTripleTooSmall) {
    CnfFormula f = formula(1, {{pos(0)}});
    try {
        reduce_sat_to_unitary_slps(f, UnitaryConfig{2, std::nullopt, std::nullopt});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::TripleTooSmall);
    }
    try {
        reduce_sat_to_unitary_slps(formula(2, {{pos(0), pos(1)}}), UnitaryConfig{0, std::nullopt, std::size_t{1}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::TripleTooSmall);
    }
}
