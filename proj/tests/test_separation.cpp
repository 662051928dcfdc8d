#include <gtest/gtest.h>

#include "mell/fixtures.hpp"
#include "mell/io.hpp"
#include "oracle.hpp"
#include "props.hpp"

using namespace mell;

namespace {

Value V(const std::string& s) { return parse_value(s); }
Multiset M(std::initializer_list<const char*> xs) {
    Multiset a;
    for (auto x : xs) a.push_back(V(x));
    return normalized(a);
}

Tuple worked_result() {
    return {V("-[γ1@[1],γ1@[2],γ1@[3],γ2@[1],γ2@[2],γ2@[3]]"),
            V("+[+(γ1@[1],γ2@[1]),+(γ1@[2],γ2@[2]),+(γ1@[3],γ2@[3])]")};
}

IndexedPS with_type(IndexedPS x, const Id& c, CellType t) {
    x.r.s.cells.at(c).type = t;
    return x;
}

IndexedPS swap_premises(IndexedPS x, const Id& c) {
    auto t = topology(x.r.s);
    x.r.s.left[c] = t.aux.at(c)[1];
    return x;
}

}  // namespace

TEST(QSplit, DistinctShapesAreSingletons) {
    auto a = M({"+*", "γ", "+(α,β)"});
    auto q = q_split({}, a);
    ASSERT_EQ(q.size(), 3u);
    for (const auto& cl : q) EXPECT_EQ(cl.size(), 1u);
}

TEST(QSplit, CopiesOfOneValueShareAClass) {
    auto r = worked_result();
    auto q = q_split(r, r[0].items());
    EXPECT_EQ(q, (std::vector<Multiset>{M({"γ1@[1]", "γ1@[2]", "γ1@[3]"}), M({"γ2@[1]", "γ2@[2]", "γ2@[3]"})}));
}

// dereliction branch and door branch end up in one class
TEST(QSplit, DerelictionAndBoxCopiesTogether) {
    auto x = fixtures::fig1().lps();
    auto e = eval_k_experiment(x, {{"a1", V("λ1")}, {"b1", V("λ2")}}, 3);
    Multiset a = e.labels.at("c1").items();
    EXPECT_EQ(a, M({"-(λ1,λ1)", "-(λ2@[1],λ2@[1])", "-(λ2@[2],λ2@[2])", "-(λ2@[3],λ2@[3])"}));
    EXPECT_EQ(q_split(e.result, a), (std::vector<Multiset>{a}));
    // a renaming fixing the result that moves the dereliction atom into a copy
    PInj rho = identity_on(atoms_of(e.result));
    rho[Atom{"λ1", {}}] = Atom{"λ2", {1}};
    rho[Atom{"λ2", {1}}] = Atom{"λ1", {}};
    EXPECT_TRUE(is_result_iso(e.result, e.result, rho));
    Value beta = V("-(λ1,λ1)");
    EXPECT_NE(apply_pinj(rho, beta), beta);
    auto km = key_match(x, e, x, e);
    ASSERT_TRUE(km.witness) << km.trace.str();
}

TEST(Bridges, WorkedExample) {
    auto r = worked_result();
    auto got = bridge_split({r[0].items(), r[1].items()});
    TupleSet expect;
    for (int z = 1; z <= 3; ++z) {
        Value a = Value::atom(Atom{"γ1", {z}}), b = Value::atom(Atom{"γ2", {z}});
        expect.insert({normalized({a, b}), {Value::pair(true, a, b)}});
    }
    EXPECT_EQ(got, expect);
}

TEST(Bridges, SingleElement) { EXPECT_EQ(bridge_split({M({"α"})}), (TupleSet{{M({"α"})}})); }

TEST(Bridges, AtomFreeIsAnError) {
    EXPECT_THROW(bridges(M({"+*"})), Error);
    EXPECT_THROW(bridge_split({M({"α", "-[+*]"})}), Error);
}

TEST(Bridges, ClassesShareNoAtoms) {
    props::Rng rng(21);
    for (int i = 0; i < 500; ++i) {
        auto a = props::random_multiset(rng, 5, 2, true), b = props::random_multiset(rng, 5, 2, true);
        auto split = bridge_split({a, b});
        std::vector<std::set<Atom>> ats;
        for (const auto& t : split) ats.push_back(atoms_of(t));
        for (std::size_t x = 0; x < ats.size(); ++x)
            for (std::size_t y = x + 1; y < ats.size(); ++y)
                for (const auto& at : ats[x]) ASSERT_FALSE(ats[y].count(at));
        // the pieces add back up
        Multiset sa, sb;
        for (const auto& t : split) {
            sa = msum(sa, t[0]);
            sb = msum(sb, t[1]);
        }
        ASSERT_EQ(sa, a);
        ASSERT_EQ(sb, b);
    }
}

TEST(Quotient, TwoRenamedTuplesOneClass) {
    TupleSet b{{M({"-(γ1,γ1)"})}, {M({"-(γ2,γ2)"})}};
    EXPECT_EQ(r_quotient(b).size(), 1u);
}

TEST(Quotient, ShapesSeparate) {
    TupleSet b{{M({"-(γ1,γ1)"})}, {M({"+(γ2,γ2)"})}, {M({"γ3"})}};
    EXPECT_EQ(r_quotient(b).size(), 3u);
    EXPECT_EQ(r_quotient({{M({"γ"})}}).size(), 1u);
}

TEST(KeyMatch, SelfMatch) {
    auto x = fixtures::psi2().lps();
    auto e = canonical_injective_atomic(x, 3);
    auto km = key_match(x, e, x, e);
    ASSERT_TRUE(km.witness) << km.trace.str();
    EXPECT_TRUE(exp_iso_violations(x, e, x, e, *km.witness).empty());
    EXPECT_GT(km.levels, 0);
}

TEST(KeyMatch, Preconditions) {
    auto x = fixtures::psi2().lps();
    EXPECT_THROW(key_match(x, canonical_injective_atomic(x, 2), x, canonical_injective_atomic(x, 2)), Error);
    auto bad = eval_k_experiment(x, {{"p1", V("+(α,β)")}, {"p2", V("γ")}}, 3);
    EXPECT_FALSE(bad.atomic);
    EXPECT_THROW(key_match(x, bad, x, bad), Error);
    EXPECT_THROW(key_match(x, canonical_injective_atomic(x, 3), x, canonical_injective_atomic(x, 4)), Error);
}

TEST(KeyMatch, SwappedTensorPremisesAreIsomorphic) {
    auto a = fixtures::psi2(), b = swap_premises(a, "t");
    EXPECT_TRUE(iso_structure(a.lps(), b.lps()));
    auto ea = canonical_injective_atomic(a.lps(), 3), eb = canonical_injective_atomic(b.lps(), 3);
    EXPECT_TRUE(key_match(a.lps(), ea, b.lps(), eb).witness);
}

TEST(Separate, TensorTurnedParIsDifferent) {
    auto a = fixtures::psi2(), b = with_type(a, "t", CellType::Par);
    auto ea = canonical_injective_atomic(a.lps(), 3), eb = canonical_injective_atomic(b.lps(), 3);
    EXPECT_FALSE(result_iso(ea.result, eb.result));
    auto v = separate(a, b);
    EXPECT_FALSE(v.same_lps);
    EXPECT_FALSE(v.trace.str().empty());
    EXPECT_FALSE(iso_structure(a.lps(), b.lps()));
}

TEST(Separate, FixturesAgainstThemselves) {
    for (auto n : {"PSI2", "FIG1", "ONE", "AXPAIR", "TWOBOX1"}) {
        auto x = fixtures::by_name(n);
        auto v = separate(x, rename_ids(x, 3));
        EXPECT_TRUE(v.same_lps) << n << ": " << v.trace.str();
        EXPECT_TRUE(v.witness) << n;
    }
}

TEST(Separate, DifferentConclusionCounts) {
    auto v = separate(fixtures::psi2(), fixtures::one());
    EXPECT_FALSE(v.same_lps);
    EXPECT_FALSE(v.witness);
}

TEST(Separate, SameLinearPartDifferentBoxes) {
    auto a = fixtures::two_boxes(true), b = fixtures::two_boxes(false);
    auto v = separate(a, b);
    EXPECT_TRUE(v.same_lps);
    EXPECT_TRUE(iso_structure(a.lps(), b.lps()));
    EXPECT_FALSE(iso_ps(a, b));
}

TEST(Separate, KDominatesCosize) {
    EXPECT_EQ(separation_k(fixtures::psi2(), fixtures::one()), 3);
    EXPECT_EQ(separation_k(fixtures::one(), fixtures::axpair()), 2);
}

TEST(Separate, InvalidInputIsAnError) {
    auto x = fixtures::psi2();
    x.r.b["v"] = {"p1"};
    EXPECT_THROW(separate(x, fixtures::psi2()), Error);
}

TEST(Separate, AgreesWithIsomorphismOnMutatedPairs) {
    long same = 0, diff = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto a = props::random_ps(seed, 10);
        IndexedPS b = a;
        std::vector<Id> ms;
        for (const auto& [c, cell] : a.r.s.cells)
            if (is_mult(cell.type)) ms.push_back(c);
        if (seed % 2 && !ms.empty()) {
            const auto& c = ms[seed % ms.size()];
            b = seed % 4 == 1 ? with_type(a, c, a.r.s.cells.at(c).type == CellType::Tensor ? CellType::Par : CellType::Tensor)
                              : swap_premises(a, c);
        }
        b = rename_ids(b, seed);
        auto v = separate(a, b);
        bool iso = iso_structure(a.lps(), b.lps()).has_value();
        ASSERT_EQ(v.same_lps, iso) << "seed " << seed << ": " << summary(v);
        if (v.same_lps) {
            ++same;
            auto ea = canonical_injective_atomic(a.lps(), v.k), eb = canonical_injective_atomic(b.lps(), v.k);
            ASSERT_TRUE(exp_iso_violations(a.lps(), ea, b.lps(), eb, *v.witness).empty()) << seed;
        } else {
            ++diff;
        }
    }
    EXPECT_GT(same, 0);
    EXPECT_GT(diff, 0);
}

TEST(SeparateConnected, FullIsoOnConnectedFixture) {
    auto x = fixtures::psi2();
    auto v = separate_connected(x, rename_ids(x, 5));
    EXPECT_TRUE(v.same_lps);
    EXPECT_TRUE(v.boxes_checked);
    EXPECT_TRUE(v.same_ps);
    EXPECT_TRUE(v.note.empty());
}

TEST(SeparateConnected, EqualSamplesThenFullIso) {
    auto a = fixtures::psi2(), b = rename_ids(a, 11);
    std::vector<Atom> pool{{"α", {}}, {"β", {}}};
    auto sa = sample_interpretation(a, pool, 2), sb = sample_interpretation(b, pool, 2);
    ASSERT_FALSE(sa.truncated);
    ASSERT_EQ(sa.results, sb.results);
    auto v = separate_connected(a, b);
    EXPECT_TRUE(v.same_ps);
}

TEST(SeparateConnected, DisconnectedFallsBack) {
    auto v = separate_connected(fixtures::two_boxes(true), fixtures::two_boxes(false));
    EXPECT_TRUE(v.same_lps);
    EXPECT_FALSE(v.boxes_checked);
    EXPECT_FALSE(v.note.empty());
}

TEST(SeparateConnected, GeneratedConnectedPairs) {
    int n = 0;
    for (std::uint64_t seed = 0; n < 100; ++seed) {
        GeneratorConfig c;
        c.seed = seed;
        c.connected = true;
        c.allow_weakening = false;
        c.max_cells = 10;
        auto x = generate_ps(c);
        ++n;
        auto v = separate_connected(x, rename_ids(x, seed));
        ASSERT_TRUE(v.same_lps) << seed;
        ASSERT_TRUE(v.boxes_checked) << seed;
        ASSERT_TRUE(v.same_ps) << seed;
    }
}
