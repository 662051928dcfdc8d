#include <gtest/gtest.h>

#include "mell/fixtures.hpp"
#include "mell/proof_structure.hpp"
#include "oracle.hpp"
#include "props.hpp"

using namespace mell;

TEST(Validate, SingleOneIsLps) { EXPECT_EQ(validate(fixtures::one().r.s).level, Level::lps); }
TEST(Validate, AxiomPairIsLps) { EXPECT_EQ(validate(fixtures::axpair().r.s).level, Level::lps); }

TEST(Validate, FixturesAreProofStructures) {
    for (auto n : {"PSI2", "FIG1", "ONE", "AXPAIR", "TWOBOX1", "TWOBOX2"}) {
        auto x = fixtures::by_name(n);
        EXPECT_EQ(validate(x.r.s).level, Level::lps) << n;
        EXPECT_TRUE(ps_violations(x.r).empty()) << n;
        EXPECT_TRUE(valid_ind(x.r.s, x.ind)) << n;
    }
}

TEST(Validate, BangWiredToItselfIsNotAcyclic) {
    Structure s;
    s.add_cell("v", CellType::Bang, "c", {"a"});
    s.add_wire("a", "c");
    auto v = validate(s);
    EXPECT_LT(v.level, Level::plps);
    EXPECT_FALSE(v.violations.empty());
}

TEST(Validate, DanglingAuxIsNotLps) {
    Structure s;
    s.add_cell("t", CellType::Tensor, "c", {"l", "r"});
    s.add_wire("l", "r");
    EXPECT_EQ(validate(s).level, Level::lps);
    Structure u;
    u.add_cell("t", CellType::Tensor, "c", {"l", "r"});
    EXPECT_LT(validate(u).level, Level::lps);
}

TEST(Validate, DoorCountOffWhyPortIsMalformed) {
    auto s = fixtures::one().r.s;
    s.doors["c"] = 1;
    EXPECT_THROW(topology(s), Error);
}

TEST(Conclusions, OfFixtures) {
    EXPECT_EQ(conclusions(fixtures::psi2().r.s), (IdSet{"c1", "c2"}));
    EXPECT_EQ(conclusions(fixtures::fig1().r.s), (IdSet{"c1", "c2"}));
    EXPECT_EQ(conclusions(fixtures::axpair().r.s), (IdSet{"p", "q"}));
}

TEST(Depth, AxiomPortUnderDoorIsOne) {
    auto s = fixtures::psi2().r.s;
    EXPECT_EQ(depth(s, "tl"), 1);
    EXPECT_EQ(depth(s, "tr"), 1);
    EXPECT_EQ(depth(s, "q"), 1);
    EXPECT_EQ(depth(s, "c1"), 0);
    EXPECT_EQ(depth(s, "c2"), 0);
}

TEST(Depth, DoorBranchVersusDereliction) {
    auto s = fixtures::fig1().r.s;
    EXPECT_EQ(depth(s, "p2'"), 1);
    EXPECT_EQ(depth(s, "b1"), 1);
    EXPECT_EQ(depth(s, "p1'"), 0);
    EXPECT_EQ(depth(s, "q'"), 1);
    EXPECT_EQ(structure_depth(s), 1);
}

TEST(Depth, AgreesWithBoxMembership) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        auto x = props::random_ps(seed, 10);
        auto expect = oracle::box_depths(x.r);
        auto got = all_depths(x.r.s, topology(x.r.s));
        ASSERT_EQ(got, expect) << "seed " << seed;
    }
}

TEST(Classify, Fixtures) {
    EXPECT_EQ(classify(fixtures::psi2().r.s), Klass::cbox);
    EXPECT_EQ(classify(fixtures::fig1().r.s), Klass::contr);
    EXPECT_EQ(classify(fixtures::one().r.s), Klass::empty);
    EXPECT_EQ(classify(fixtures::axpair().r.s), Klass::ax);
    EXPECT_EQ(classify(Structure{}), Klass::empty);
}

TEST(Classify, BangOverOneIsBangUnit) {
    Structure s;
    s.add_cell("v", CellType::Bang, "c", {"q"});
    s.add_cell("o", CellType::One, "r", {});
    s.add_wire("q", "r");
    EXPECT_EQ(classify(s), Klass::bangunit);
}

TEST(Measure, CosizeOfFixture) {
    auto m = measure(fixtures::psi2().r.s);
    EXPECT_EQ(m.cosize, 2);
    EXPECT_EQ(m.mes, (std::pair<int, int>{2, 10}));
}

TEST(Measure, StripLayerDecreases) {
    auto s = fixtures::psi2().r.s;
    auto u = strip_layer(s);
    EXPECT_LT(measure(u).mes, measure(s).mes);
    EXPECT_EQ(validate(u).level, Level::lps);
    EXPECT_FALSE(u.cells.count("v"));
    EXPECT_EQ(u.doors.at("p1"), 0);
    EXPECT_EQ(u.doors.at("p2"), 0);
}

TEST(Measure, StripLayerNeedsCbox) { EXPECT_THROW(strip_layer(fixtures::fig1().r.s), Error); }

TEST(Measure, StripLayerKeepsIndexUnderExposedPort) {
    auto x = strip_layer(fixtures::psi2().lps());
    EXPECT_EQ(x.ind.at("c1"), 1);
    EXPECT_EQ(x.ind.at("tp"), 2);
}

TEST(RemoveTerminal, BangOverOne) {
    auto u = remove_terminal(fixtures::fig1().r.s, {"v"});
    EXPECT_FALSE(u.cells.count("v"));
    EXPECT_EQ(conclusions(u), (IdSet{"c1", "q'"}));
    EXPECT_EQ(validate(u).level, Level::lps);
}

TEST(RemoveTerminal, Errors) {
    auto s = fixtures::fig1().r.s;
    EXPECT_THROW(remove_terminal(s, {"m1"}), Error);
    EXPECT_THROW(remove_terminal(s, {"w"}), Error);
    EXPECT_THROW(remove_terminal(s, {"nope"}), Error);
    auto t = fixtures::two_boxes(true).r.s;
    EXPECT_NO_THROW(remove_terminal(t, {"v1", "v2"}));
    EXPECT_THROW(remove_terminal(t, {"v1", "w"}), Error);
}

TEST(ReduceIsolated, AxiomFreeBangGoes) {
    auto u = reduce_isolated(fixtures::fig1().r.s, "v");
    EXPECT_FALSE(u.cells.count("v"));
}

TEST(ReduceIsolated, DoorWithAxiomStays) {
    auto s = fixtures::fig1().r.s;
    EXPECT_EQ(reduce_isolated(s, "w"), s);
    auto p = fixtures::psi2().r.s;
    EXPECT_EQ(reduce_isolated(p, "v"), p);
}

TEST(ReduceIsolated, AxiomFreeDoorLosesOne) {
    auto s = fixtures::two_boxes(true).r.s;
    auto u = reduce_isolated(s, "w");
    EXPECT_EQ(u.doors.at("d"), 0);
    EXPECT_THROW(reduce_isolated(s, "o1"), Error);
}

TEST(AxiomAbove, Fixtures) {
    auto s = fixtures::fig1().r.s;
    EXPECT_TRUE(has_axiom_above(s, "p2"));
    EXPECT_TRUE(has_axiom_above(s, "c1"));
    EXPECT_FALSE(has_axiom_above(s, "q"));
    EXPECT_FALSE(has_axiom_above(s, "c2"));
}

TEST(BoxExtract, BoxOfFixture) {
    auto r = fixtures::fig1().r;
    auto box = box_extract(r, "v");
    EXPECT_TRUE(is_ps(box));
    EXPECT_TRUE(box.s.cells.count("o"));
    EXPECT_TRUE(box.s.cells.count("m2"));
    EXPECT_FALSE(box.s.cells.count("m1"));
    EXPECT_FALSE(box.s.cells.count("v"));
}

TEST(BoxExtract, NotABang) { EXPECT_THROW(box_extract(fixtures::fig1().r, "w"), Error); }

TEST(BoxExtract, GeneratedBoxesAreProofStructures) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto x = props::random_ps(seed, 10);
        for (const auto& v : bangs_of(x.r.s)) ASSERT_TRUE(is_ps(box_extract(x.r, v))) << seed << " " << v;
    }
}

TEST(RecoverBoxes, ConnectedFixture) {
    auto x = fixtures::psi2();
    auto r = recover_boxes(x.r.s);
    EXPECT_EQ(r.b.at("v"), (IdSet{"p1", "p2"}));
    EXPECT_EQ(r, x.r);
}

TEST(RecoverBoxes, DisconnectedIsAmbiguous) {
    EXPECT_THROW(recover_boxes(fixtures::two_boxes(true).r.s), Error);
    EXPECT_THROW(recover_boxes(fixtures::fig1().r.s), Error);
}

TEST(Invariants, EveryAxiomPortHasOneConclusionBelow) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        auto x = props::random_ps(seed, 12);
        auto t = topology(x.r.s);
        auto concl = conclusions(x.r.s, t);
        for (const auto& p : axiom_ports(x.r.s, t)) {
            auto chain = chain_below(x.r.s, t, p);
            ASSERT_FALSE(chain.empty());
            ASSERT_TRUE(concl.count(chain.back())) << seed << " " << p;
            ASSERT_EQ(conclusion_under(x.r.s, t, p), chain.back());
        }
    }
}

TEST(Invariants, ClassifyIsTotalAndCboxHasNoTerminalAxioms) {
    int cboxes = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        auto x = props::random_ps(seed, 12);
        Klass k{};
        ASSERT_NO_THROW(k = classify(x.r.s));
        if (k == Klass::cbox) {
            ++cboxes;
            ASSERT_TRUE(terminal_axioms(x.r.s, topology(x.r.s)).empty()) << seed;
            ASSERT_LT(measure(strip_layer(x.r.s)).mes, measure(x.r.s).mes) << seed;
        }
    }
    EXPECT_GT(cboxes, 0);
}
