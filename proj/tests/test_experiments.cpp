#include <gtest/gtest.h>

#include "mell/fixtures.hpp"
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

KExperiment worked_experiment() { return eval_k_experiment(fixtures::psi2().lps(), {{"p1", V("γ2")}, {"p2", V("γ1")}}, 3); }

ExperimentDesc fig1_desc(const std::string& outside, const std::vector<std::string>& inside) {
    ExperimentDesc d;
    d.axiom_labels["a1"] = V(outside);
    std::vector<ExperimentDesc> copies;
    for (const auto& g : inside) {
        ExperimentDesc c;
        c.axiom_labels["b1"] = V(g);
        copies.push_back(c);
    }
    d.boxes["v"] = {copies};
    return d;
}

Indexed bang_over_one() {
    Structure s;
    s.add_cell("v", CellType::Bang, "c", {"q"});
    s.add_cell("o", CellType::One, "r", {});
    s.add_wire("q", "r");
    return {s, {{"c", 1}}};
}

Indexed door_over_bot() {
    Structure s;
    s.add_cell("w", CellType::Why, "c", {"d"}, {1});
    s.add_cell("z", CellType::Bot, "e", {});
    s.add_wire("d", "e");
    return {s, {{"c", 1}}};
}

}  // namespace

TEST(KExperiment, WorkedResult) {
    auto e = worked_experiment();
    EXPECT_EQ(e.result, worked_result());
    EXPECT_TRUE(e.atomic);
    EXPECT_TRUE(e.injective);
}

TEST(KExperiment, BangAndWhyEquations) {
    auto e = worked_experiment();
    EXPECT_EQ(e.labels.at("c2"), V("+[+(γ1@[1],γ2@[1]),+(γ1@[2],γ2@[2]),+(γ1@[3],γ2@[3])]"));
    EXPECT_EQ(e.labels.at("tp"), V("+(γ1,γ2)"));
    EXPECT_EQ(e.labels.at("tl"), e.labels.at("p2"));
}

TEST(KExperiment, SingleOne) {
    for (int k : {1, 2, 5}) EXPECT_EQ(eval_k_experiment(fixtures::one().lps(), {}, k).result, (Tuple{V("+*")}));
}

TEST(KExperiment, AxiomPair) {
    auto e = eval_k_experiment(fixtures::axpair().lps(), {{"p", V("γ")}}, 2);
    EXPECT_EQ(e.result, (Tuple{V("γ"), V("γ")}));
}

TEST(KExperiment, IsDeterministic) {
    auto a = worked_experiment(), b = worked_experiment();
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(a.result, b.result);
}

TEST(Canonical, WorkedStructureMatchesUpToRenaming) {
    auto e = canonical_injective_atomic(fixtures::psi2().lps(), 3);
    EXPECT_TRUE(e.atomic);
    EXPECT_TRUE(e.injective);
    auto rho = result_iso(e.result, worked_result());
    ASSERT_TRUE(rho);
    EXPECT_EQ(apply_pinj(*rho, e.result), worked_result());
}

TEST(Canonical, NoAxiomsNoAtoms) { EXPECT_TRUE(atoms_of(canonical_injective_atomic(fixtures::one().lps(), 3).result).empty()); }

TEST(Canonical, TwoRunsAgree) {
    auto x = fixtures::fig1().lps();
    auto a = canonical_injective_atomic(x, 2), b = canonical_injective_atomic(x, 2);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(to_string(a.result), to_string(b.result));
}

TEST(PSExperiment, BoxWithTwoCopies) {
    auto run = eval_ps_experiment(fixtures::fig1(), fig1_desc("α", {"γ1", "γ2"}));
    EXPECT_EQ(run.e.labels.at("c2"), M({"+[+*,+*]"}));
    EXPECT_EQ(run.e.labels.at("q'"), M({"+*", "+*"}));
    EXPECT_EQ(run.e.labels.at("p2"), M({"-(γ1,γ1)", "-(γ2,γ2)"}));
    EXPECT_EQ(run.e.labels.at("p2'"), run.e.labels.at("p2"));
    EXPECT_EQ(run.e.labels.at("p1"), M({"-(α,α)"}));
    // the why sum also collects the dereliction branch
    EXPECT_EQ(run.e.labels.at("c1"), M({"-[-(α,α),-(γ1,γ1),-(γ2,γ2)]"}));
    EXPECT_TRUE(ps_experiment_violations(fixtures::fig1().r, run.e).empty());
}

TEST(PSExperiment, DistinctExperimentsSameResult) {
    auto x = fixtures::fig1();
    auto z = [](int j) { return "-(γ" + std::to_string(j) + ",γ" + std::to_string(j) + ")"; };
    auto r1 = eval_ps_experiment(x, fig1_desc("γ1", {"γ2", "γ3", "γ4"}));
    auto r2 = eval_ps_experiment(x, fig1_desc("γ2", {"γ1", "γ3", "γ4"}));
    EXPECT_EQ(r1.e.labels.at("p1"), (Multiset{V(z(1))}));
    EXPECT_EQ(r2.e.labels.at("p1"), (Multiset{V(z(2))}));
    EXPECT_EQ(r1.e.labels.at("p2"), normalized({V(z(2)), V(z(3)), V(z(4))}));
    EXPECT_EQ(r2.e.labels.at("p2"), normalized({V(z(1)), V(z(3)), V(z(4))}));
    EXPECT_EQ(r1.result, r2.result);
    EXPECT_TRUE(is_injective_point(r1.result));
    EXPECT_TRUE(is_k_point(r1.result, 3));
}

TEST(PSExperiment, SingleOne) { EXPECT_EQ(eval_ps_experiment(fixtures::one(), {}).result, (Tuple{V("+*")})); }

TEST(PSExperiment, BadDescriptionShape) {
    auto d = fig1_desc("α", {"γ1"});
    d.boxes["v"].push_back({});
    EXPECT_THROW(eval_ps_experiment(fixtures::fig1(), d), Error);
}

TEST(Projection, WorkedExample) {
    auto x = fixtures::psi2();
    PInj rho;
    for (int j = 1; j <= 2; ++j)
        for (int i = 1; i <= 3; ++i) rho[Atom{"γ" + std::to_string(j), {i}}] = Atom{"γ" + std::to_string(j) + std::to_string(i), {}};
    auto run = project_to_ps(x, worked_experiment(), rho);
    Tuple r0{V("-[γ11,γ12,γ13,γ21,γ22,γ23]"), V("+[+(γ11,γ21),+(γ12,γ22),+(γ13,γ23)]")};
    EXPECT_EQ(run.result, r0);
    EXPECT_TRUE(ps_experiment_violations(x.r, run.e).empty());
    EXPECT_EQ(run.e.boxes.at("v").size(), 1u);
    EXPECT_EQ(run.e.boxes.at("v").front().size(), 3u);
}

TEST(Projection, RenamingMustCoverAndBeInjective) {
    auto x = fixtures::psi2();
    auto ke = worked_experiment();
    PInj partial{{Atom{"γ1", {1}}, Atom{"a", {}}}};
    EXPECT_THROW(project_to_ps(x, ke, partial), Error);
    PInj collapse;
    for (const auto& a : atoms_of(ke.result)) collapse[a] = Atom{"a", {}};
    EXPECT_THROW(project_to_ps(x, ke, collapse), Error);
}

TEST(Projection, OneCopyPerBoxWhenKIsOne) {
    auto x = fixtures::fig1();
    auto ke = canonical_injective_atomic(x.lps(), 1);
    PInj rho;
    int n = 0;
    for (const auto& a : atoms_of(ke.result)) rho[a] = Atom{"z" + std::to_string(n++), {}};
    auto run = project_to_ps(x, ke, rho);
    EXPECT_EQ(run.e.boxes.at("v").front().size(), 1u);
    EXPECT_EQ(run.result, apply_pinj(rho, ke.result));
}

TEST(Projection, SoundOnGeneratedStructures) {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto x = props::random_ps(seed, 10);
        for (int k : {1, 2}) {
            auto ke = canonical_injective_atomic(x.lps(), k);
            PInj rho;
            int n = 0;
            for (const auto& a : atoms_of(ke.result)) rho[a] = Atom{"z" + std::to_string(n++), {}};
            auto run = project_to_ps(x, ke, rho);
            ASSERT_EQ(run.result, apply_pinj(rho, ke.result)) << seed;
            ASSERT_TRUE(ps_experiment_violations(x.r, run.e).empty()) << seed;
            ASSERT_TRUE(is_injective_point(run.result)) << seed;
            ++checked;
        }
    }
    EXPECT_EQ(checked, 400);
}

TEST(StripLayer, WorkedExperiment) {
    auto st = strip_layer_exp(fixtures::psi2().lps(), worked_experiment());
    EXPECT_EQ(st.e.result, (Tuple{V("-[γ1,γ2]"), V("+(γ1,γ2)")}));
    EXPECT_EQ(st.e.result[0].items(), undig(3, worked_result()[0].items()));
    EXPECT_TRUE(st.e.atomic);
    EXPECT_TRUE(st.e.injective);
}

TEST(StripLayer, NeedsCbox) {
    auto x = bang_over_one();
    EXPECT_THROW(strip_layer_exp(x, eval_k_experiment(x, {}, 2)), Error);
    auto f = fixtures::fig1().lps();
    EXPECT_THROW(strip_layer_exp(f, canonical_injective_atomic(f, 2)), Error);
}

TEST(ReduceExp, BangOverOne) {
    auto x = bang_over_one();
    auto e = eval_k_experiment(x, {}, 2);
    EXPECT_EQ(e.result, (Tuple{V("+[+*,+*]")}));
    auto red = reduce_exp(x, e, "v");
    EXPECT_EQ(red.e.result, (Tuple{V("+*")}));
}

TEST(ReduceExp, DoorOverBottom) {
    auto x = door_over_bot();
    auto e = eval_k_experiment(x, {}, 3);
    EXPECT_EQ(e.result, (Tuple{V("-[-*,-*,-*]")}));
    auto red = reduce_exp(x, e, "w");
    EXPECT_EQ(red.e.result, (Tuple{V("-[-*]")}));
}

TEST(ReduceExp, BranchWithAxiomIsRejected) {
    auto x = fixtures::psi2().lps();
    EXPECT_THROW(reduce_exp(x, worked_experiment(), "v"), Error);
    EXPECT_THROW(reduce_exp(x, worked_experiment(), "w"), Error);
    EXPECT_THROW(reduce_exp(x, worked_experiment(), "t"), Error);
}

TEST(Sample, SingleOne) {
    auto s = sample_interpretation(fixtures::one(), {Atom{"γ", {}}}, 2);
    EXPECT_EQ(s.results, (std::set<Tuple>{{V("+*")}}));
    EXPECT_FALSE(s.truncated);
}

TEST(Sample, AxiomPair) {
    auto s = sample_interpretation(fixtures::axpair(), {Atom{"γ", {}}}, 2);
    EXPECT_EQ(s.results, (std::set<Tuple>{{V("γ"), V("γ")}}));
}

TEST(Sample, ContainsCommonResultOfDistinctExperiments) {
    auto x = fixtures::fig1();
    std::vector<Atom> pool{{"γ1", {}}, {"γ2", {}}, {"γ3", {}}, {"γ4", {}}};
    auto common = eval_ps_experiment(x, fig1_desc("γ1", {"γ2", "γ3", "γ4"})).result;
    auto three = sample_interpretation(x, pool, 3);
    EXPECT_FALSE(three.truncated);
    EXPECT_TRUE(three.results.count(common));
    // three copies of the box are needed
    auto two = sample_interpretation(x, pool, 2);
    EXPECT_FALSE(two.truncated);
    EXPECT_FALSE(two.results.count(common));
}

TEST(Sample, TruncationIsReported) {
    std::vector<Atom> pool{{"a", {}}, {"b", {}}, {"c", {}}, {"d", {}}};
    auto s = sample_interpretation(fixtures::fig1(), pool, 4, 10);
    EXPECT_TRUE(s.truncated);
}

TEST(Invariants, PermutationInvariance) {
    auto o = props::permutation_invariance(3, 1000);
    EXPECT_TRUE(o.ok()) << o.first;
}

TEST(Invariants, AxiomsAndAtomFreeParts) {
    auto o = props::axioms_and_stars(4, 1000);
    EXPECT_TRUE(o.ok()) << o.first;
}

TEST(Invariants, ArityDivisibility) {
    auto o = props::arity_divisibility(5, 1000);
    EXPECT_TRUE(o.ok()) << o.first;
}
