#pragma once

#include <string>

#include "structure.hpp"

// Small named proof-structures used by tests, the CLI and the acceptance runner.
namespace mell::fixtures {

// One why cell (c1; p1, p2 both inside the box) and one bang (c2) over a tensor
// whose left premise is the axiom partner of p2 and right premise of p1.
inline IndexedPS psi2() {
    Structure s;
    s.add_cell("w", CellType::Why, "c1", {"p1", "p2"}, {1, 1});
    s.add_cell("v", CellType::Bang, "c2", {"q"});
    s.add_cell("t", CellType::Tensor, "tp", {"tl", "tr"});
    s.add_wire("q", "tp");
    s.add_wire("tl", "p2");
    s.add_wire("tr", "p1");
    return IndexedPS{ProofStructure{s, {{"v", {"p1", "p2"}}}}, {{"c1", 1}, {"c2", 2}}};
}

// why (c1; p1 dereliction branch, p2 door of the only box), bang (c2) over a one
inline IndexedPS fig1() {
    Structure s;
    s.add_cell("w", CellType::Why, "c1", {"p1", "p2"}, {0, 1});
    s.add_cell("m1", CellType::Par, "p1'", {"a1", "a2"});
    s.add_cell("m2", CellType::Par, "p2'", {"b1", "b2"});
    s.add_cell("v", CellType::Bang, "c2", {"q"});
    s.add_cell("o", CellType::One, "q'", {});
    s.add_wire("p1", "p1'");
    s.add_wire("p2", "p2'");
    s.add_wire("a1", "a2");
    s.add_wire("b1", "b2");
    s.add_wire("q", "q'");
    return IndexedPS{ProofStructure{s, {{"v", {"p2"}}}}, {{"c1", 1}, {"c2", 2}}};
}

inline IndexedPS one() {
    Structure s;
    s.add_cell("o", CellType::One, "c", {});
    return IndexedPS{ProofStructure{s, {}}, {{"c", 1}}};
}

inline IndexedPS axpair() {
    Structure s;
    s.add_wire("p", "q");
    return IndexedPS{ProofStructure{s, {}}, {{"p", 1}, {"q", 2}}};
}

// Two bangs over ones and a why (c3) whose only door may belong to either box.
// first_box selects which bang owns the door.
inline IndexedPS two_boxes(bool first_box) {
    Structure s;
    s.add_cell("v1", CellType::Bang, "c1", {"q1"});
    s.add_cell("o1", CellType::One, "r1", {});
    s.add_cell("v2", CellType::Bang, "c2", {"q2"});
    s.add_cell("o2", CellType::One, "r2", {});
    s.add_cell("w", CellType::Why, "c3", {"d"}, {1});
    s.add_cell("z", CellType::Bot, "e", {});
    s.add_wire("q1", "r1");
    s.add_wire("q2", "r2");
    s.add_wire("d", "e");
    Boxes b{{"v1", {}}, {"v2", {}}};
    b[first_box ? "v1" : "v2"] = {"d"};
    return IndexedPS{ProofStructure{s, b}, {{"c1", 1}, {"c2", 2}, {"c3", 3}}};
}

inline IndexedPS by_name(const std::string& name) {
    if (name == "PSI2") return psi2();
    if (name == "FIG1") return fig1();
    if (name == "ONE") return one();
    if (name == "AXPAIR") return axpair();
    if (name == "TWOBOX1") return two_boxes(true);
    if (name == "TWOBOX2") return two_boxes(false);
    throw Error("unknown fixture " + name);
}

}  // namespace mell::fixtures
