#pragma once

// Slow reference computations, written without the library's search code.

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "mell/structure.hpp"

namespace oracle {

using namespace mell;

// Is f (ports a -> ports b) an isomorphism of indexed structures?
inline bool port_map_is_iso(const Indexed& a, const Indexed& b, const std::map<Id, Id>& f) {
    const auto& s = a.s;
    const auto& u = b.s;
    std::map<Id, Id> cell_of_principal_b;
    for (const auto& [c, p] : u.principal) cell_of_principal_b[p] = c;
    std::map<Id, Id> g;
    for (const auto& [c, p] : s.principal) {
        auto it = cell_of_principal_b.find(f.at(p));
        if (it == cell_of_principal_b.end()) return false;
        g[c] = it->second;
    }
    for (const auto& [c, d] : g) {
        if (s.cells.at(c).type != u.cells.at(d).type || s.cells.at(c).arity != u.cells.at(d).arity) return false;
        IdSet img;
        for (const auto& p : s.attach.at(c)) img.insert(f.at(p));
        if (img != u.attach.at(d)) return false;
        bool la = s.left.count(c), lb = u.left.count(d);
        if (la != lb || (la && f.at(s.left.at(c)) != u.left.at(d))) return false;
    }
    for (const auto& p : s.ports) {
        int x = s.doors.count(p) ? s.doors.at(p) : 0;
        int y = u.doors.count(f.at(p)) ? u.doors.at(f.at(p)) : 0;
        if (x != y) return false;
    }
    std::set<Wire> wires;
    for (const auto& [p, q] : s.wires) wires.insert(make_wire(f.at(p), f.at(q)));
    if (wires != u.wires) return false;
    for (const auto& [p, i] : a.ind) {
        auto it = b.ind.find(f.at(p));
        if (it == b.ind.end() || it->second != i) return false;
    }
    return a.ind.size() == b.ind.size();
}

// Tries every bijection of ports; only for small structures.
inline std::optional<std::map<Id, Id>> brute_force_iso(const Indexed& a, const Indexed& b) {
    if (a.s.ports.size() != b.s.ports.size() || a.s.cells.size() != b.s.cells.size()) return std::nullopt;
    if (a.s.ports.size() > 9) throw Error("brute_force_iso: too many ports");
    std::vector<Id> pa(a.s.ports.begin(), a.s.ports.end()), pb(b.s.ports.begin(), b.s.ports.end());
    do {
        std::map<Id, Id> f;
        for (std::size_t i = 0; i < pa.size(); ++i) f[pa[i]] = pb[i];
        if (port_map_is_iso(a, b, f)) return f;
    } while (std::next_permutation(pb.begin(), pb.end()));
    return std::nullopt;
}

// Ports inside the box of bang v, found by walking from aux(v) and the doors of v
// without crossing below a door or below v itself.
inline IdSet box_region(const ProofStructure& r, const Id& v) {
    const auto& s = r.s;
    std::map<Id, Id> owner;
    for (const auto& [c, ps] : s.attach)
        for (const auto& p : ps) owner[p] = c;
    std::map<Id, Id> partner;
    for (const auto& [p, q] : s.wires) {
        partner[p] = q;
        partner[q] = p;
    }
    IdSet stop = r.b.count(v) ? r.b.at(v) : IdSet{};
    Id aux;
    for (const auto& p : s.attach.at(v))
        if (p != s.principal.at(v)) aux = p;
    stop.insert(aux);
    IdSet seen;
    std::deque<Id> todo(stop.begin(), stop.end());
    while (!todo.empty()) {
        Id p = todo.front();
        todo.pop_front();
        if (!seen.insert(p).second) continue;
        if (partner.count(p)) todo.push_back(partner.at(p));
        auto o = owner.find(p);
        if (o == owner.end()) continue;
        const Id& c = o->second;
        if (s.principal.at(c) == p) {
            for (const auto& q : s.attach.at(c)) todo.push_back(q);
        } else if (!stop.count(p)) {
            todo.push_back(s.principal.at(c));
        }
    }
    return seen;
}

// depth of a port = number of boxes containing it
inline std::map<Id, int> box_depths(const ProofStructure& r) {
    std::map<Id, int> d;
    for (const auto& p : r.s.ports) d[p] = 0;
    for (const auto& [c, cell] : r.s.cells)
        if (cell.type == CellType::Bang)
            for (const auto& p : box_region(r, c)) ++d[p];
    return d;
}

}  // namespace oracle
