#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "structure.hpp"

namespace mell {

inline IdSet aux_doors(const Structure& s) {
    IdSet out;
    for (const auto& [p, n] : s.doors)
        if (n > 0) out.insert(p);
    return out;
}

// B_v: every port at or above aux(v) or a door of v
inline IdSet box_ports(const ProofStructure& r, const Topology& t, const Id& v) {
    IdSet out;
    std::vector<Id> roots = t.aux.at(v);
    auto it = r.b.find(v);
    if (it != r.b.end()) roots.insert(roots.end(), it->second.begin(), it->second.end());
    for (const auto& p : roots) {
        auto up = ports_above(r.s, t, p);
        out.insert(up.begin(), up.end());
    }
    return out;
}

inline IdSet cells_touching(const Structure&, const Topology& t, const IdSet& ps) {
    IdSet out;
    for (const auto& p : ps) {
        auto o = t.owner_of(p);
        if (o) out.insert(*o);
    }
    return out;
}

inline IdSet bangs_of(const Structure& s) {
    IdSet out;
    for (const auto& [c, cell] : s.cells)
        if (cell.type == CellType::Bang) out.insert(c);
    return out;
}

// Checks everything except the recursive box conditions.
inline std::vector<std::string> ps_local_violations(const ProofStructure& r) {
    std::vector<std::string> v;
    auto val = validate(r.s);
    if (val.level != Level::lps) {
        v.push_back(std::string("not an lps (") + level_name(val.level) + ")");
        for (const auto& x : val.violations) v.push_back(x);
        return v;
    }
    auto t = topology(r.s);
    auto bangs = bangs_of(r.s);
    auto ad = aux_doors(r.s);
    for (const auto& [c, ps] : r.b) {
        if (!bangs.count(c)) v.push_back("box entry for non-bang cell " + c);
        for (const auto& p : ps)
            if (!ad.count(p)) v.push_back("box of " + c + " lists " + p + " which is not an auxiliary door");
    }
    for (const auto& p : ad) {
        int n = 0;
        for (const auto& [c, ps] : r.b)
            if (ps.count(p)) ++n;
        if (n != r.s.doors.at(p))
            v.push_back("door " + p + " has count " + std::to_string(r.s.doors.at(p)) + " but belongs to " +
                        std::to_string(n) + " boxes");
    }
    if (!v.empty()) return v;
    std::map<Id, IdSet> bv;
    for (const auto& c : bangs) bv[c] = box_ports(r, t, c);
    for (auto i = bv.begin(); i != bv.end(); ++i)
        for (auto j = std::next(i); j != bv.end(); ++j) {
            const auto& a = i->second;
            const auto& b = j->second;
            bool meet = false, a_in_b = true, b_in_a = true;
            for (const auto& p : a) {
                if (b.count(p)) meet = true;
                else a_in_b = false;
            }
            for (const auto& p : b)
                if (!a.count(p)) b_in_a = false;
            if (meet && !a_in_b && !b_in_a) v.push_back("nesting: boxes of " + i->first + " and " + j->first + " overlap");
        }
    return v;
}

inline ProofStructure box_extract_unchecked(const ProofStructure& r, const Id& v) {
    auto t = topology(r.s);
    if (!r.s.cells.count(v) || r.s.cells.at(v).type != CellType::Bang) throw Error("box_extract: " + v + " is not a bang cell");
    const IdSet doors_v = r.b.count(v) ? r.b.at(v) : IdSet{};
    const IdSet bv = box_ports(r, t, v);
    const IdSet door_cells = cells_touching(r.s, t, doors_v);

    Structure psi;
    for (const auto& c : cells_touching(r.s, t, bv)) {
        if (door_cells.count(c)) continue;
        psi.cells[c] = r.s.cells.at(c);
        psi.attach[c] = r.s.attach.at(c);
        psi.principal[c] = r.s.principal.at(c);
        auto lf = r.s.left.find(c);
        if (lf != r.s.left.end()) psi.left[c] = lf->second;
    }
    psi.ports = bv;
    psi.ports.insert(r.s.principal.at(v));
    for (const auto& d : doors_v) {
        Id cell = "w:" + d, port = "d:" + d;
        if (psi.cells.count(cell) || psi.ports.count(port)) throw Error("box_extract: fresh id collision on " + d);
        psi.cells[cell] = Cell{CellType::Why, 1};
        psi.attach[cell] = {d, port};
        psi.principal[cell] = port;
        psi.ports.insert(port);
    }
    // door counts: boxes other than v, inside B_v, that list the port
    IdSet inner_bangs;
    for (const auto& c : cells_touching(r.s, t, bv))
        if (c != v && r.s.cells.at(c).type == CellType::Bang) inner_bangs.insert(c);
    for (const auto& [c, cell] : psi.cells) {
        if (cell.type != CellType::Why) continue;
        for (const auto& p : psi.attach.at(c)) {
            if (p == psi.principal.at(c)) continue;
            int n = 0;
            for (const auto& w : inner_bangs)
                if (r.b.count(w) && r.b.at(w).count(p)) ++n;
            psi.doors[p] = n;
        }
    }
    for (const auto& w : r.s.wires)
        if (bv.count(w.first) && bv.count(w.second)) psi.wires.insert(w);

    ProofStructure out;
    out.s = remove_terminal(psi, {v});
    for (const auto& c : bangs_of(out.s)) out.b[c] = r.b.count(c) ? r.b.at(c) : IdSet{};
    return out;
}

inline std::vector<std::string> ps_violations(const ProofStructure& r) {
    auto v = ps_local_violations(r);
    if (!v.empty()) return v;
    for (const auto& c : bangs_of(r.s)) {
        try {
            auto box = box_extract_unchecked(r, c);
            for (const auto& x : ps_violations(box)) v.push_back("box of " + c + ": " + x);
        } catch (const Error& e) {
            v.push_back("box of " + c + ": " + e.what());
        }
    }
    return v;
}

inline bool is_ps(const ProofStructure& r) {
    try {
        return ps_violations(r).empty();
    } catch (const Error&) {
        return false;
    }
}

inline ProofStructure box_extract(const ProofStructure& r, const Id& v) {
    auto local = ps_local_violations(r);
    if (!local.empty()) throw Error("invalid proof-structure: " + local.front());
    auto box = box_extract_unchecked(r, v);
    auto bad = ps_violations(box);
    if (!bad.empty()) throw Error("invalid proof-structure: box of " + v + ": " + bad.front());
    return box;
}

// ---- box recovery --------------------------------------------------------

// Ports as nodes, wires and principal-to-aux cell edges.
inline std::map<Id, IdSet> port_graph(const Structure& s, const Topology& t) {
    std::map<Id, IdSet> g;
    for (const auto& p : s.ports) g[p];
    for (const auto& [a, b] : s.wires) {
        g[a].insert(b);
        g[b].insert(a);
    }
    for (const auto& [c, aux] : t.aux) {
        const auto& pri = s.principal.at(c);
        for (const auto& p : aux) {
            g[pri].insert(p);
            g[p].insert(pri);
        }
    }
    return g;
}

inline bool connected(const Structure& s) {
    if (s.ports.empty()) return true;
    auto t = topology(s);
    auto g = port_graph(s, t);
    IdSet seen{*s.ports.begin()};
    std::vector<Id> todo{*s.ports.begin()};
    while (!todo.empty()) {
        Id x = todo.back();
        todo.pop_back();
        for (const auto& y : g[x])
            if (seen.insert(y).second) todo.push_back(y);
    }
    return seen.size() == s.ports.size();
}

// p in b(v) iff the door's base depth (depth of its why principal) is at most
// depth(pri v) and p is reached from aux(v) through ports deeper than pri v.
inline ProofStructure recover_boxes(const Structure& s) {
    require_level(s, Level::lps, "recover_boxes");
    if (!connected(s)) throw Error("ambiguous boxes: structure is not connected");
    auto t = topology(s);
    auto g = port_graph(s, t);
    auto dep = all_depths(s, t);
    auto ad = aux_doors(s);
    ProofStructure r{s, {}};
    for (const auto& v : bangs_of(s)) {
        const int d = dep.at(s.principal.at(v));
        IdSet doors;
        IdSet seen;
        std::vector<Id> todo;
        for (const auto& a : t.aux.at(v))
            if (dep.at(a) > d && seen.insert(a).second) todo.push_back(a);
        auto consider = [&](const Id& p) {
            if (ad.count(p) && dep.at(p) - s.doors.at(p) <= d) doors.insert(p);
        };
        while (!todo.empty()) {
            Id x = todo.back();
            todo.pop_back();
            consider(x);
            for (const auto& y : g[x]) {
                consider(y);
                if (dep.at(y) > d && seen.insert(y).second) todo.push_back(y);
            }
        }
        r.b[v] = doors;
    }
    auto bad = ps_violations(r);
    if (!bad.empty()) throw Error("invalid proof-structure: no consistent box function (" + bad.front() + ")");
    return r;
}

}  // namespace mell
