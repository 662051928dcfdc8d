#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "value.hpp"

namespace mell {

using Id = std::string;
using IdSet = std::set<Id>;

enum class CellType { Tensor, Par, One, Bot, Bang, Why };

inline const char* type_name(CellType t) {
    switch (t) {
        case CellType::Tensor: return "tensor";
        case CellType::Par: return "par";
        case CellType::One: return "one";
        case CellType::Bot: return "bot";
        case CellType::Bang: return "bang";
        case CellType::Why: return "why";
    }
    return "?";
}

inline CellType parse_type(const std::string& s) {
    for (auto t : {CellType::Tensor, CellType::Par, CellType::One, CellType::Bot, CellType::Bang, CellType::Why})
        if (s == type_name(t)) return t;
    throw Error("unknown cell type '" + s + "'");
}

inline bool is_mult(CellType t) { return t == CellType::Tensor || t == CellType::Par; }
inline bool is_unit(CellType t) { return t == CellType::One || t == CellType::Bot; }

// -1 means free arity
inline int forced_arity(CellType t) {
    switch (t) {
        case CellType::Tensor:
        case CellType::Par: return 2;
        case CellType::One:
        case CellType::Bot: return 0;
        case CellType::Bang: return 1;
        case CellType::Why: return -1;
    }
    return -1;
}

struct Cell {
    CellType type;
    int arity;
    bool operator==(const Cell&) const = default;
};

using Wire = std::pair<Id, Id>;  // first < second

inline Wire make_wire(const Id& a, const Id& b) { return a < b ? Wire{a, b} : Wire{b, a}; }

// Ports plus wires. Validity is a separate question (see validate).
struct Structure {
    std::map<Id, Cell> cells;
    IdSet ports;
    std::map<Id, IdSet> attach;
    std::map<Id, Id> principal;
    std::map<Id, Id> left;
    std::map<Id, int> doors;
    std::set<Wire> wires;

    bool operator==(const Structure&) const = default;

    // builders
    void add_port(const Id& p) { ports.insert(p); }

    void add_cell(const Id& c, CellType t, const Id& pri, const std::vector<Id>& aux,
                  const std::vector<int>& counts = {}) {
        cells[c] = Cell{t, static_cast<int>(aux.size())};
        IdSet ps{pri};
        ports.insert(pri);
        for (const auto& a : aux) {
            ps.insert(a);
            ports.insert(a);
        }
        attach[c] = ps;
        principal[c] = pri;
        if (is_mult(t) && !aux.empty()) left[c] = aux.front();
        if (t == CellType::Why)
            for (std::size_t i = 0; i < aux.size(); ++i) doors[aux[i]] = i < counts.size() ? counts[i] : 0;
    }

    void add_wire(const Id& a, const Id& b) {
        ports.insert(a);
        ports.insert(b);
        wires.insert(make_wire(a, b));
    }
};

using Ind = std::map<Id, int>;

struct Indexed {
    Structure s;
    Ind ind;
    bool operator==(const Indexed&) const = default;
};

using Boxes = std::map<Id, IdSet>;

struct ProofStructure {
    Structure s;
    Boxes b;
    bool operator==(const ProofStructure&) const = default;
};

struct IndexedPS {
    ProofStructure r;
    Ind ind;
    bool operator==(const IndexedPS&) const = default;
    Indexed lps() const { return Indexed{r.s, ind}; }
};

// ---- derived topology ----------------------------------------------------

struct Topology {
    std::map<Id, Id> owner;
    std::map<Id, Id> partner;
    IdSet principals;
    std::map<Id, std::vector<Id>> aux;  // mult: left, right; otherwise sorted

    bool attached(const Id& p) const { return owner.count(p) != 0; }
    bool wired(const Id& p) const { return partner.count(p) != 0; }
    bool is_principal(const Id& p) const { return principals.count(p) != 0; }

    std::optional<Id> partner_of(const Id& p) const {
        auto it = partner.find(p);
        if (it == partner.end()) return std::nullopt;
        return it->second;
    }
    std::optional<Id> owner_of(const Id& p) const {
        auto it = owner.find(p);
        if (it == owner.end()) return std::nullopt;
        return it->second;
    }
};

// Throws on malformed port maps.
inline Topology topology(const Structure& s) {
    Topology t;
    for (const auto& [c, cell] : s.cells) {
        int fa = forced_arity(cell.type);
        if (fa >= 0 && cell.arity != fa)
            throw Error("cell " + c + ": arity " + std::to_string(cell.arity) + " not allowed for " + type_name(cell.type));
        if (cell.arity < 0) throw Error("cell " + c + ": negative arity");
        auto at = s.attach.find(c);
        if (at == s.attach.end()) throw Error("cell " + c + ": no attached ports");
        if (static_cast<int>(at->second.size()) != cell.arity + 1)
            throw Error("cell " + c + ": port count differs from arity+1");
        auto pr = s.principal.find(c);
        if (pr == s.principal.end() || !at->second.count(pr->second))
            throw Error("cell " + c + ": principal port missing or not attached");
        for (const auto& p : at->second) {
            if (!s.ports.count(p)) throw Error("cell " + c + ": unknown port " + p);
            if (!t.owner.emplace(p, c).second) throw Error("port " + p + " attached to two cells");
        }
        t.principals.insert(pr->second);
        std::vector<Id> aux;
        if (is_mult(cell.type)) {
            auto lf = s.left.find(c);
            if (lf == s.left.end() || !at->second.count(lf->second) || lf->second == pr->second)
                throw Error("cell " + c + ": left port missing or not auxiliary");
            aux.push_back(lf->second);
            for (const auto& p : at->second)
                if (p != pr->second && p != lf->second) aux.push_back(p);
        } else {
            if (s.left.count(c)) throw Error("cell " + c + ": left port on a non-multiplicative cell");
            for (const auto& p : at->second)
                if (p != pr->second) aux.push_back(p);
        }
        t.aux[c] = std::move(aux);
    }
    for (const auto& [c, _] : s.attach)
        if (!s.cells.count(c)) throw Error("attach entry for unknown cell " + c);
    for (const auto& [c, _] : s.principal)
        if (!s.cells.count(c)) throw Error("principal entry for unknown cell " + c);
    for (const auto& [c, _] : s.left)
        if (!s.cells.count(c)) throw Error("left entry for unknown cell " + c);
    // doors: exactly the aux ports of Why cells
    IdSet why_aux;
    for (const auto& [c, cell] : s.cells)
        if (cell.type == CellType::Why)
            for (const auto& p : t.aux[c]) why_aux.insert(p);
    for (const auto& [p, n] : s.doors) {
        if (!why_aux.count(p)) throw Error("door count on port " + p + " which is not an aux port of a why cell");
        if (n < 0) throw Error("negative door count on port " + p);
    }
    for (const auto& p : why_aux)
        if (!s.doors.count(p)) throw Error("missing door count on why aux port " + p);
    for (const auto& [a, b] : s.wires) {
        if (a == b) throw Error("wire with identical endpoints " + a);
        if (!s.ports.count(a) || !s.ports.count(b)) throw Error("wire on unknown port");
        t.partner.emplace(a, b);
        t.partner.emplace(b, a);
    }
    return t;
}

// ---- validation ----------------------------------------------------------

enum class Level { raw, pplps, plps, lps };

inline const char* level_name(Level l) {
    switch (l) {
        case Level::raw: return "raw";
        case Level::pplps: return "pplps";
        case Level::plps: return "plps";
        case Level::lps: return "lps";
    }
    return "?";
}

struct Validation {
    Level level = Level::raw;
    std::vector<std::string> violations;
};

namespace detail {

inline std::vector<std::string> pplps_violations(const Structure& s, const Topology& t, bool check_cond3) {
    std::vector<std::string> v;
    std::map<Id, int> degree;
    for (const auto& [a, b] : s.wires) {
        ++degree[a];
        ++degree[b];
        if (t.is_principal(a) && t.is_principal(b))
            v.push_back("cut-free: wire {" + a + "," + b + "} joins two principal ports");
    }
    for (const auto& [p, d] : degree)
        if (d > 1) v.push_back("disjoint wires: port " + p + " is in " + std::to_string(d) + " wires");
    for (const auto& p : s.ports) {
        if (!t.is_principal(p) && !degree.count(p)) v.push_back("non-principal port " + p + " is not wired");
        if (check_cond3 && !t.attached(p)) {
            auto q = t.partner_of(p);
            if (q && t.is_principal(*q)) v.push_back("free port " + p + " is wired to a principal port");
        }
    }
    return v;
}

}  // namespace detail

// Immediate predecessor for the "immediately below" relation; it is unique.
inline std::optional<Id> below_of(const Structure& s, const Topology& t, const Id& p) {
    auto o = t.owner_of(p);
    if (o && !t.is_principal(p)) return s.principal.at(*o);
    if (t.is_principal(p)) {
        auto q = t.partner_of(p);
        if (q && t.attached(*q) && !t.is_principal(*q)) return *q;
    }
    return std::nullopt;
}

inline std::vector<Id> above_of(const Structure& s, const Topology& t, const Id& p) {
    std::vector<Id> out;
    auto o = t.owner_of(p);
    if (o && t.is_principal(p)) {
        out = t.aux.at(*o);
    } else if (o) {
        auto q = t.partner_of(p);
        if (q && t.is_principal(*q)) out.push_back(*q);
    }
    (void)s;
    return out;
}

inline bool antisymmetric(const Structure& s, const Topology& t) {
    // each port has at most one predecessor: a cycle is found by walking down
    std::map<Id, int> state;  // 1 on current walk, 2 done
    for (const auto& p0 : s.ports) {
        if (state[p0] == 2) continue;
        std::vector<Id> walk;
        std::optional<Id> cur = p0;
        while (cur && state[*cur] == 0) {
            state[*cur] = 1;
            walk.push_back(*cur);
            cur = below_of(s, t, *cur);
        }
        if (cur && state[*cur] == 1) return false;
        for (const auto& w : walk) state[w] = 2;
    }
    return true;
}

inline IdSet conclusions(const Structure& s, const Topology& t) {
    IdSet out;
    for (const auto& p : s.ports)
        if (!(t.attached(p) && t.wired(p))) out.insert(p);
    return out;
}

inline IdSet conclusions(const Structure& s) { return conclusions(s, topology(s)); }

inline IdSet terminal_cells(const Structure& s, const Topology& t) {
    auto cs = conclusions(s, t);
    IdSet out;
    for (const auto& [c, p] : s.principal)
        if (cs.count(p)) out.insert(c);
    return out;
}

inline std::set<Wire> axioms(const Structure& s, const Topology& t) {
    std::set<Wire> out;
    for (const auto& w : s.wires)
        if (!t.is_principal(w.first) && !t.is_principal(w.second)) out.insert(w);
    return out;
}

inline IdSet axiom_ports(const Structure& s, const Topology& t) {
    IdSet out;
    for (const auto& [a, b] : axioms(s, t)) {
        out.insert(a);
        out.insert(b);
    }
    return out;
}

inline std::set<Wire> terminal_axioms(const Structure& s, const Topology& t) {
    auto cs = conclusions(s, t);
    std::set<Wire> out;
    for (const auto& w : axioms(s, t))
        if (cs.count(w.first) || cs.count(w.second)) out.insert(w);
    return out;
}

inline std::set<Wire> isolated_axioms(const Structure& s, const Topology& t) {
    auto cs = conclusions(s, t);
    std::set<Wire> out;
    for (const auto& w : axioms(s, t))
        if (cs.count(w.first) && cs.count(w.second)) out.insert(w);
    return out;
}

// Downward chain p = x0, x1, ... ending at the conclusion under p (plps level).
inline std::vector<Id> chain_below(const Structure& s, const Topology& t, const Id& p) {
    if (!s.ports.count(p)) throw Error("unknown port " + p);
    std::vector<Id> out{p};
    std::set<Id> seen{p};
    auto cur = below_of(s, t, p);
    while (cur) {
        if (!seen.insert(*cur).second) throw Error("vicious cycle below port " + p);
        out.push_back(*cur);
        cur = below_of(s, t, *cur);
    }
    return out;
}

inline Id conclusion_under(const Structure& s, const Topology& t, const Id& p) {
    return chain_below(s, t, p).back();
}

// Bang principals strictly below p, door counts of aux doors at or below p.
inline int depth(const Structure& s, const Topology& t, const Id& p) {
    auto ch = chain_below(s, t, p);
    int d = 0;
    for (std::size_t i = 0; i < ch.size(); ++i) {
        const auto& x = ch[i];
        if (i > 0 && t.is_principal(x) && s.cells.at(t.owner.at(x)).type == CellType::Bang) ++d;
        auto it = s.doors.find(x);
        if (it != s.doors.end()) d += it->second;
    }
    return d;
}

inline int depth(const Structure& s, const Id& p) { return depth(s, topology(s), p); }

inline std::map<Id, int> all_depths(const Structure& s, const Topology& t) {
    std::map<Id, int> out;
    for (const auto& p : s.ports) out[p] = depth(s, t, p);
    return out;
}

inline int structure_depth(const Structure& s) {
    auto t = topology(s);
    int d = 0;
    for (const auto& p : s.ports) d = std::max(d, depth(s, t, p));
    return d;
}

inline Validation validate(const Structure& s) {
    Validation v;
    auto t = topology(s);
    v.violations = detail::pplps_violations(s, t, true);
    if (!v.violations.empty()) return v;
    v.level = Level::pplps;
    if (!antisymmetric(s, t)) {
        v.violations.push_back("antisymmetry: the below relation has a vicious cycle");
        return v;
    }
    v.level = Level::plps;
    for (const auto& [a, b] : axioms(s, t)) {
        int da = depth(s, t, a), db = depth(s, t, b);
        if (da != db)
            v.violations.push_back("axiom {" + a + "," + b + "} has endpoint depths " + std::to_string(da) + " and " +
                                   std::to_string(db));
    }
    if (v.violations.empty()) v.level = Level::lps;
    return v;
}

inline bool is_lps(const Structure& s) {
    try {
        return validate(s).level == Level::lps;
    } catch (const Error&) {
        return false;
    }
}

inline void require_level(const Structure& s, Level at_least, const std::string& what) {
    auto v = validate(s);
    if (v.level < at_least) {
        std::string msg = what + ": structure is " + level_name(v.level) + ", needs " + level_name(at_least);
        if (!v.violations.empty()) msg += " (" + v.violations.front() + ")";
        throw Error(msg);
    }
}

inline bool valid_ind(const Structure& s, const Ind& ind) {
    auto cs = conclusions(s);
    if (ind.size() != cs.size()) return false;
    std::set<int> seen;
    for (const auto& [p, i] : ind) {
        if (!cs.count(p) || i < 1 || i > static_cast<int>(cs.size())) return false;
        seen.insert(i);
    }
    return seen.size() == cs.size();
}

inline std::vector<Id> by_index(const Ind& ind) {
    std::vector<Id> out(ind.size());
    for (const auto& [p, i] : ind) out.at(static_cast<std::size_t>(i - 1)) = p;
    return out;
}

// conclusions numbered in id order
inline Ind default_ind(const Structure& s) {
    Ind ind;
    int i = 0;
    for (const auto& p : conclusions(s)) ind[p] = ++i;
    return ind;
}

// ---- above --------------------------------------------------------------

inline IdSet ports_above(const Structure& s, const Topology& t, const Id& p) {
    IdSet seen{p};
    std::vector<Id> todo{p};
    while (!todo.empty()) {
        Id x = todo.back();
        todo.pop_back();
        for (const auto& y : above_of(s, t, x))
            if (seen.insert(y).second) todo.push_back(y);
    }
    return seen;
}

inline bool has_axiom_above(const Structure& s, const Topology& t, const Id& p) {
    auto ax = axiom_ports(s, t);
    for (const auto& q : ports_above(s, t, p))
        if (ax.count(q)) return true;
    return false;
}

inline bool has_axiom_above(const Structure& s, const Id& p) { return has_axiom_above(s, topology(s), p); }

// ---- measures -----------------------------------------------------------

struct Measure {
    int cosize = 0;
    std::pair<int, int> mes{0, 0};
};

inline Measure measure(const Structure& s) {
    Measure m;
    int arities = 0, doors = 0;
    for (const auto& [c, cell] : s.cells)
        if (cell.type == CellType::Why) {
            m.cosize = std::max(m.cosize, cell.arity);
            arities += cell.arity;
        }
    for (const auto& [p, n] : s.doors) doors += n;
    m.mes = {arities, static_cast<int>(s.ports.size()) + doors};
    return m;
}

// ---- classification ------------------------------------------------------

enum class Klass { empty, ax, mult, unit, weak, der, contr, contrunit, bangunit, cbox };

inline const char* class_name(Klass k) {
    switch (k) {
        case Klass::empty: return "empty";
        case Klass::ax: return "ax";
        case Klass::mult: return "mult";
        case Klass::unit: return "unit";
        case Klass::weak: return "weak";
        case Klass::der: return "der";
        case Klass::contr: return "contr";
        case Klass::contrunit: return "contrunit";
        case Klass::bangunit: return "bangunit";
        case Klass::cbox: return "cbox";
    }
    return "?";
}

inline bool is_weakening(const Structure& s, const Id& c) {
    const auto& cell = s.cells.at(c);
    return cell.type == CellType::Why && cell.arity == 0;
}

inline bool is_dereliction(const Structure& s, const Topology& t, const Id& c) {
    const auto& cell = s.cells.at(c);
    return cell.type == CellType::Why && cell.arity == 1 && s.doors.at(t.aux.at(c).front()) == 0;
}

inline bool is_contraction(const Structure& s, const Topology& t, const Id& c) {
    const auto& cell = s.cells.at(c);
    if (cell.type != CellType::Why || cell.arity <= 1) return false;
    for (const auto& p : t.aux.at(c))
        if (s.doors.at(p) == 0) return true;
    return false;
}

inline bool is_door_contraction(const Structure& s, const Topology& t, const Id& c) {
    const auto& cell = s.cells.at(c);
    if (cell.type != CellType::Why || cell.arity < 1) return false;
    for (const auto& p : t.aux.at(c))
        if (s.doors.at(p) == 0) return false;
    return true;
}

// Terminal cell witnessing class k (smallest id), if any.
inline std::optional<Id> class_witness(const Structure& s, const Topology& t, Klass k) {
    auto term = terminal_cells(s, t);
    for (const auto& c : term) {
        const auto& cell = s.cells.at(c);
        switch (k) {
            case Klass::mult:
                if (is_mult(cell.type)) return c;
                break;
            case Klass::unit:
                if (is_unit(cell.type)) return c;
                break;
            case Klass::weak:
                if (is_weakening(s, c)) return c;
                break;
            case Klass::der:
                if (is_dereliction(s, t, c)) return c;
                break;
            case Klass::contr:
                if (is_contraction(s, t, c)) return c;
                break;
            case Klass::contrunit:
                if (cell.type == CellType::Why)
                    for (const auto& p : t.aux.at(c))
                        if (s.doors.at(p) >= 1 && !has_axiom_above(s, t, p)) return c;
                break;
            case Klass::bangunit:
                if (cell.type == CellType::Bang && !has_axiom_above(s, t, t.aux.at(c).front())) return c;
                break;
            default: break;
        }
    }
    return std::nullopt;
}

inline Klass classify(const Structure& s) {
    auto t = topology(s);
    if (s.wires.empty()) return Klass::empty;
    if (!isolated_axioms(s, t).empty()) return Klass::ax;
    for (auto k : {Klass::mult, Klass::unit, Klass::weak, Klass::der, Klass::contr, Klass::contrunit, Klass::bangunit})
        if (class_witness(s, t, k)) return k;
    return Klass::cbox;
}

// ---- transformations -----------------------------------------------------

namespace detail {

// The omega closure: drop conclusions wired to a principal port, with their wire.
// Returns the removed ports, each mapped to the principal port it exposed.
inline std::map<Id, Id> omega(Structure& s) {
    auto t = topology(s);
    std::map<Id, Id> removed;
    for (const auto& p : s.ports) {
        if (t.attached(p) && t.wired(p)) continue;
        auto q = t.partner_of(p);
        if (q && t.is_principal(*q)) removed[p] = *q;
    }
    for (const auto& [p, q] : removed) {
        s.ports.erase(p);
        s.wires.erase(make_wire(p, q));
    }
    return removed;
}

inline void erase_cell(Structure& s, const Id& c) {
    const Id pri = s.principal.at(c);
    for (const auto& p : s.attach.at(c)) s.doors.erase(p);
    s.cells.erase(c);
    s.attach.erase(c);
    s.principal.erase(c);
    s.left.erase(c);
    s.ports.erase(pri);
    for (auto it = s.wires.begin(); it != s.wires.end();) {
        if (it->first == pri || it->second == pri) it = s.wires.erase(it);
        else ++it;
    }
}

}  // namespace detail

// Removal of terminal cells followed by omega. Allowed sets: one multiplicative
// cell, one dereliction, one 0-ary cell, or a set of bangs.
struct Removal {
    Structure result;
    std::map<Id, Id> exposed;  // removed port -> principal port it exposed
};

inline Removal remove_terminal_detailed(const Structure& s, const IdSet& cs) {
    auto t = topology(s);
    auto term = terminal_cells(s, t);
    bool all_bangs = true;
    for (const auto& c : cs) {
        if (!s.cells.count(c)) throw Error("remove_terminal: unknown cell " + c);
        if (!term.count(c)) throw Error("remove_terminal: cell " + c + " is not terminal");
        if (s.cells.at(c).type != CellType::Bang) all_bangs = false;
    }
    if (!all_bangs) {
        if (cs.size() != 1) throw Error("remove_terminal: several cells that are not all bangs");
        const Id& c = *cs.begin();
        const auto& cell = s.cells.at(c);
        bool ok = is_mult(cell.type) || is_unit(cell.type) || is_weakening(s, c) || is_dereliction(s, t, c);
        if (!ok) throw Error("remove_terminal: cell " + c + " is neither multiplicative, unit, weakening nor dereliction");
    }
    Removal out{s, {}};
    for (const auto& c : cs) detail::erase_cell(out.result, c);
    out.exposed = detail::omega(out.result);
    return out;
}

inline Structure remove_terminal(const Structure& s, const IdSet& cs) { return remove_terminal_detailed(s, cs).result; }

// Phi[l]
inline Structure reduce_isolated(const Structure& s, const Id& l) {
    auto t = topology(s);
    if (!s.cells.count(l)) throw Error("reduce_isolated: unknown cell " + l);
    if (!terminal_cells(s, t).count(l)) throw Error("reduce_isolated: cell " + l + " is not terminal");
    const auto& cell = s.cells.at(l);
    if (cell.type == CellType::Bang) {
        if (has_axiom_above(s, t, s.principal.at(l))) return s;
        return remove_terminal(s, {l});
    }
    if (cell.type != CellType::Why) throw Error("reduce_isolated: cell " + l + " is neither bang nor why");
    Structure out = s;
    for (const auto& q : t.aux.at(l))
        if (s.doors.at(q) >= 1 && !has_axiom_above(s, t, q)) out.doors[q] = s.doors.at(q) - 1;
    return out;
}

// One layer of boxes removed (cbox only).
inline Structure strip_layer(const Structure& s) {
    if (classify(s) != Klass::cbox) throw Error("strip_layer: structure is not in the cbox class");
    auto t = topology(s);
    Structure mid = s;
    IdSet bangs;
    for (const auto& c : terminal_cells(s, t)) {
        if (is_door_contraction(s, t, c))
            for (const auto& p : t.aux.at(c)) mid.doors[p] -= 1;
        if (s.cells.at(c).type == CellType::Bang) bangs.insert(c);
    }
    return remove_terminal(mid, bangs);
}

// ---- indexed transformations --------------------------------------------

namespace detail {

// new conclusions inherit the index of the removed conclusion they sit above
inline Ind reindex_under(const Structure& before, const Ind& ind, const Structure& after, const Removal* rem) {
    auto tb = topology(before);
    auto ta = topology(after);
    Ind out;
    std::map<Id, Id> exposed_by;
    if (rem)
        for (const auto& [p, q] : rem->exposed) exposed_by[q] = p;
    for (const auto& c : conclusions(after, ta)) {
        Id src = c;
        auto it = exposed_by.find(c);
        if (it != exposed_by.end()) src = it->second;
        if (before.ports.count(src)) {
            auto ind_it = ind.find(conclusion_under(before, tb, src));
            if (ind_it == ind.end()) throw Error("reindex: no index under port " + src);
            out[c] = ind_it->second;
        }
    }
    return out;
}

}  // namespace detail

inline Indexed strip_layer(const Indexed& x) {
    if (classify(x.s) != Klass::cbox) throw Error("strip_layer: structure is not in the cbox class");
    Structure mid = x.s;
    auto tt = topology(x.s);
    IdSet bangs;
    for (const auto& c : terminal_cells(x.s, tt)) {
        if (is_door_contraction(x.s, tt, c))
            for (const auto& p : tt.aux.at(c)) mid.doors[p] -= 1;
        if (x.s.cells.at(c).type == CellType::Bang) bangs.insert(c);
    }
    auto rem = remove_terminal_detailed(mid, bangs);
    return Indexed{rem.result, detail::reindex_under(mid, x.ind, rem.result, &rem)};
}

inline Indexed reduce_isolated(const Indexed& x, const Id& l) {
    Structure r = reduce_isolated(x.s, l);
    if (r.cells.size() == x.s.cells.size()) return Indexed{r, x.ind};
    auto rem = remove_terminal_detailed(x.s, {l});
    return Indexed{rem.result, detail::reindex_under(x.s, x.ind, rem.result, &rem)};
}

}  // namespace mell
