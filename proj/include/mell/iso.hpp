#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "experiment.hpp"
#include "structure.hpp"
#include "value.hpp"

namespace mell {

// ---- value matching under an atom renaming -------------------------------

namespace detail {

struct AtomBij {
    std::map<Atom, Atom> fwd, bwd;

    bool bind(const Atom& a, const Atom& b) {
        auto f = fwd.find(a);
        if (f != fwd.end()) return f->second == b;
        if (bwd.count(b)) return false;
        fwd.emplace(a, b);
        bwd.emplace(b, a);
        return true;
    }
};

// Finds one injection rho with rho . x = y for every goal pair (x, y).
class ValueMatcher {
    struct Goal {
        bool bag = false;
        Value a, b;
        std::vector<Value> xs, ys;
    };

    static bool compatible(const Value& x, const Value& y, const AtomBij& m) {
        if (x.shape() != y.shape() || x.kind() != y.kind() || x.pos() != y.pos()) return false;
        if (!x.has_atoms() || !y.has_atoms()) return x == y;
        switch (x.kind()) {
            case Kind::Atom: {
                auto f = m.fwd.find(x.as_atom());
                if (f != m.fwd.end()) return f->second == y.as_atom();
                return !m.bwd.count(y.as_atom());
            }
            case Kind::Unit: return true;
            case Kind::Pair: return compatible(x.left(), y.left(), m) && compatible(x.right(), y.right(), m);
            case Kind::Bag: return x.items().size() == y.items().size();
        }
        return false;
    }

    // atoms, units and pairs are decomposed; bags become bag goals
    static bool simplify(std::vector<Goal>& goals, AtomBij& m) {
        std::vector<Goal> singles;
        std::vector<Goal> bags;
        for (auto& g : goals) (g.bag ? bags : singles).push_back(std::move(g));
        while (!singles.empty()) {
            Goal g = std::move(singles.back());
            singles.pop_back();
            const Value& x = g.a;
            const Value& y = g.b;
            if (x.shape() != y.shape() || x.kind() != y.kind() || x.pos() != y.pos()) return false;
            if (!x.has_atoms() || !y.has_atoms()) {
                if (!(x == y)) return false;
                continue;
            }
            switch (x.kind()) {
                case Kind::Atom:
                    if (!m.bind(x.as_atom(), y.as_atom())) return false;
                    break;
                case Kind::Unit: break;
                case Kind::Pair:
                    singles.push_back(Goal{false, x.left(), y.left(), {}, {}});
                    singles.push_back(Goal{false, x.right(), y.right(), {}, {}});
                    break;
                case Kind::Bag: {
                    if (x.items().size() != y.items().size()) return false;
                    if (star_part(x.items()) != star_part(y.items())) return false;
                    Goal b{true, {}, {}, atom_part(x.items()), atom_part(y.items())};
                    if (b.xs.size() != b.ys.size()) return false;
                    if (!b.xs.empty()) bags.push_back(std::move(b));
                    break;
                }
            }
        }
        goals = std::move(bags);
        return true;
    }

public:
    std::size_t steps = 0;

    bool solve(std::vector<Goal> goals, AtomBij& m) {
        for (;;) {
            ++steps;
            if (!simplify(goals, m)) return false;
            if (goals.empty()) return true;
            // most constrained element over all bag goals
            std::size_t best_g = 0, best_x = 0, best_n = SIZE_MAX;
            std::vector<std::size_t> best_c;
            for (std::size_t gi = 0; gi < goals.size() && best_n > 1; ++gi) {
                const auto& g = goals[gi];
                for (std::size_t xi = 0; xi < g.xs.size(); ++xi) {
                    std::vector<std::size_t> c;
                    for (std::size_t yi = 0; yi < g.ys.size(); ++yi) {
                        if (yi > 0 && g.ys[yi] == g.ys[yi - 1]) continue;
                        if (compatible(g.xs[xi], g.ys[yi], m)) c.push_back(yi);
                    }
                    if (c.empty()) return false;
                    if (c.size() < best_n) {
                        best_n = c.size();
                        best_g = gi;
                        best_x = xi;
                        best_c = std::move(c);
                        if (best_n == 1) break;
                    }
                }
            }
            auto take = [&](std::vector<Goal>& gs, std::size_t yi) {
                Goal& g = gs[best_g];
                Goal single{false, g.xs[best_x], g.ys[yi], {}, {}};
                g.xs.erase(g.xs.begin() + static_cast<long>(best_x));
                g.ys.erase(g.ys.begin() + static_cast<long>(yi));
                if (g.xs.empty()) gs.erase(gs.begin() + static_cast<long>(best_g));
                gs.push_back(std::move(single));
            };
            if (best_n == 1) {
                take(goals, best_c.front());
                continue;
            }
            for (auto yi : best_c) {
                auto gs = goals;
                AtomBij m2 = m;
                take(gs, yi);
                if (solve(std::move(gs), m2)) {
                    m = std::move(m2);
                    return true;
                }
            }
            return false;
        }
    }

    bool match_values(const std::vector<Value>& xs, const std::vector<Value>& ys, AtomBij& m) {
        if (xs.size() != ys.size()) return false;
        std::vector<Goal> goals;
        for (std::size_t i = 0; i < xs.size(); ++i) goals.push_back(Goal{false, xs[i], ys[i], {}, {}});
        return solve(std::move(goals), m);
    }
};

// tuple of multisets as one value: +(bag, +(bag, ... +*))
inline Value encode_tuple(const std::vector<Multiset>& r) {
    Value out = Value::unit(true);
    for (auto it = r.rbegin(); it != r.rend(); ++it) out = Value::pair(true, Value::bag(true, *it), out);
    return out;
}

inline std::optional<PInj> match_to_pinj(const std::vector<Value>& xs, const std::vector<Value>& ys) {
    AtomBij m;
    ValueMatcher vm;
    if (!vm.match_values(xs, ys, m)) return std::nullopt;
    return m.fwd;
}

}  // namespace detail

// rho with rho . r = r'
inline std::optional<PInj> result_iso(const Tuple& r, const Tuple& r2) { return detail::match_to_pinj(r, r2); }

inline bool is_result_iso(const Tuple& r, const Tuple& r2, const PInj& rho) {
    if (!is_injective(rho)) return false;
    try {
        return apply_pinj(rho, r) == r2;
    } catch (const Error&) {
        return false;
    }
}

inline std::optional<PInj> multiset_iso(const Multiset& a, const Multiset& b) {
    return detail::match_to_pinj({Value::bag(true, a)}, {Value::bag(true, b)});
}

inline std::optional<PInj> tuple_multiset_iso(const std::vector<Multiset>& a, const std::vector<Multiset>& b) {
    if (a.size() != b.size()) return std::nullopt;
    return detail::match_to_pinj({detail::encode_tuple(a)}, {detail::encode_tuple(b)});
}

using TupleSet = std::set<std::vector<Multiset>>;

// one rho sending the set onto the other set
inline std::optional<PInj> tuple_set_iso(const TupleSet& a, const TupleSet& b) {
    if (a.size() != b.size()) return std::nullopt;
    Multiset xa, xb;
    for (const auto& r : a) xa.push_back(detail::encode_tuple(r));
    for (const auto& r : b) xb.push_back(detail::encode_tuple(r));
    return detail::match_to_pinj({Value::bag(true, xa)}, {Value::bag(true, xb)});
}

// sets of sets of tuples, one level up
inline std::optional<PInj> tuple_set_set_iso(const std::set<TupleSet>& a, const std::set<TupleSet>& b) {
    if (a.size() != b.size()) return std::nullopt;
    auto enc = [](const std::set<TupleSet>& s) {
        Multiset out;
        for (const auto& t : s) {
            Multiset inner;
            for (const auto& r : t) inner.push_back(detail::encode_tuple(r));
            out.push_back(Value::bag(true, inner));
        }
        return Value::bag(true, out);
    };
    return detail::match_to_pinj({enc(a)}, {enc(b)});
}

// ---- structure isomorphism -----------------------------------------------

struct StructIso {
    std::map<Id, Id> cells;
    std::map<Id, Id> ports;
    bool operator==(const StructIso&) const = default;
};

namespace detail {

inline std::size_t smix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

// Hash of everything at or above p, blind to ids.
inline std::map<Id, std::size_t> upward_signatures(const Structure& s, const Topology& t) {
    std::map<Id, std::size_t> sig;
    std::function<std::size_t(const Id&)> go = [&](const Id& p) -> std::size_t {
        auto memo = sig.find(p);
        if (memo != sig.end()) return memo->second;
        std::size_t h = smix(t.attached(p) ? 11 : 13, t.is_principal(p) ? 17 : 19);
        auto d = s.doors.find(p);
        h = smix(h, d == s.doors.end() ? 0 : static_cast<std::size_t>(d->second) + 1);
        auto q = t.partner_of(p);
        h = smix(h, !q ? 1 : (t.is_principal(*q) ? 2 : 3));
        if (t.is_principal(p)) {
            const Id c = t.owner.at(p);
            const auto& cell = s.cells.at(c);
            h = smix(h, static_cast<std::size_t>(cell.type) * 31 + static_cast<std::size_t>(cell.arity));
            std::vector<std::size_t> kids;
            for (const auto& a : t.aux.at(c)) kids.push_back(go(a));
            if (cell.type == CellType::Why) std::sort(kids.begin(), kids.end());
            for (auto k : kids) h = smix(h, k);
        } else if (q && t.is_principal(*q)) {
            h = smix(h, go(*q));
        }
        sig[p] = h;
        return h;
    };
    for (const auto& p : s.ports) go(p);
    return sig;
}

struct IsoSearch {
    const Structure& A;
    const Structure& B;
    Topology ta, tb;
    std::map<Id, std::size_t> sa, sb;
    std::function<bool(const Id&, const Id&)> pair_ok;
    std::function<bool(const StructIso&)> accept;
    std::optional<StructIso> found;

    struct State {
        std::map<Id, Id> pf, pb, cf, cb;
        std::vector<std::pair<Id, Id>> todo;
        std::vector<std::pair<Id, Id>> whys;
    };

    IsoSearch(const Structure& a, const Structure& b) : A(a), B(b), ta(topology(a)), tb(topology(b)) {
        sa = upward_signatures(A, ta);
        sb = upward_signatures(B, tb);
    }

    bool bind_cell(State& st, const Id& c, const Id& d) {
        auto f = st.cf.find(c);
        if (f != st.cf.end()) return f->second == d;
        if (st.cb.count(d)) return false;
        if (!(A.cells.at(c) == B.cells.at(d))) return false;
        st.cf.emplace(c, d);
        st.cb.emplace(d, c);
        st.todo.emplace_back(A.principal.at(c), B.principal.at(d));
        const auto& xa = ta.aux.at(c);
        const auto& xb = tb.aux.at(d);
        if (A.cells.at(c).type == CellType::Why) {
            st.whys.emplace_back(c, d);
        } else {
            for (std::size_t i = 0; i < xa.size(); ++i) st.todo.emplace_back(xa[i], xb[i]);
        }
        return true;
    }

    bool drain(State& st) {
        while (!st.todo.empty()) {
            auto [p, q] = st.todo.back();
            st.todo.pop_back();
            auto f = st.pf.find(p);
            if (f != st.pf.end()) {
                if (f->second != q) return false;
                continue;
            }
            if (st.pb.count(q)) return false;
            if (sa.at(p) != sb.at(q)) return false;
            if (pair_ok && !pair_ok(p, q)) return false;
            st.pf.emplace(p, q);
            st.pb.emplace(q, p);
            auto pa = ta.partner_of(p), pq = tb.partner_of(q);
            if (pa.has_value() != pq.has_value()) return false;
            if (pa) st.todo.emplace_back(*pa, *pq);
            auto oa = ta.owner_of(p), ob = tb.owner_of(q);
            if (oa.has_value() != ob.has_value()) return false;
            if (oa && !bind_cell(st, *oa, *ob)) return false;
        }
        return true;
    }

    bool run(State st) {
        if (!drain(st)) return false;
        while (!st.whys.empty()) {
            auto [c, d] = st.whys.back();
            std::optional<Id> open;
            for (const auto& a : ta.aux.at(c))
                if (!st.pf.count(a)) {
                    open = a;
                    break;
                }
            if (!open) {
                st.whys.pop_back();
                continue;
            }
            for (const auto& b : tb.aux.at(d)) {
                if (st.pb.count(b) || A.doors.at(*open) != B.doors.at(b) || sa.at(*open) != sb.at(b)) continue;
                State next = st;
                next.todo.emplace_back(*open, b);
                if (run(std::move(next))) return true;
            }
            return false;
        }
        if (st.pf.size() != A.ports.size() || st.cf.size() != A.cells.size()) return false;
        StructIso iso{st.cf, st.pf};
        if (accept && !accept(iso)) return false;
        found = std::move(iso);
        return true;
    }
};

inline bool same_sizes(const Structure& a, const Structure& b) {
    return a.cells.size() == b.cells.size() && a.ports.size() == b.ports.size() && a.wires.size() == b.wires.size();
}

}  // namespace detail

using IsoAccept = std::function<bool(const StructIso&)>;
using PairFilter = std::function<bool(const Id&, const Id&)>;

// Exhaustive search; accept can reject a complete candidate to continue the search.
inline std::optional<StructIso> iso_structure(const Indexed& a, const Indexed& b, const IsoAccept& accept = nullptr,
                                              const PairFilter& pair_ok = nullptr) {
    require_level(a.s, Level::plps, "iso_structure");
    require_level(b.s, Level::plps, "iso_structure");
    if (!detail::same_sizes(a.s, b.s) || a.ind.size() != b.ind.size()) return std::nullopt;
    detail::IsoSearch search(a.s, b.s);
    search.accept = accept;
    search.pair_ok = pair_ok;
    detail::IsoSearch::State st;
    auto ca = by_index(a.ind), cb = by_index(b.ind);
    for (std::size_t i = 0; i < ca.size(); ++i) st.todo.emplace_back(ca[i], cb[i]);
    if (!search.run(std::move(st))) return std::nullopt;
    return search.found;
}

inline bool b_square(const Boxes& ba, const Boxes& bb, const StructIso& phi) {
    for (const auto& [c, d] : phi.cells) {
        auto ia = ba.find(c), ib = bb.find(d);
        IdSet xa = ia == ba.end() ? IdSet{} : ia->second;
        IdSet xb = ib == bb.end() ? IdSet{} : ib->second;
        IdSet img;
        for (const auto& p : xa) img.insert(phi.ports.at(p));
        if (img != xb) return false;
    }
    return true;
}

inline std::optional<StructIso> iso_ps(const IndexedPS& a, const IndexedPS& b) {
    return iso_structure(a.lps(), b.lps(), [&](const StructIso& phi) { return b_square(a.r.b, b.r.b, phi); });
}

// Independent re-check of every commuting square.
inline std::vector<std::string> iso_violations(const Indexed& a, const Indexed& b, const StructIso& phi,
                                               const Boxes* ba = nullptr, const Boxes* bb = nullptr) {
    std::vector<std::string> v;
    auto bij = [&](const std::map<Id, Id>& m, const auto& dom, const auto& cod, const std::string& what) {
        std::set<Id> img;
        for (const auto& [x, y] : m) img.insert(y);
        std::set<Id> d, c;
        for (const auto& x : dom) d.insert(x.first);
        for (const auto& x : cod) c.insert(x.first);
        std::set<Id> keys;
        for (const auto& [x, y] : m) keys.insert(x);
        if (keys != d || img != c || img.size() != m.size()) v.push_back(what + " map is not a bijection");
    };
    bij(phi.cells, a.s.cells, b.s.cells, "cell");
    {
        std::map<Id, int> pa, pb;
        for (const auto& p : a.s.ports) pa[p];
        for (const auto& p : b.s.ports) pb[p];
        bij(phi.ports, pa, pb, "port");
    }
    if (!v.empty()) return v;
    auto P = [&](const Id& p) { return phi.ports.at(p); };
    for (const auto& [c, cell] : a.s.cells) {
        const Id d = phi.cells.at(c);
        if (!(b.s.cells.at(d) == cell)) v.push_back("cell " + c + ": type or arity");
        IdSet img;
        for (const auto& p : a.s.attach.at(c)) img.insert(P(p));
        if (img != b.s.attach.at(d)) v.push_back("cell " + c + ": attached ports");
        if (P(a.s.principal.at(c)) != b.s.principal.at(d)) v.push_back("cell " + c + ": principal port");
        auto la = a.s.left.find(c);
        auto lb = b.s.left.find(d);
        if ((la == a.s.left.end()) != (lb == b.s.left.end()) || (la != a.s.left.end() && P(la->second) != lb->second))
            v.push_back("cell " + c + ": left port");
    }
    for (const auto& [p, n] : a.s.doors) {
        auto it = b.s.doors.find(P(p));
        if (it == b.s.doors.end() || it->second != n) v.push_back("port " + p + ": door count");
    }
    if (a.s.doors.size() != b.s.doors.size()) v.push_back("door count domains differ");
    std::set<Wire> img;
    for (const auto& [x, y] : a.s.wires) img.insert(make_wire(P(x), P(y)));
    if (img != b.s.wires) v.push_back("wires");
    for (const auto& [p, i] : a.ind) {
        auto it = b.ind.find(P(p));
        if (it == b.ind.end() || it->second != i) v.push_back("conclusion " + p + ": index");
    }
    if (ba && bb && !b_square(*ba, *bb, phi)) v.push_back("box function square");
    return v;
}

// ---- experiment isomorphisms ---------------------------------------------

struct ExpIso {
    StructIso phi;
    PInj rho, rho2;
};

inline std::optional<StructIso> kexp_iso(const Indexed& a, const KExperiment& e, const Indexed& b,
                                         const KExperiment& e2) {
    if (e.k != e2.k) return std::nullopt;
    return iso_structure(a, b, nullptr,
                         [&](const Id& p, const Id& q) { return e.labels.at(p) == e2.labels.at(q); });
}

inline PInj identity_on(const std::set<Atom>& atoms) {
    PInj out;
    for (const auto& a : atoms) out.emplace(a, a);
    return out;
}

inline std::set<Atom> label_atoms(const KExperiment& e) {
    std::set<Atom> s;
    for (const auto& [p, v] : e.labels) collect_atoms(v, s);
    return s;
}

// rho with rho . e(p) = e'(phi p) for every port p, if any
inline std::optional<PInj> labels_iso_along(const Indexed& a, const KExperiment& e, const KExperiment& e2,
                                            const StructIso& phi) {
    Tuple xs, ys;
    for (const auto& p : a.s.ports) {
        xs.push_back(e.labels.at(p));
        ys.push_back(e2.labels.at(phi.ports.at(p)));
    }
    return result_iso(xs, ys);
}

inline std::optional<ExpIso> kexp_iso_at(const Indexed& a, const KExperiment& e, const Indexed& b,
                                         const KExperiment& e2) {
    if (e.k != e2.k) return std::nullopt;
    std::optional<PInj> rho;
    auto phi = iso_structure(
        a, b,
        [&](const StructIso& f) {
            rho = labels_iso_along(a, e, e2, f);
            return rho.has_value();
        },
        [&](const Id& p, const Id& q) { return e.labels.at(p).shape() == e2.labels.at(q).shape(); });
    if (!phi) return std::nullopt;
    return ExpIso{*phi, *rho, identity_on(label_atoms(e2))};
}

inline std::vector<std::string> exp_iso_violations(const Indexed& a, const KExperiment& e, const Indexed& b,
                                                   const KExperiment& e2, const ExpIso& w) {
    auto v = iso_violations(a, b, w.phi);
    if (!v.empty()) return v;
    if (e.k != e2.k) v.push_back("different k");
    if (!is_injective(w.rho) || !is_injective(w.rho2)) v.push_back("renaming is not injective");
    for (const auto& p : a.s.ports) {
        try {
            if (!(apply_pinj(w.rho, e.labels.at(p)) == apply_pinj(w.rho2, e2.labels.at(w.phi.ports.at(p)))))
                v.push_back("port " + p + ": labels differ after renaming");
        } catch (const Error& err) {
            v.push_back("port " + p + ": " + err.what());
        }
    }
    return v;
}

// ---- witness report --------------------------------------------------------

inline std::string format_pinj(const PInj& rho) {
    std::string out;
    for (const auto& [a, b] : rho) out += "  " + to_string(a) + " -> " + to_string(b) + "\n";
    return out;
}

inline std::string format_iso(const StructIso& phi) {
    std::string out = "cells:\n";
    for (const auto& [a, b] : phi.cells) out += "  " + a + " -> " + b + "\n";
    out += "ports:\n";
    for (const auto& [a, b] : phi.ports) out += "  " + a + " -> " + b + "\n";
    return out;
}

}  // namespace mell
