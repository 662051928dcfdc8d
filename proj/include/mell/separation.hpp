#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "experiment.hpp"
#include "iso.hpp"
#include "proof_structure.hpp"
#include "structure.hpp"
#include "value.hpp"

namespace mell {

// ---- splitting results ---------------------------------------------------

// Q(r, a): alpha1 ~ alpha2 iff (r, alpha1) and (r, alpha2) are isomorphic
inline std::vector<Multiset> q_split(const Tuple& r, const Multiset& a) {
    std::vector<Multiset> classes;
    for (const auto& x : a) {
        bool placed = false;
        for (auto& cl : classes) {
            Tuple r1 = r, r2 = r;
            r1.push_back(cl.front());
            r2.push_back(x);
            if (cl.front() == x || result_iso(r1, r2)) {
                cl.push_back(x);
                placed = true;
                break;
            }
        }
        if (!placed) classes.push_back({x});
    }
    for (auto& cl : classes) cl = normalized(cl);
    std::sort(classes.begin(), classes.end());
    return classes;
}

// Classes of values linked by chains of shared atoms.
inline std::vector<Multiset> bridges(const Multiset& d0) {
    auto vals = support(d0);
    for (const auto& v : vals)
        if (!v.has_atoms()) throw Error("bridges: atom-free element " + to_string(v));
    std::vector<std::size_t> parent(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) parent[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
        return parent[i] == i ? i : parent[i] = find(parent[i]);
    };
    std::map<Atom, std::size_t> seen;
    for (std::size_t i = 0; i < vals.size(); ++i)
        for (const auto& a : atoms_of(vals[i])) {
            auto [it, fresh] = seen.emplace(a, i);
            if (!fresh) parent[find(i)] = find(it->second);
        }
    std::map<std::size_t, Multiset> groups;
    for (std::size_t i = 0; i < vals.size(); ++i) groups[find(i)].push_back(vals[i]);
    std::vector<Multiset> out;
    for (auto& [_, g] : groups) out.push_back(normalized(g));
    std::sort(out.begin(), out.end());
    return out;
}

inline TupleSet bridge_split(const std::vector<Multiset>& a) {
    Multiset all;
    for (const auto& x : a) all = msum(all, x);
    TupleSet out;
    for (const auto& cls : bridges(all)) {
        std::vector<Multiset> t;
        for (const auto& x : a) {
            Multiset part;
            for (const auto& v : x)
                if (std::binary_search(cls.begin(), cls.end(), v)) part.push_back(v);
            t.push_back(part);
        }
        out.insert(t);
    }
    return out;
}

inline std::set<TupleSet> r_quotient(const TupleSet& s) {
    std::vector<TupleSet> classes;
    for (const auto& r : s) {
        bool placed = false;
        for (auto& cl : classes)
            if (tuple_multiset_iso(*cl.begin(), r)) {
                cl.insert(r);
                placed = true;
                break;
            }
        if (!placed) classes.push_back({r});
    }
    return {classes.begin(), classes.end()};
}

// ---- the matching recursion ----------------------------------------------

struct KeyTrace {
    std::vector<std::string> path;  // cases taken, outermost first
    std::string reason;

    std::string str() const {
        std::string out;
        for (const auto& p : path) out += p + " > ";
        return out + reason;
    }
};

struct KeyResult {
    std::optional<ExpIso> witness;
    KeyTrace trace;
    long levels = 0;
};

namespace detail {

inline Id at_index(const Ind& ind, int i) {
    for (const auto& [p, j] : ind)
        if (j == i) return p;
    throw Error("no conclusion with index " + std::to_string(i));
}

inline std::map<Id, Value> labels_on(const Structure& s, const KExperiment& e) {
    auto t = topology(s);
    std::map<Id, Value> out;
    for (const auto& [a, b] : axioms(s, t)) out.emplace(a, e.labels.at(a));
    return out;
}

// remaining old conclusions shift past i0, the listed new ones are appended
inline Ind peel_ind(const Indexed& x, int i0, const Removal& rem, const std::vector<Id>& fresh) {
    auto t = topology(rem.result);
    auto concl = conclusions(rem.result, t);
    Ind out;
    for (const auto& [p, i] : x.ind) {
        if (i == i0 || !concl.count(p)) continue;
        out[p] = i > i0 ? i - 1 : i;
    }
    int n = static_cast<int>(out.size());
    for (const auto& a : fresh) {
        auto it = rem.exposed.find(a);
        out[it == rem.exposed.end() ? a : it->second] = ++n;
    }
    return out;
}

struct Detached {
    Indexed x;
    Removal rem;
};

// aux port p of why c becomes a new last conclusion
inline Detached detach_aux(const Indexed& x, const Id& c, const Id& p) {
    Structure s = x.s;
    s.attach.at(c).erase(p);
    s.cells.at(c).arity -= 1;
    s.doors.erase(p);
    Removal rem{s, {}};
    rem.exposed = omega(rem.result);
    Ind ind = x.ind;
    auto it = rem.exposed.find(p);
    ind[it == rem.exposed.end() ? p : it->second] = static_cast<int>(x.ind.size()) + 1;
    return {Indexed{rem.result, ind}, rem};
}

struct KeyMatcher {
    int k;
    long levels = 0;
    KeyTrace fail;

    bool fail_with(const std::vector<std::string>& path, const std::string& why) {
        if (fail.reason.empty()) fail = KeyTrace{path, why};
        return false;
    }

    // add the ports and cells of x missing from phi, pairing them by role
    static void pair_cell(StructIso& phi, const Structure& a, const Structure& b, const Id& c, const Id& d) {
        auto ta = topology(a), tb = topology(b);
        phi.cells[c] = d;
        phi.ports[a.principal.at(c)] = b.principal.at(d);
        const auto& xa = ta.aux.at(c);
        const auto& xb = tb.aux.at(d);
        for (std::size_t i = 0; i < xa.size() && i < xb.size(); ++i)
            if (!phi.ports.count(xa[i])) phi.ports[xa[i]] = xb[i];
    }

    bool lifted(const Indexed& X, const Indexed& Y, const StructIso& phi, std::vector<std::string>& path) {
        auto bad = iso_violations(X, Y, phi);
        if (!bad.empty()) return fail_with(path, "lift: " + bad.front());
        return true;
    }

    std::optional<StructIso> peel(const Indexed& X, const KExperiment& E, const Indexed& Y, const KExperiment& F,
                                  const Id& c, const Id& d, int i0, std::vector<std::string>& path) {
        auto ra = remove_terminal_detailed(X.s, {c});
        auto rb = remove_terminal_detailed(Y.s, {d});
        auto ta = topology(X.s), tb = topology(Y.s);
        Indexed X2{ra.result, peel_ind(X, i0, ra, ta.aux.at(c))};
        Indexed Y2{rb.result, peel_ind(Y, i0, rb, tb.aux.at(d))};
        auto E2 = eval_k_experiment(X2, labels_on(X2.s, E), k);
        auto F2 = eval_k_experiment(Y2, labels_on(Y2.s, F), k);
        auto sub = run(X2, E2, Y2, F2, path);
        if (!sub) return std::nullopt;
        StructIso phi = *sub;
        pair_cell(phi, X.s, Y.s, c, d);
        if (!lifted(X, Y, phi, path)) return std::nullopt;
        return phi;
    }

    std::optional<StructIso> run(const Indexed& X, const KExperiment& E, const Indexed& Y, const KExperiment& F,
                                 std::vector<std::string>& path) {
        ++levels;
        if (!result_iso(E.result, F.result)) {
            fail_with(path, "results are not isomorphic");
            return std::nullopt;
        }
        Klass kx = classify(X.s), ky = classify(Y.s);
        path.push_back(class_name(kx));
        struct Pop {
            std::vector<std::string>& p;
            ~Pop() { p.pop_back(); }
        } pop{path};
        if (kx != ky) {
            fail_with(path, std::string("classes differ (") + class_name(kx) + " vs " + class_name(ky) + ")");
            return std::nullopt;
        }
        auto ta = topology(X.s), tb = topology(Y.s);
        switch (kx) {
            case Klass::empty: {
                // units and weakenings only, each its own conclusion
                StructIso phi;
                for (const auto& [p, i] : X.ind) {
                    Id q = at_index(Y.ind, i);
                    auto oc = ta.owner_of(p), od = tb.owner_of(q);
                    if (!oc || !od) {
                        fail_with(path, "conclusion " + std::to_string(i) + " has no cell");
                        return std::nullopt;
                    }
                    pair_cell(phi, X.s, Y.s, *oc, *od);
                }
                if (!lifted(X, Y, phi, path)) return std::nullopt;
                return phi;
            }
            case Klass::ax: {
                auto w = *isolated_axioms(X.s, ta).begin();
                int i0 = X.ind.at(w.first), j0 = X.ind.at(w.second);
                if (i0 > j0) {
                    std::swap(i0, j0);
                    std::swap(w.first, w.second);
                }
                Id p2 = at_index(Y.ind, i0), q2 = at_index(Y.ind, j0);
                if (!Y.s.wires.count(make_wire(p2, q2)) || tb.attached(p2) || tb.attached(q2)) {
                    fail_with(path, "conclusions " + std::to_string(i0) + "," + std::to_string(j0) +
                                        " are not an isolated axiom on the right");
                    return std::nullopt;
                }
                auto shrink = [&](const Indexed& x, const Id& a, const Id& b) {
                    Indexed out = x;
                    out.s.ports.erase(a);
                    out.s.ports.erase(b);
                    out.s.wires.erase(make_wire(a, b));
                    out.ind.erase(a);
                    out.ind.erase(b);
                    for (auto& [p, i] : out.ind) i -= (i > i0 ? 1 : 0) + (i > j0 ? 1 : 0);
                    return out;
                };
                Indexed X2 = shrink(X, w.first, w.second), Y2 = shrink(Y, p2, q2);
                auto E2 = eval_k_experiment(X2, labels_on(X2.s, E), k);
                auto F2 = eval_k_experiment(Y2, labels_on(Y2.s, F), k);
                auto sub = run(X2, E2, Y2, F2, path);
                if (!sub) return std::nullopt;
                StructIso phi = *sub;
                phi.ports[w.first] = p2;
                phi.ports[w.second] = q2;
                if (!lifted(X, Y, phi, path)) return std::nullopt;
                return phi;
            }
            case Klass::mult:
            case Klass::unit:
            case Klass::weak:
            case Klass::der: {
                Id c = *class_witness(X.s, ta, kx);
                int i0 = X.ind.at(X.s.principal.at(c));
                Id q = at_index(Y.ind, i0);
                auto d = tb.owner_of(q);
                bool ok = d && tb.is_principal(q) && Y.s.cells.at(*d) == X.s.cells.at(c);
                if (ok && kx == Klass::der) ok = is_dereliction(Y.s, tb, *d);
                if (!ok) {
                    fail_with(path, "conclusion " + std::to_string(i0) + " carries a different cell on the right");
                    return std::nullopt;
                }
                return peel(X, E, Y, F, c, *d, i0, path);
            }
            case Klass::contr: {
                Id c = *class_witness(X.s, ta, kx);
                int i0 = X.ind.at(X.s.principal.at(c));
                Id q = at_index(Y.ind, i0);
                auto d = tb.owner_of(q);
                if (!d || !tb.is_principal(q) || !(Y.s.cells.at(*d) == X.s.cells.at(c)) ||
                    !is_contraction(Y.s, tb, *d)) {
                    fail_with(path, "conclusion " + std::to_string(i0) + " is not a contraction on the right");
                    return std::nullopt;
                }
                Id p;
                for (const auto& a : ta.aux.at(c))
                    if (X.s.doors.at(a) == 0) {
                        p = a;
                        break;
                    }
                auto dx = detach_aux(X, c, p);
                auto E2 = eval_k_experiment(dx.x, labels_on(dx.x.s, E), k);
                int tried = 0;
                for (const auto& p2 : tb.aux.at(*d)) {
                    if (Y.s.doors.at(p2) != 0) continue;
                    auto dy = detach_aux(Y, *d, p2);
                    auto F2 = eval_k_experiment(dy.x, labels_on(dy.x.s, F), k);
                    if (!result_iso(E2.result, F2.result)) continue;
                    ++tried;
                    KeyTrace saved = fail;
                    auto sub = run(dx.x, E2, dy.x, F2, path);
                    if (!sub) continue;
                    StructIso phi = *sub;
                    phi.ports[p] = p2;
                    if (!lifted(X, Y, phi, path)) continue;
                    fail = saved;
                    return phi;
                }
                fail_with(path, tried ? "no detached branch leads to a match"
                                      : "no #=0 branch on the right has an isomorphic detached result");
                return std::nullopt;
            }
            case Klass::contrunit:
            case Klass::bangunit: {
                Id c = *class_witness(X.s, ta, kx);
                int i0 = X.ind.at(X.s.principal.at(c));
                Id q = at_index(Y.ind, i0);
                auto d = tb.owner_of(q);
                if (!d || !tb.is_principal(q) || Y.s.cells.at(*d).type != X.s.cells.at(c).type) {
                    fail_with(path, "conclusion " + std::to_string(i0) + " carries a different cell on the right");
                    return std::nullopt;
                }
                IndexedExperiment rx, ry;
                try {
                    rx = reduce_exp(X, E, c);
                    ry = reduce_exp(Y, F, *d);
                } catch (const Error& e) {
                    fail_with(path, e.what());
                    return std::nullopt;
                }
                auto sub = run(rx.x, rx.e, ry.x, ry.e, path);
                if (!sub) return std::nullopt;
                StructIso phi = *sub;
                if (!phi.cells.count(c)) pair_cell(phi, X.s, Y.s, c, *d);
                if (!lifted(X, Y, phi, path)) return std::nullopt;
                return phi;
            }
            case Klass::cbox: {
                auto rx = strip_layer_exp(X, E);
                IndexedExperiment ry;
                try {
                    ry = strip_layer_exp(Y, F);
                } catch (const Error& e) {
                    fail_with(path, e.what());
                    return std::nullopt;
                }
                auto sub = run(rx.x, rx.e, ry.x, ry.e, path);
                if (!sub) return std::nullopt;
                StructIso phi = *sub;
                for (const auto& c : terminal_cells(X.s, ta)) {
                    if (X.s.cells.at(c).type != CellType::Bang) continue;
                    int i = X.ind.at(X.s.principal.at(c));
                    auto d = tb.owner_of(at_index(Y.ind, i));
                    if (!d || Y.s.cells.at(*d).type != CellType::Bang) {
                        fail_with(path, "conclusion " + std::to_string(i) + " is not a bang on the right");
                        return std::nullopt;
                    }
                    pair_cell(phi, X.s, Y.s, c, *d);
                }
                if (!lifted(X, Y, phi, path)) return std::nullopt;
                return phi;
            }
        }
        return std::nullopt;
    }
};

// rho renames the atom of each axiom to the atom of its image axiom
inline PInj axiom_renaming(const Indexed& a, const KExperiment& e, const Indexed& b, const KExperiment& e2,
                           const StructIso& phi) {
    auto ta = topology(a.s);
    std::map<std::string, std::string> names;
    for (const auto& [p, q] : axioms(a.s, ta)) {
        const Value& x = e.labels.at(p);
        const Value& y = e2.labels.at(phi.ports.at(p));
        if (!x.is_atom() || !y.is_atom()) throw Error("key_match: experiment is not atomic");
        names[x.as_atom().name] = y.as_atom().name;
    }
    PInj rho;
    for (const auto& at : label_atoms(e)) {
        auto it = names.find(at.name);
        if (it == names.end()) throw Error("key_match: atom " + at.name + " belongs to no axiom");
        rho[at] = Atom{it->second, at.loc};
    }
    (void)b;
    return rho;
}

}  // namespace detail

inline KeyResult key_match(const Indexed& a, const KExperiment& e, const Indexed& b, const KExperiment& e2) {
    if (e.k != e2.k) throw Error("key_match: experiments use different k");
    if (e.k <= measure(a.s).cosize || e.k <= measure(b.s).cosize) throw Error("key_match: k must exceed both cosizes");
    if (!e.atomic || !e.injective || !e2.atomic || !e2.injective)
        throw Error("key_match: experiments must be atomic and injective");
    require_level(a.s, Level::lps, "key_match");
    require_level(b.s, Level::lps, "key_match");
    detail::KeyMatcher m{e.k, 0, {}};
    std::vector<std::string> path;
    KeyResult out;
    auto phi = m.run(a, e, b, e2, path);
    out.levels = m.levels;
    if (!phi) {
        out.trace = m.fail;
        return out;
    }
    ExpIso w{*phi, detail::axiom_renaming(a, e, b, e2, *phi), identity_on(label_atoms(e2))};
    auto bad = exp_iso_violations(a, e, b, e2, w);
    if (!bad.empty()) {
        out.trace = KeyTrace{{}, "witness rejected: " + bad.front()};
        return out;
    }
    out.witness = std::move(w);
    return out;
}

// ---- verdicts --------------------------------------------------------------

struct SeparationVerdict {
    bool same_lps = false;
    int k = 0;
    std::optional<ExpIso> witness;
    KeyTrace trace;
    // filled by separate_connected
    bool boxes_checked = false;
    bool same_ps = false;
    std::string note;
};

inline int separation_k(const IndexedPS& a, const IndexedPS& b) {
    return std::max({measure(a.r.s).cosize, measure(b.r.s).cosize, 1}) + 1;
}

inline SeparationVerdict separate(const IndexedPS& a, const IndexedPS& b) {
    detail::require_ps(a, "separate");
    detail::require_ps(b, "separate");
    SeparationVerdict v;
    v.k = separation_k(a, b);
    auto ea = canonical_injective_atomic(a.lps(), v.k);
    auto eb = canonical_injective_atomic(b.lps(), v.k);
    if (!result_iso(ea.result, eb.result)) {
        v.trace = KeyTrace{{}, "results are not isomorphic"};
        return v;
    }
    auto km = key_match(a.lps(), ea, b.lps(), eb);
    v.trace = km.trace;
    if (km.witness) {
        v.same_lps = true;
        v.witness = km.witness;
    }
    return v;
}

inline SeparationVerdict separate_connected(const IndexedPS& a, const IndexedPS& b) {
    auto v = separate(a, b);
    if (!connected(a.r.s) || !connected(b.r.s)) {
        v.note = "structure not connected: verdict covers the linear proof-structures only";
        return v;
    }
    if (!v.same_lps) return v;
    auto ra = recover_boxes(a.r.s);
    auto rb = recover_boxes(b.r.s);
    v.boxes_checked = true;
    v.same_ps = ra.b == a.r.b && rb.b == b.r.b && b_square(a.r.b, b.r.b, v.witness->phi);
    if (!v.same_ps) v.note = "box functions do not correspond";
    return v;
}

}  // namespace mell
