#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "proof_structure.hpp"
#include "structure.hpp"
#include "value.hpp"

namespace mell {

// ---- k-experiments of a plps ---------------------------------------------

struct KExperiment {
    int k = 1;
    std::map<Id, Value> labels;
    Tuple result;
    bool atomic = false;
    bool injective = false;
};

namespace detail {

inline bool in_d(const Value& v) {
    for (const auto& a : atoms_of(v))
        if (!a.plain()) return false;
    return true;
}

}  // namespace detail

// axiom_labels gives one or both endpoints of every axiom
inline KExperiment eval_k_experiment(const Indexed& x, const std::map<Id, Value>& axiom_labels, int k) {
    if (k < 1) throw Error("eval_k_experiment: k must be at least 1");
    require_level(x.s, Level::plps, "eval_k_experiment");
    if (!valid_ind(x.s, x.ind)) throw Error("eval_k_experiment: ind is not a bijection onto the conclusions");
    const auto& s = x.s;
    auto t = topology(s);
    auto axs = axioms(s, t);
    std::map<Id, Value> ax;
    for (const auto& [p, v] : axiom_labels) {
        if (!detail::in_d(v)) throw Error("eval_k_experiment: axiom label on " + p + " has indexed atoms");
        ax.emplace(p, v);
    }
    for (const auto& [a, b] : axs) {
        auto ia = ax.find(a), ib = ax.find(b);
        if (ia == ax.end() && ib == ax.end()) throw Error("eval_k_experiment: axiom {" + a + "," + b + "} has no label");
        if (ia != ax.end() && ib != ax.end()) {
            if (!(orthogonal(ia->second) == ib->second))
                throw Error("eval_k_experiment: axiom {" + a + "," + b + "} labels are not orthogonal");
        } else if (ia != ax.end()) {
            ax.emplace(b, orthogonal(ia->second));
        } else {
            ax.emplace(a, orthogonal(ib->second));
        }
    }
    for (const auto& [p, v] : ax) {
        bool is_ax = false;
        for (const auto& w : axs)
            if (w.first == p || w.second == p) is_ax = true;
        if (!is_ax) throw Error("eval_k_experiment: label given on non-axiom port " + p);
    }

    std::map<Id, Value> lab;
    std::function<Value(const Id&)> label = [&](const Id& p) -> Value {
        auto memo = lab.find(p);
        if (memo != lab.end()) return memo->second;
        Value out;
        auto a = ax.find(p);
        if (a != ax.end()) {
            out = a->second;
        } else if (t.is_principal(p)) {
            const Id c = t.owner.at(p);
            const auto& aux = t.aux.at(c);
            switch (s.cells.at(c).type) {
                case CellType::Tensor: out = Value::pair(true, label(aux[0]), label(aux[1])); break;
                case CellType::Par: out = Value::pair(false, label(aux[0]), label(aux[1])); break;
                case CellType::One: out = Value::unit(true); break;
                case CellType::Bot: out = Value::unit(false); break;
                case CellType::Bang: out = Value::bag(true, dig_multi(k, 1, {label(aux[0])})); break;
                case CellType::Why: {
                    Multiset sum;
                    for (const auto& q : aux) sum = msum(sum, dig_multi(k, s.doors.at(q), {label(q)}));
                    out = Value::bag(false, std::move(sum));
                    break;
                }
            }
        } else {
            auto q = t.partner_of(p);
            if (!q || !t.is_principal(*q)) throw Error("eval_k_experiment: port " + p + " cannot be labelled");
            out = label(*q);
        }
        lab.emplace(p, out);
        return out;
    };

    KExperiment e;
    e.k = k;
    for (const auto& p : s.ports) e.labels.emplace(p, label(p));
    for (const auto& p : by_index(x.ind)) e.result.push_back(e.labels.at(p));
    e.atomic = true;
    for (const auto& [p, v] : ax)
        if (!v.is_atom()) e.atomic = false;
    e.injective = true;
    std::map<Atom, Wire> owner;
    for (const auto& w : axs)
        for (const auto& p : {w.first, w.second})
            for (const auto& at : atoms_of(ax.at(p))) {
                auto [it, fresh] = owner.emplace(at, w);
                if (!fresh && it->second != w) e.injective = false;
            }
    return e;
}

inline std::map<Id, Value> axiom_labels_of(const Structure& s, const KExperiment& e) {
    auto t = topology(s);
    std::map<Id, Value> out;
    for (const auto& [a, b] : axioms(s, t)) out.emplace(a, e.labels.at(a));
    return out;
}

inline std::string canonical_atom_name(const Wire& w) { return w.first + "=" + w.second; }

inline KExperiment canonical_injective_atomic(const Indexed& x, int k) {
    auto t = topology(x.s);
    std::map<Id, Value> labels;
    for (const auto& w : axioms(x.s, t)) labels.emplace(w.first, Value::atom(canonical_atom_name(w)));
    return eval_k_experiment(x, labels, k);
}

// ---- derived experiments -------------------------------------------------

struct IndexedExperiment {
    Indexed x;
    KExperiment e;
};

inline IndexedExperiment strip_layer_exp(const Indexed& x, const KExperiment& e) {
    if (classify(x.s) != Klass::cbox) throw Error("strip_layer_exp: structure is not in the cbox class");
    Indexed y = strip_layer(x);
    auto ey = eval_k_experiment(y, axiom_labels_of(x.s, e), e.k);
    return {y, ey};
}

inline IndexedExperiment reduce_exp(const Indexed& x, const KExperiment& e, const Id& l0) {
    auto t = topology(x.s);
    if (!x.s.cells.count(l0) || !terminal_cells(x.s, t).count(l0)) throw Error("reduce_exp: cell is not terminal");
    const auto& cell = x.s.cells.at(l0);
    const Value& top = e.labels.at(x.s.principal.at(l0));
    if (cell.type == CellType::Bang) {
        if (!top.is_bag() || star_part(top.items()).empty())
            throw Error("reduce_exp: bang branch carries atoms");
    } else if (cell.type == CellType::Why) {
        if (classify(x.s) == Klass::contr) throw Error("reduce_exp: structure is in the contr class");
        bool found = false;
        for (const auto& q : t.aux.at(l0))
            if (x.s.doors.at(q) >= 1 && atoms_of(e.labels.at(q)).empty()) found = true;
        if (!found) throw Error("reduce_exp: no atom-free door branch");
    } else {
        throw Error("reduce_exp: cell is neither bang nor why");
    }
    Indexed y = reduce_isolated(x, l0);
    return {y, eval_k_experiment(y, axiom_labels_of(x.s, e), e.k)};
}

// ---- experiments of proof-structures -------------------------------------

struct ExperimentDesc {
    std::map<Id, Value> axiom_labels;
    std::map<Id, std::vector<std::vector<ExperimentDesc>>> boxes;
};

struct PSExperiment {
    std::map<Id, Multiset> labels;
    std::map<Id, std::vector<std::vector<PSExperiment>>> boxes;
};

namespace detail {

inline Id box_free_port(const Structure&, const Topology& t, const Id& v) {
    const Id& q = t.aux.at(v).front();
    auto partner = t.partner_of(q);
    if (partner && t.is_principal(*partner)) return *partner;
    return q;
}

inline PSExperiment eval_ps(const ProofStructure& r, const ExperimentDesc& desc) {
    const auto& s = r.s;
    auto t = topology(s);
    auto dep = all_depths(s, t);
    PSExperiment e;
    std::map<Id, Multiset> from_box;
    for (const auto& v : bangs_of(s)) {
        if (dep.at(s.principal.at(v)) != 0) continue;
        auto it = desc.boxes.find(v);
        std::vector<ExperimentDesc> copies;
        if (it != desc.boxes.end()) {
            if (it->second.size() != 1) throw Error("experiment: depth-0 bang " + v + " needs exactly one multiset of copies");
            copies = it->second.front();
        }
        ProofStructure box = box_extract_unchecked(r, v);
        std::vector<PSExperiment> inner;
        for (const auto& d : copies) inner.push_back(eval_ps(box, d));
        const Id free = box_free_port(s, t, v);
        for (const auto& p : box_ports(r, t, v)) {
            // aux(v) itself is dropped from the box when wired to a principal port
            const Id& src = box.s.ports.count(p) ? p : free;
            Multiset sum;
            for (const auto& ei : inner) sum = msum(sum, ei.labels.at(src));
            from_box[p] = sum;
        }
        for (const auto& w : bangs_of(box.s)) {
            std::vector<std::vector<PSExperiment>> acc;
            for (const auto& ei : inner) {
                auto b = ei.boxes.find(w);
                if (b != ei.boxes.end()) acc.insert(acc.end(), b->second.begin(), b->second.end());
            }
            e.boxes[w] = acc;
        }
        e.labels[s.principal.at(v)] = {Value::bag(true, from_box.at(t.aux.at(v).front()))};
        e.boxes[v] = {inner};
    }
    for (const auto& [v, _] : desc.boxes)
        if (!s.cells.count(v) || s.cells.at(v).type != CellType::Bang || dep.at(s.principal.at(v)) != 0)
            throw Error("experiment: description names " + v + " which is not a depth-0 bang");

    auto axs = axioms(s, t);
    std::map<Id, Value> ax;
    for (const auto& [a, b] : axs) {
        if (from_box.count(a)) continue;
        auto ia = desc.axiom_labels.find(a), ib = desc.axiom_labels.find(b);
        if (ia == desc.axiom_labels.end() && ib == desc.axiom_labels.end())
            throw Error("experiment: depth-0 axiom {" + a + "," + b + "} has no label");
        if (ia != desc.axiom_labels.end() && ib != desc.axiom_labels.end() && !(orthogonal(ia->second) == ib->second))
            throw Error("experiment: axiom {" + a + "," + b + "} labels are not orthogonal");
        Value va = ia != desc.axiom_labels.end() ? ia->second : orthogonal(ib->second);
        if (!in_d(va)) throw Error("experiment: axiom label with indexed atoms");
        ax.emplace(a, va);
        ax.emplace(b, orthogonal(va));
    }

    std::function<Multiset(const Id&)> label = [&](const Id& p) -> Multiset {
        auto memo = e.labels.find(p);
        if (memo != e.labels.end()) return memo->second;
        Multiset out;
        auto fb = from_box.find(p);
        auto a = ax.find(p);
        auto single = [&](const Id& q) {
            auto m = label(q);
            if (m.size() != 1) throw Error("experiment: depth-0 port " + q + " without a unique label");
            return m.front();
        };
        if (fb != from_box.end()) {
            out = fb->second;
        } else if (a != ax.end()) {
            out = {a->second};
        } else if (t.is_principal(p)) {
            const Id c = t.owner.at(p);
            const auto& aux = t.aux.at(c);
            switch (s.cells.at(c).type) {
                case CellType::Tensor: out = {Value::pair(true, single(aux[0]), single(aux[1]))}; break;
                case CellType::Par: out = {Value::pair(false, single(aux[0]), single(aux[1]))}; break;
                case CellType::One: out = {Value::unit(true)}; break;
                case CellType::Bot: out = {Value::unit(false)}; break;
                case CellType::Bang: throw Error("experiment: bang " + c + " above depth 0 reached outside its box");
                case CellType::Why: {
                    Multiset sum;
                    for (const auto& q : aux) sum = msum(sum, label(q));
                    out = {Value::bag(false, std::move(sum))};
                    break;
                }
            }
        } else {
            auto q = t.partner_of(p);
            if (!q || !t.is_principal(*q)) throw Error("experiment: port " + p + " cannot be labelled");
            out = label(*q);
        }
        e.labels[p] = out;
        return out;
    };
    for (const auto& p : s.ports) label(p);
    return e;
}

}  // namespace detail

struct PSRun {
    PSExperiment e;
    Tuple result;
};

namespace detail {

inline void require_ps(const IndexedPS& x, const std::string& what) {
    auto bad = ps_violations(x.r);
    if (!bad.empty()) throw Error(what + ": invalid proof-structure: " + bad.front());
    if (!valid_ind(x.r.s, x.ind)) throw Error(what + ": ind is not a bijection onto the conclusions");
}

inline PSRun run_ps(const IndexedPS& x, const ExperimentDesc& desc) {
    PSRun run{eval_ps(x.r, desc), {}};
    for (const auto& p : by_index(x.ind)) {
        const auto& m = run.e.labels.at(p);
        if (m.size() != 1) throw Error("eval_ps_experiment: conclusion " + p + " without a unique label");
        run.result.push_back(m.front());
    }
    return run;
}

}  // namespace detail

inline PSRun eval_ps_experiment(const IndexedPS& x, const ExperimentDesc& desc) {
    detail::require_ps(x, "eval_ps_experiment");
    return detail::run_ps(x, desc);
}

// Re-checks every local equation of a proof-structure experiment.
inline std::vector<std::string> ps_experiment_violations(const ProofStructure& r, const PSExperiment& e) {
    std::vector<std::string> v;
    const auto& s = r.s;
    auto t = topology(s);
    auto dep = all_depths(s, t);
    auto lab = [&](const Id& p) -> const Multiset& {
        auto it = e.labels.find(p);
        if (it == e.labels.end()) throw Error("experiment check: port " + p + " unlabelled");
        return it->second;
    };
    IdSet in_box;
    for (const auto& c : bangs_of(s)) {
        if (dep.at(s.principal.at(c)) != 0) continue;
        auto it = e.boxes.find(c);
        if (it == e.boxes.end() || it->second.size() != 1) {
            v.push_back("bang " + c + ": expected one multiset of box experiments");
            continue;
        }
        ProofStructure box = box_extract_unchecked(r, c);
        const auto& inner = it->second.front();
        for (std::size_t i = 0; i < inner.size(); ++i)
            for (const auto& x : ps_experiment_violations(box, inner[i]))
                v.push_back("bang " + c + " copy " + std::to_string(i) + ": " + x);
        auto bp = box_ports(r, t, c);
        in_box.insert(bp.begin(), bp.end());
        const Id free = detail::box_free_port(s, t, c);
        for (const auto& p : bp) {
            const Id& src = box.s.ports.count(p) ? p : free;
            Multiset sum;
            for (const auto& ei : inner) {
                auto l = ei.labels.find(src);
                if (l == ei.labels.end()) throw Error("experiment check: box port " + src + " unlabelled");
                sum = msum(sum, l->second);
            }
            if (sum != lab(p)) v.push_back("port " + p + ": label is not the sum over box copies");
        }
        Multiset top;
        for (const auto& ei : inner) top = msum(top, ei.labels.at(free));
        if (lab(s.principal.at(c)) != Multiset{Value::bag(true, top)}) v.push_back("bang " + c + ": principal label");
    }
    auto one = [&](const Id& p) -> std::optional<Value> {
        const auto& m = lab(p);
        if (m.size() != 1) return std::nullopt;
        return m.front();
    };
    for (const auto& p : s.ports) {
        if (in_box.count(p)) continue;
        if (dep.at(p) == 0 && lab(p).size() != 1) v.push_back("port " + p + ": depth-0 label is not a singleton");
    }
    for (const auto& [a, b] : s.wires) {
        if (in_box.count(a) && in_box.count(b)) continue;
        bool is_ax = !t.is_principal(a) && !t.is_principal(b);
        if (is_ax) {
            auto x = one(a), y = one(b);
            if (!x || !y || !(orthogonal(*x) == *y) || !detail::in_d(*x)) v.push_back("axiom {" + a + "," + b + "}");
        } else if (lab(a) != lab(b)) {
            v.push_back("wire {" + a + "," + b + "}: labels differ");
        }
    }
    for (const auto& [c, cell] : s.cells) {
        const Id& pri = s.principal.at(c);
        if (in_box.count(pri) || cell.type == CellType::Bang) continue;
        const auto& aux = t.aux.at(c);
        std::optional<Value> want;
        switch (cell.type) {
            case CellType::Tensor:
            case CellType::Par: {
                auto x = one(aux[0]), y = one(aux[1]);
                if (x && y) want = Value::pair(cell.type == CellType::Tensor, *x, *y);
                break;
            }
            case CellType::One: want = Value::unit(true); break;
            case CellType::Bot: want = Value::unit(false); break;
            case CellType::Why: {
                Multiset sum;
                for (const auto& q : aux) sum = msum(sum, lab(q));
                want = Value::bag(false, sum);
                break;
            }
            default: break;
        }
        if (!want || lab(pri) != Multiset{*want}) v.push_back("cell " + c + ": principal label");
    }
    return v;
}

// ---- projection of a k-experiment onto a proof-structure -----------------

namespace detail {

inline ExperimentDesc project_desc(const ProofStructure& r, const KExperiment& ke, const PInj& rho, int k,
                                   const std::vector<int>& suffix) {
    const auto& s = r.s;
    auto t = topology(s);
    auto dep = all_depths(s, t);
    ExperimentDesc d;
    IdSet in_box;
    for (const auto& v : bangs_of(s)) {
        if (dep.at(s.principal.at(v)) != 0) continue;
        auto bp = box_ports(r, t, v);
        in_box.insert(bp.begin(), bp.end());
        ProofStructure box = box_extract_unchecked(r, v);
        std::vector<ExperimentDesc> copies;
        for (int j = 1; j <= k; ++j) {
            std::vector<int> sfx{j};
            sfx.insert(sfx.end(), suffix.begin(), suffix.end());
            copies.push_back(project_desc(box, ke, rho, k, sfx));
        }
        d.boxes[v] = {copies};
    }
    for (const auto& [a, b] : axioms(s, t)) {
        if (in_box.count(a)) continue;
        auto it = ke.labels.find(a);
        if (it == ke.labels.end() || !it->second.is_atom() || !it->second.as_atom().plain())
            throw Error("project_to_ps: axiom port " + a + " is not labelled by a plain atom");
        Atom src{it->second.as_atom().name, suffix};
        auto img = rho.find(src);
        if (img == rho.end()) throw Error("project_to_ps: renaming does not cover " + to_string(src));
        d.axiom_labels[a] = Value::atom(img->second);
    }
    return d;
}

}  // namespace detail

inline ExperimentDesc project_desc(const IndexedPS& x, const KExperiment& ke, const PInj& rho) {
    if (!ke.atomic || !ke.injective) throw Error("project_to_ps: k-experiment must be atomic and injective");
    if (!is_injective(rho)) throw Error("project_to_ps: renaming is not injective");
    for (const auto& [a, b] : rho)
        if (!b.plain()) throw Error("project_to_ps: renaming must land in plain atoms");
    return detail::project_desc(x.r, ke, rho, ke.k, {});
}

inline PSRun project_to_ps(const IndexedPS& x, const KExperiment& ke, const PInj& rho) {
    detail::require_ps(x, "project_to_ps");
    for (const auto& a : atoms_of(ke.result))
        if (!rho.count(a)) throw Error("project_to_ps: renaming does not cover " + to_string(a));
    return detail::run_ps(x, project_desc(x, ke, rho));
}

// ---- bounded interpretation ------------------------------------------------

struct Sample {
    std::set<Tuple> results;
    bool truncated = false;
};

namespace detail {

struct Enumerator {
    std::vector<Atom> pool;
    int max_copies;
    std::size_t cap;
    bool truncated = false;

    // all descriptions of r
    std::vector<ExperimentDesc> descs(const ProofStructure& r) {
        const auto& s = r.s;
        auto t = topology(s);
        auto dep = all_depths(s, t);
        IdSet in_box;
        std::vector<std::pair<Id, std::vector<ExperimentDesc>>> box_options;
        for (const auto& v : bangs_of(s)) {
            if (dep.at(s.principal.at(v)) != 0) continue;
            auto bp = box_ports(r, t, v);
            in_box.insert(bp.begin(), bp.end());
            auto inner = descs(box_extract_unchecked(r, v));
            box_options.emplace_back(v, std::move(inner));
        }
        std::vector<Id> ax_ports;
        for (const auto& [a, b] : axioms(s, t))
            if (!in_box.count(a)) ax_ports.push_back(a);

        std::vector<ExperimentDesc> out{ExperimentDesc{}};
        for (const auto& a : ax_ports) {
            std::vector<ExperimentDesc> next;
            for (const auto& d : out)
                for (const auto& at : pool) {
                    auto d2 = d;
                    d2.axiom_labels[a] = Value::atom(at);
                    next.push_back(std::move(d2));
                    if (next.size() > cap) {
                        truncated = true;
                        return next;
                    }
                }
            out = std::move(next);
        }
        for (const auto& [v, inner] : box_options) {
            // multisets of size 0..max_copies drawn from inner
            std::vector<std::vector<ExperimentDesc>> bags;
            std::vector<std::size_t> pick;
            std::function<void(std::size_t)> rec = [&](std::size_t from) {
                if (bags.size() > cap) return;
                std::vector<ExperimentDesc> bag;
                for (auto i : pick) bag.push_back(inner[i]);
                bags.push_back(std::move(bag));
                if (static_cast<int>(pick.size()) == max_copies) return;
                for (std::size_t i = from; i < inner.size(); ++i) {
                    pick.push_back(i);
                    rec(i);
                    pick.pop_back();
                }
            };
            rec(0);
            if (bags.size() > cap) truncated = true;
            std::vector<ExperimentDesc> next;
            for (const auto& d : out)
                for (const auto& bag : bags) {
                    auto d2 = d;
                    d2.boxes[v] = {bag};
                    next.push_back(std::move(d2));
                    if (next.size() > cap) {
                        truncated = true;
                        return next;
                    }
                }
            out = std::move(next);
        }
        return out;
    }
};

}  // namespace detail

inline Sample sample_interpretation(const IndexedPS& x, const std::vector<Atom>& pool, int max_copies,
                                    std::size_t cap = 200000) {
    detail::require_ps(x, "sample_interpretation");
    detail::Enumerator en{pool, max_copies, cap};
    Sample out;
    auto all = en.descs(x.r);
    out.truncated = en.truncated;
    for (const auto& d : all) out.results.insert(detail::run_ps(x, d).result);
    return out;
}

}  // namespace mell
