#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "proof_structure.hpp"
#include "structure.hpp"

namespace mell {

struct GeneratorConfig {
    std::uint64_t seed = 0;
    int max_cells = 12;
    int max_depth = 3;
    int max_steps = 16;
    // relative weights of the construction steps
    std::map<std::string, int> weights{{"ax", 4},  {"one", 1},   {"bot", 1},  {"weak", 1},   {"tensor", 3},
                                       {"par", 3}, {"der", 3},   {"contr", 3}, {"close", 1}, {"promote", 3},
                                       {"mix", 1}};
    bool connected = false;
    bool allow_weakening = true;  // weakening and bottom cells
};

namespace detail {

// Sequent-style construction: each open proof has plain conclusions and
// why-conclusions (aux ports of a why cell not yet built).
class Generator {
    struct WhyConc {
        std::vector<Id> aux;
    };
    struct Proof {
        std::vector<Id> plain;
        std::vector<WhyConc> whys;
        int depth = 0;
    };

    GeneratorConfig cfg;
    std::mt19937_64 rng;
    Structure s;
    Boxes b;
    std::vector<Proof> proofs;
    int cells = 0, ports = 0;

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
    Id new_port() { return "p" + std::to_string(++ports); }
    Id new_cell() { return "l" + std::to_string(++cells); }

    int open_whys() const {
        int n = 0;
        for (const auto& p : proofs) n += static_cast<int>(p.whys.size());
        return n;
    }
    // cells still to be created at the end if we stopped now
    int committed() const {
        int n = static_cast<int>(s.cells.size()) + open_whys();
        if (cfg.connected && !proofs.empty()) n += static_cast<int>(proofs.size()) - 1;
        return n;
    }

    // premise port under which a new cell attaches to conclusion c
    Id premise_of(const Id& c) {
        for (const auto& [cell, pri] : s.principal)
            if (pri == c) {
                Id a = new_port();
                s.add_wire(a, c);
                return a;
            }
        return c;
    }

    Id take_plain(Proof& p, int i) {
        Id c = p.plain[static_cast<std::size_t>(i)];
        p.plain.erase(p.plain.begin() + i);
        return c;
    }

    void close_why(Proof& p, int i) {
        WhyConc w = p.whys[static_cast<std::size_t>(i)];
        p.whys.erase(p.whys.begin() + i);
        Id c = new_cell(), pri = new_port();
        std::vector<int> counts;
        for (const auto& a : w.aux) counts.push_back(s.doors.count(a) ? s.doors.at(a) : 0);
        s.add_cell(c, CellType::Why, pri, w.aux, counts);
        p.plain.push_back(pri);
    }

    void binary(CellType t, Proof& target, Id l, Id r) {
        Id c = new_cell(), pri = new_port();
        Id la = premise_of(l), ra = premise_of(r);
        s.add_cell(c, t, pri, {la, ra});
        target.plain.push_back(pri);
    }

    bool step(const std::string& act) {
        int budget = cfg.max_cells - committed();
        if (act == "ax") {
            if (cfg.connected && !proofs.empty() && budget < 1) return false;
            Id a = new_port(), c = new_port();
            s.add_wire(a, c);
            proofs.push_back(Proof{{a, c}, {}, 0});
            return true;
        }
        if (act == "one" || act == "bot") {
            if (act == "bot" && !cfg.allow_weakening) return false;
            if (budget < 1 + (cfg.connected && !proofs.empty() ? 1 : 0)) return false;
            Id c = new_cell(), pri = new_port();
            s.add_cell(c, act == "one" ? CellType::One : CellType::Bot, pri, {});
            proofs.push_back(Proof{{pri}, {}, 0});
            return true;
        }
        if (act == "weak") {
            if (!cfg.allow_weakening || budget < 1 + (cfg.connected && !proofs.empty() ? 1 : 0)) return false;
            proofs.push_back(Proof{{}, {WhyConc{}}, 0});
            return true;
        }
        if (proofs.empty()) return false;
        Proof& p = proofs[static_cast<std::size_t>(pick(static_cast<int>(proofs.size())))];
        if (act == "tensor" || act == "par") {
            CellType t = act == "tensor" ? CellType::Tensor : CellType::Par;
            // within one proof, or joining two proofs
            if (proofs.size() > 1 && pick(2) == 0) {
                int i = pick(static_cast<int>(proofs.size())), j = pick(static_cast<int>(proofs.size()) - 1);
                if (j >= i) ++j;
                auto& pi = proofs[static_cast<std::size_t>(i)];
                auto& pj = proofs[static_cast<std::size_t>(j)];
                if (pi.plain.empty() || pj.plain.empty()) return false;
                // joining removes one pending link when connected
                if (budget < (cfg.connected ? 0 : 1)) return false;
                Id l = take_plain(pi, pick(static_cast<int>(pi.plain.size())));
                Id r = take_plain(pj, pick(static_cast<int>(pj.plain.size())));
                binary(t, pi, l, r);
                pi.plain.insert(pi.plain.end(), pj.plain.begin(), pj.plain.end());
                pi.whys.insert(pi.whys.end(), pj.whys.begin(), pj.whys.end());
                pi.depth = std::max(pi.depth, pj.depth);
                proofs.erase(proofs.begin() + j);
                return true;
            }
            if (p.plain.size() < 2 || budget < 1) return false;
            Id l = take_plain(p, pick(static_cast<int>(p.plain.size())));
            Id r = take_plain(p, pick(static_cast<int>(p.plain.size())));
            binary(t, p, l, r);
            return true;
        }
        if (act == "der") {
            if (p.plain.empty() || budget < 1) return false;
            Id c = take_plain(p, pick(static_cast<int>(p.plain.size())));
            p.whys.push_back(WhyConc{{premise_of(c)}});
            return true;
        }
        if (act == "contr") {
            if (p.whys.size() < 2) return false;
            int i = pick(static_cast<int>(p.whys.size()));
            WhyConc w = p.whys[static_cast<std::size_t>(i)];
            p.whys.erase(p.whys.begin() + i);
            auto& other = p.whys[static_cast<std::size_t>(pick(static_cast<int>(p.whys.size())))];
            other.aux.insert(other.aux.end(), w.aux.begin(), w.aux.end());
            return true;
        }
        if (act == "close") {
            if (p.whys.empty()) return false;
            close_why(p, pick(static_cast<int>(p.whys.size())));
            return true;
        }
        if (act == "promote") {
            if (p.plain.empty() || p.depth >= cfg.max_depth) return false;
            int extra = static_cast<int>(p.plain.size()) - 1;  // context conclusions to derelict
            if (budget < 1 + extra) return false;
            int main = pick(static_cast<int>(p.plain.size()));
            Id m = take_plain(p, main);
            while (!p.plain.empty()) {
                Id c = take_plain(p, 0);
                p.whys.push_back(WhyConc{{premise_of(c)}});
            }
            Id v = new_cell(), pri = new_port();
            Id a = premise_of(m);
            IdSet doors;
            for (auto& w : p.whys)
                for (const auto& x : w.aux) {
                    s.doors[x] = (s.doors.count(x) ? s.doors.at(x) : 0) + 1;
                    doors.insert(x);
                }
            s.add_cell(v, CellType::Bang, pri, {a});
            b[v] = doors;
            p.plain.push_back(pri);
            p.depth += 1;
            return true;
        }
        if (act == "mix") {
            if (cfg.connected || proofs.size() < 2) return false;
            Proof q = proofs.back();
            proofs.pop_back();
            Proof& r = proofs[static_cast<std::size_t>(pick(static_cast<int>(proofs.size())))];
            r.plain.insert(r.plain.end(), q.plain.begin(), q.plain.end());
            r.whys.insert(r.whys.end(), q.whys.begin(), q.whys.end());
            r.depth = std::max(r.depth, q.depth);
            return true;
        }
        return false;
    }

public:
    explicit Generator(GeneratorConfig c) : cfg(std::move(c)), rng(cfg.seed) {}

    IndexedPS run() {
        std::vector<std::string> acts;
        std::vector<int> w;
        for (const auto& [a, n] : cfg.weights)
            if (n > 0) {
                acts.push_back(a);
                w.push_back(n);
            }
        std::discrete_distribution<int> choose(w.begin(), w.end());
        int steps = 1 + pick(std::max(1, cfg.max_steps));
        // a first building block
        static const std::vector<std::string> starts{"ax", "one", "bot", "weak"};
        for (int tries = 0; proofs.empty() && tries < 100; ++tries) step(starts[static_cast<std::size_t>(pick(4))]);
        if (proofs.empty()) step("ax");
        for (int i = 0, fails = 0; i < steps && fails < 50;) {
            if (step(acts[static_cast<std::size_t>(choose(rng))])) ++i;
            else ++fails;
        }
        for (auto& p : proofs)
            while (!p.whys.empty()) close_why(p, 0);
        if (cfg.connected)
            while (proofs.size() > 1) {
                Proof q = proofs.back();
                proofs.pop_back();
                Proof& r = proofs.back();
                Id l = take_plain(r, pick(static_cast<int>(r.plain.size())));
                Id x = take_plain(q, pick(static_cast<int>(q.plain.size())));
                binary(pick(2) ? CellType::Tensor : CellType::Par, r, l, x);
                r.plain.insert(r.plain.end(), q.plain.begin(), q.plain.end());
            }
        for (auto& [c, cell] : s.cells)
            if (cell.type == CellType::Bang && !b.count(c)) b[c] = {};
        std::vector<Id> concl;
        for (const auto& c : conclusions(s)) concl.push_back(c);
        std::shuffle(concl.begin(), concl.end(), rng);
        Ind ind;
        for (std::size_t i = 0; i < concl.size(); ++i) ind[concl[i]] = static_cast<int>(i) + 1;
        return IndexedPS{ProofStructure{s, b}, ind};
    }
};

}  // namespace detail

inline IndexedPS generate_ps(const GeneratorConfig& cfg) { return detail::Generator(cfg).run(); }

// Same structure under fresh identifiers.
inline IndexedPS rename_ids(const IndexedPS& x, std::uint64_t seed, const std::string& prefix = "r") {
    std::mt19937_64 rng(seed);
    const auto& s = x.r.s;
    std::vector<Id> ports(s.ports.begin(), s.ports.end()), cells;
    for (const auto& [c, _] : s.cells) cells.push_back(c);
    std::shuffle(ports.begin(), ports.end(), rng);
    std::shuffle(cells.begin(), cells.end(), rng);
    std::map<Id, Id> P, C;
    for (std::size_t i = 0; i < ports.size(); ++i) P[ports[i]] = prefix + "p" + std::to_string(i);
    for (std::size_t i = 0; i < cells.size(); ++i) C[cells[i]] = prefix + "c" + std::to_string(i);
    IndexedPS out;
    auto& t = out.r.s;
    for (const auto& p : s.ports) t.ports.insert(P[p]);
    for (const auto& [c, cell] : s.cells) t.cells[C[c]] = cell;
    for (const auto& [c, ps] : s.attach)
        for (const auto& p : ps) t.attach[C[c]].insert(P[p]);
    for (const auto& [c, p] : s.principal) t.principal[C[c]] = P[p];
    for (const auto& [c, p] : s.left) t.left[C[c]] = P[p];
    for (const auto& [p, n] : s.doors) t.doors[P[p]] = n;
    for (const auto& [a, b] : s.wires) t.wires.insert(make_wire(P[a], P[b]));
    for (const auto& [c, ps] : x.r.b)
        for (const auto& p : ps) out.r.b[C[c]].insert(P[p]);
    for (const auto& [c, ps] : x.r.b)
        if (ps.empty()) out.r.b[C[c]];
    for (const auto& [p, i] : x.ind) out.ind[P[p]] = i;
    return out;
}

}  // namespace mell
