#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "experiment.hpp"
#include "iso.hpp"
#include "separation.hpp"
#include "structure.hpp"

namespace mell {

using json = nlohmann::json;

// A structure file: the box function and the indexing are optional.
struct StructureFile {
    IndexedPS x;
    bool has_boxes = false;
    bool has_ind = false;
};

inline json to_json(const IndexedPS& x, bool with_boxes = true, bool with_ind = true) {
    const auto& s = x.r.s;
    json j = json::object();
    j["cells"] = json::array();
    for (const auto& [c, cell] : s.cells) j["cells"].push_back({{"id", c}, {"type", type_name(cell.type)}, {"arity", cell.arity}});
    j["ports"] = json(std::vector<Id>(s.ports.begin(), s.ports.end()));
    j["attach"] = json::object();
    for (const auto& [c, ps] : s.attach) j["attach"][c] = std::vector<Id>(ps.begin(), ps.end());
    j["principal"] = s.principal;
    j["left"] = json::object();
    for (const auto& [c, p] : s.left) j["left"][c] = p;
    j["doors"] = json::object();
    for (const auto& [p, n] : s.doors) j["doors"][p] = n;
    j["wires"] = json::array();
    for (const auto& [a, b] : s.wires) j["wires"].push_back({a, b});
    if (with_boxes) {
        j["boxes"] = json::object();
        for (const auto& [c, ps] : x.r.b) j["boxes"][c] = std::vector<Id>(ps.begin(), ps.end());
    }
    if (with_ind) {
        j["ind"] = json::object();
        for (const auto& [p, i] : x.ind) j["ind"][p] = i;
    }
    return j;
}

inline std::string serialize(const IndexedPS& x, bool with_boxes = true, bool with_ind = true) {
    return to_json(x, with_boxes, with_ind).dump(2) + "\n";
}

inline StructureFile structure_from_json(const json& j) {
    StructureFile f;
    auto& s = f.x.r.s;
    try {
        for (const auto& c : j.at("cells")) {
            Id id = c.at("id").get<Id>();
            if (s.cells.count(id)) throw Error("duplicate cell id " + id);
            s.cells[id] = Cell{parse_type(c.at("type").get<std::string>()), c.at("arity").get<int>()};
        }
        for (const auto& p : j.at("ports")) s.ports.insert(p.get<Id>());
        for (const auto& [c, ps] : j.at("attach").items()) s.attach[c] = ps.get<IdSet>();
        for (const auto& [c, p] : j.at("principal").items()) s.principal[c] = p.get<Id>();
        if (j.contains("left"))
            for (const auto& [c, p] : j.at("left").items()) s.left[c] = p.get<Id>();
        if (j.contains("doors"))
            for (const auto& [p, n] : j.at("doors").items()) s.doors[p] = n.get<int>();
        for (const auto& w : j.at("wires")) {
            if (!w.is_array() || w.size() != 2) throw Error("a wire must be a pair of ports");
            auto a = w[0].get<Id>(), b = w[1].get<Id>();
            if (!s.ports.count(a) || !s.ports.count(b)) throw Error("wire on unknown port");
            if (!s.wires.insert(make_wire(a, b)).second) throw Error("duplicate wire " + a + " " + b);
        }
        if (j.contains("boxes")) {
            f.has_boxes = true;
            for (const auto& [c, ps] : j.at("boxes").items()) f.x.r.b[c] = ps.get<IdSet>();
        }
        if (j.contains("ind")) {
            f.has_ind = true;
            for (const auto& [p, i] : j.at("ind").items()) f.x.ind[p] = i.get<int>();
        }
    } catch (const json::exception& e) {
        throw Error(std::string("structure file: ") + e.what());
    }
    topology(s);  // well-formedness
    if (!f.has_ind) f.x.ind = default_ind(s);
    else if (!valid_ind(s, f.x.ind)) throw Error("structure file: ind is not a bijection onto the conclusions");
    return f;
}

inline json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(what + ": syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

inline StructureFile parse_structure(const std::string& text) {
    return structure_from_json(parse_json_text(text, "structure file"));
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- experiment descriptions -----------------------------------------------

inline ExperimentDesc desc_from_json(const json& j) {
    ExperimentDesc d;
    try {
        if (j.contains("axiom_labels"))
            for (const auto& [p, v] : j.at("axiom_labels").items()) d.axiom_labels.emplace(p, parse_value(v.get<std::string>()));
        if (j.contains("boxes"))
            for (const auto& [c, outer] : j.at("boxes").items()) {
                std::vector<std::vector<ExperimentDesc>> bags;
                for (const auto& bag : outer) {
                    std::vector<ExperimentDesc> copies;
                    for (const auto& x : bag) copies.push_back(desc_from_json(x));
                    bags.push_back(std::move(copies));
                }
                d.boxes[c] = std::move(bags);
            }
    } catch (const json::exception& e) {
        throw Error(std::string("experiment file: ") + e.what());
    }
    return d;
}

inline json to_json(const ExperimentDesc& d) {
    json j = json::object();
    j["axiom_labels"] = json::object();
    for (const auto& [p, v] : d.axiom_labels) j["axiom_labels"][p] = to_string(v);
    j["boxes"] = json::object();
    for (const auto& [c, bags] : d.boxes) {
        json outer = json::array();
        for (const auto& bag : bags) {
            json inner = json::array();
            for (const auto& x : bag) inner.push_back(to_json(x));
            outer.push_back(inner);
        }
        j["boxes"][c] = outer;
    }
    return j;
}

inline json tuple_json(const Tuple& r) {
    json a = json::array();
    for (const auto& v : r) a.push_back(to_string(v));
    return a;
}

inline json to_json(const KExperiment& e) {
    return {{"k", e.k}, {"result", tuple_json(e.result)}, {"atomic", e.atomic}, {"injective", e.injective}};
}

// ---- verdicts --------------------------------------------------------------

inline json pinj_json(const PInj& rho) {
    json j = json::object();
    for (const auto& [a, b] : rho) j[to_string(a)] = to_string(b);
    return j;
}

inline json to_json(const StructIso& phi) { return {{"cells", phi.cells}, {"ports", phi.ports}}; }

inline json to_json(const SeparationVerdict& v) {
    json j = json::object();
    j["outcome"] = v.same_lps ? "same_lps" : "different_lps";
    j["k"] = v.k;
    if (v.witness) {
        j["witness"] = {{"cells", v.witness->phi.cells},
                        {"ports", v.witness->phi.ports},
                        {"rho", pinj_json(v.witness->rho)},
                        {"rho_prime", pinj_json(v.witness->rho2)}};
    } else {
        j["trace"] = {{"path", v.trace.path}, {"reason", v.trace.reason}};
    }
    if (v.boxes_checked) j["same_ps"] = v.same_ps;
    if (!v.note.empty()) j["note"] = v.note;
    return j;
}

inline std::string summary(const SeparationVerdict& v) {
    std::string out = std::string(v.same_lps ? "same_lps" : "different_lps") + " (k=" + std::to_string(v.k) + ")";
    if (!v.same_lps) out += ": " + v.trace.str();
    if (v.boxes_checked) out += v.same_ps ? "; boxes correspond" : "; boxes differ";
    if (!v.note.empty()) out += "; " + v.note;
    return out;
}

}  // namespace mell
