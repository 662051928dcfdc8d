#pragma once

#include <string>

#include "structure.hpp"

namespace mell {

inline std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

// Cells and free ports are nodes; wires and conclusions are edges.
inline std::string render_dot(const Structure& s, const Ind& ind = {}) {
    auto t = topology(s);
    auto concl = conclusions(s, t);
    auto node = [&](const Id& p) { return t.attached(p) ? "cell:" + t.owner.at(p) : "port:" + p; };
    std::string out = "digraph structure {\n  rankdir=BT;\n";
    for (const auto& [c, cell] : s.cells)
        out += "  " + dot_quote("cell:" + c) + " [shape=box,label=" + dot_quote(std::string(type_name(cell.type)) + " " + c) + "];\n";
    for (const auto& p : s.ports)
        if (!t.attached(p)) out += "  " + dot_quote("port:" + p) + " [shape=point,xlabel=" + dot_quote(p) + "];\n";
    for (const auto& p : concl) {
        std::string label = p;
        auto it = ind.find(p);
        if (it != ind.end()) label += " #" + std::to_string(it->second);
        out += "  " + dot_quote("concl:" + p) + " [shape=plaintext,label=" + dot_quote(label) + "];\n";
        out += "  " + dot_quote("concl:" + p) + " -> " + dot_quote(node(p)) + " [style=dotted];\n";
    }
    for (const auto& [a, b] : s.wires) {
        std::string la = a, lb = b;
        auto da = s.doors.find(a), db = s.doors.find(b);
        if (da != s.doors.end() && da->second) la += " [" + std::to_string(da->second) + "]";
        if (db != s.doors.end() && db->second) lb += " [" + std::to_string(db->second) + "]";
        out += "  " + dot_quote(node(a)) + " -> " + dot_quote(node(b)) + " [dir=none,taillabel=" + dot_quote(la) +
               ",headlabel=" + dot_quote(lb) + "];\n";
    }
    return out + "}\n";
}

}  // namespace mell
