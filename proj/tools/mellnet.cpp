// mellnet: command-line front end for the proof-structure library.
// Exit codes: 0 success, 1 negative verdict, 2 error.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "mell/dot.hpp"
#include "mell/fixtures.hpp"
#include "mell/generator.hpp"
#include "mell/io.hpp"
#include "mell/iso.hpp"
#include "mell/separation.hpp"

using namespace mell;

namespace {

StructureFile load(const std::string& path) {
    if (path.rfind("fixture:", 0) == 0) {
        StructureFile f;
        f.x = fixtures::by_name(path.substr(8));
        f.has_boxes = f.has_ind = true;
        return f;
    }
    return parse_structure(read_file(path));
}

IndexedPS load_ps(const std::string& path) {
    auto f = load(path);
    if (!f.has_boxes) {
        bool bangs = false;
        for (const auto& [c, cell] : f.x.r.s.cells)
            if (cell.type == CellType::Bang) bangs = true;
        if (bangs) throw Error(path + ": no box function given (try recover-boxes)");
    }
    return f.x;
}

std::vector<Atom> parse_pool(const std::string& csv) {
    std::vector<Atom> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(Atom{tok, {}});
    if (out.empty()) throw Error("empty atom pool");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"untyped MELL proof-structures: validation, experiments, isomorphism and separation"};
    app.require_subcommand(1);
    std::string format = "text";
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "dot", "text"}));

    std::string file, file2, desc, pool_csv = "a,b,c,d";
    int k = 2, max_copies = 2;
    GeneratorConfig gen;
    bool no_weakening = false;

    auto* validate_cmd = app.add_subcommand("validate", "refinement level and violations");
    validate_cmd->add_option("file", file)->required();
    auto* classify_cmd = app.add_subcommand("classify", "class of an lps");
    classify_cmd->add_option("file", file)->required();
    auto* depth_cmd = app.add_subcommand("depth", "depth of every port");
    depth_cmd->add_option("file", file)->required();
    auto* kpoint_cmd = app.add_subcommand("kpoint", "canonical injective atomic k-experiment result");
    kpoint_cmd->add_option("file", file)->required();
    kpoint_cmd->add_option("--k", k)->check(CLI::PositiveNumber);
    auto* exp_cmd = app.add_subcommand("experiment", "evaluate an experiment description");
    exp_cmd->add_option("file", file)->required();
    exp_cmd->add_option("desc", desc)->required();
    auto* sample_cmd = app.add_subcommand("sample", "bounded enumeration of the interpretation");
    sample_cmd->add_option("file", file)->required();
    sample_cmd->add_option("--atom-pool", pool_csv);
    sample_cmd->add_option("--max-copies", max_copies)->check(CLI::NonNegativeNumber);
    auto* iso_cmd = app.add_subcommand("iso", "structure isomorphism (with boxes when both files have them)");
    iso_cmd->add_option("a", file)->required();
    iso_cmd->add_option("b", file2)->required();
    auto* sep_cmd = app.add_subcommand("separate", "semantic separation of two proof-structures");
    sep_cmd->add_option("a", file)->required();
    sep_cmd->add_option("b", file2)->required();
    auto* sepc_cmd = app.add_subcommand("separate-connected", "separation plus box recovery");
    sepc_cmd->add_option("a", file)->required();
    sepc_cmd->add_option("b", file2)->required();
    auto* rec_cmd = app.add_subcommand("recover-boxes", "the unique box function of a connected lps");
    rec_cmd->add_option("file", file)->required();
    auto* canon_cmd = app.add_subcommand("canonicalize", "print a structure file in canonical form");
    canon_cmd->add_option("file", file)->required();
    auto* render_cmd = app.add_subcommand("render", "graphviz output");
    render_cmd->add_option("file", file)->required();
    auto* gen_cmd = app.add_subcommand("generate", "random proof-structure");
    gen_cmd->add_option("--seed", gen.seed);
    gen_cmd->add_option("--max-cells", gen.max_cells);
    gen_cmd->add_option("--max-depth", gen.max_depth);
    gen_cmd->add_flag("--connected", gen.connected);
    gen_cmd->add_flag("--no-weakening", no_weakening);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const bool js = format == "json";
        if (*validate_cmd) {
            auto f = load(file);
            auto v = validate(f.x.r.s);
            bool ok = v.level == Level::lps;
            std::vector<std::string> ps_bad;
            if (ok && f.has_boxes) ps_bad = ps_violations(f.x.r);
            ok = ok && ps_bad.empty();
            if (js) {
                json j{{"level", level_name(v.level)}, {"violations", v.violations}};
                if (f.has_boxes) j["ps_violations"] = ps_bad;
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << level_name(v.level) << "\n";
                for (const auto& x : v.violations) std::cout << "  " << x << "\n";
                if (f.has_boxes) std::cout << (ps_bad.empty() ? "proof-structure" : "not a proof-structure") << "\n";
                for (const auto& x : ps_bad) std::cout << "  " << x << "\n";
            }
            return ok ? 0 : 1;
        }
        if (*classify_cmd) {
            auto f = load(file);
            require_level(f.x.r.s, Level::lps, "classify");
            std::cout << class_name(classify(f.x.r.s)) << "\n";
            return 0;
        }
        if (*depth_cmd) {
            auto f = load(file);
            require_level(f.x.r.s, Level::plps, "depth");
            auto d = all_depths(f.x.r.s, topology(f.x.r.s));
            if (js) std::cout << json(d).dump(2) << "\n";
            else
                for (const auto& [p, n] : d) std::cout << p << " " << n << "\n";
            return 0;
        }
        if (*kpoint_cmd) {
            auto f = load(file);
            auto e = canonical_injective_atomic(f.x.lps(), k);
            if (js) std::cout << to_json(e).dump(2) << "\n";
            else std::cout << to_string(e.result) << "\n";
            return 0;
        }
        if (*exp_cmd) {
            auto x = load_ps(file);
            auto d = desc_from_json(parse_json_text(read_file(desc), "experiment file"));
            auto run = eval_ps_experiment(x, d);
            if (js) std::cout << json{{"result", tuple_json(run.result)}}.dump(2) << "\n";
            else std::cout << to_string(run.result) << "\n";
            return 0;
        }
        if (*sample_cmd) {
            auto x = load_ps(file);
            auto s = sample_interpretation(x, parse_pool(pool_csv), max_copies);
            if (js) {
                json a = json::array();
                for (const auto& r : s.results) a.push_back(tuple_json(r));
                std::cout << json{{"results", a}, {"truncated", s.truncated}}.dump(2) << "\n";
            } else {
                for (const auto& r : s.results) std::cout << to_string(r) << "\n";
                if (s.truncated) std::cout << "truncated\n";
            }
            return 0;
        }
        if (*iso_cmd) {
            auto fa = load(file), fb = load(file2);
            std::optional<StructIso> phi;
            if (fa.has_boxes && fb.has_boxes) phi = iso_ps(fa.x, fb.x);
            else phi = iso_structure(fa.x.lps(), fb.x.lps());
            if (js) std::cout << (phi ? json{{"iso", true}, {"witness", to_json(*phi)}} : json{{"iso", false}}).dump(2) << "\n";
            else std::cout << (phi ? "isomorphic\n" + format_iso(*phi) : std::string("not isomorphic\n"));
            return phi ? 0 : 1;
        }
        if (*sep_cmd || *sepc_cmd) {
            auto a = load_ps(file), b = load_ps(file2);
            auto v = *sep_cmd ? separate(a, b) : separate_connected(a, b);
            if (js) std::cout << to_json(v).dump(2) << "\n";
            else {
                std::cout << summary(v) << "\n";
                if (v.witness) std::cout << format_iso(v.witness->phi) << "atoms:\n" << format_pinj(v.witness->rho);
            }
            bool ok = v.same_lps && (!v.boxes_checked || v.same_ps);
            return ok ? 0 : 1;
        }
        if (*rec_cmd) {
            auto f = load(file);
            IndexedPS x{recover_boxes(f.x.r.s), f.x.ind};
            std::cout << serialize(x);
            return 0;
        }
        if (*canon_cmd) {
            auto f = load(file);
            std::cout << serialize(f.x, f.has_boxes, f.has_ind);
            return 0;
        }
        if (*render_cmd) {
            auto f = load(file);
            std::cout << render_dot(f.x.r.s, f.x.ind);
            return 0;
        }
        if (*gen_cmd) {
            gen.allow_weakening = !no_weakening;
            auto x = generate_ps(gen);
            if (format == "dot") std::cout << render_dot(x.r.s, x.ind);
            else std::cout << serialize(x);
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
