// Command-line front end: parses the graph/model/cover file formats,
// dispatches the operations and emits canonical JSON or DOT.
//
// Exit codes: 0 success, 1 validation failure, 2 precondition or usage
// error, 3 internal invariant breach (a bug on inputs that validate).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ssred/ssred.hpp"

namespace {

using namespace ssred;

struct Output {
    std::string path; // empty = stdout
    void write(const std::string& payload) const {
        if (path.empty()) {
            std::cout << payload;
            return;
        }
        std::ofstream out(path);
        if (!out) throw PreconditionError("file-error", "cannot write " + path);
        out << payload;
    }
};

std::set<VertexId> parse_vertex_list(const std::string& csv) {
    std::set<VertexId> out;
    std::string cur;
    std::istringstream in(csv);
    while (std::getline(in, cur, ',')) {
        if (cur.empty()) continue;
        out.insert(VertexId{std::stoll(cur)});
    }
    return out;
}

DualGraph load_graph(const std::string& path) { return graph_from_json(load_json_file(path)); }

std::pair<DualGraph, std::set<VertexId>> load_model_file(const std::string& path) {
    return model_from_json(load_json_file(path));
}

CoverDatum load_cover(const std::string& path) { return cover_from_json(load_json_file(path)); }

void require_valid_graph(const DualGraph& g) {
    Diagnostics d = validate_graph(g);
    if (!d.ok()) throw ValidationError(std::move(d));
}

void require_valid_cover(const CoverDatum& c) {
    Diagnostics d = validate_cover(c);
    if (!d.ok()) throw ValidationError(std::move(d));
}

int dispatch(int argc, char** argv) {
    CLI::App app{"exact combinatorics of semi-stable reduction on dual graphs"};
    app.require_subcommand(1);

    std::string file, file2, out_path, victims_csv, ex_source_csv, ex_target_csv, action_path;
    std::string format = "json";
    std::int64_t index = 1;
    std::size_t bound = 8;
    int jobs = 1;
    bool marked = false;
    bool allow_genus_one = false;

    auto add_format = [&format](CLI::App* cmd) {
        cmd->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"json", "dot"}));
    };
    auto add_out = [&out_path](CLI::App* cmd) {
        cmd->add_option("-o,--output", out_path, "write output to a file instead of stdout");
    };

    CLI::App* validate = app.add_subcommand("validate", "validate a graph, model or cover file");
    validate->add_option("file", file)->required();
    add_out(validate);

    CLI::App* genus = app.add_subcommand("genus", "arithmetic genus of a graph");
    genus->add_option("file", file)->required();
    add_out(genus);

    CLI::App* omega = app.add_subcommand("omega", "omega-degrees of every vertex");
    omega->add_option("file", file)->required();
    omega->add_flag("--marked", marked, "count legs as markings");
    add_out(omega);

    CLI::App* desing = app.add_subcommand("desing", "minimal desingularization of a graph");
    desing->add_option("file", file)->required();
    add_out(desing);
    add_format(desing);

    CLI::App* contract_cmd = app.add_subcommand("contract", "contract a set of vertices");
    contract_cmd->add_option("file", file)->required();
    contract_cmd->add_option("--victims", victims_csv, "comma-separated vertex ids")->required();
    add_out(contract_cmd);
    add_format(contract_cmd);

    CLI::App* basechange = app.add_subcommand("basechange", "scale a graph by a base change");
    basechange->add_option("file", file)->required();
    basechange->add_option("-e,--index", index, "ramification index")->required();
    add_out(basechange);
    add_format(basechange);

    CLI::App* split = app.add_subcommand("split-index", "least index making markings integral");
    split->add_option("file", file)->required();
    add_out(split);

    CLI::App* hull_cmd = app.add_subcommand("hull", "stable hull of a model");
    hull_cmd->add_option("file", file)->required();
    add_out(hull_cmd);
    add_format(hull_cmd);

    CLI::App* mhull = app.add_subcommand("marked-hull", "stable marked hull of a model");
    mhull->add_option("file", file)->required();
    add_out(mhull);
    add_format(mhull);

    CLI::App* mmodel = app.add_subcommand("marked-model", "stable marked model of a graph");
    mmodel->add_option("file", file)->required();
    add_out(mmodel);
    add_format(mmodel);

    CLI::App* join = app.add_subcommand("join", "join of two models on a common top");
    join->add_option("file", file)->required();
    join->add_option("file2", file2)->required();
    add_out(join);

    CLI::App* cvalidate = app.add_subcommand("cover-validate", "validate a cover file");
    cvalidate->add_option("file", file)->required();
    add_out(cvalidate);

    CLI::App* cstable = app.add_subcommand("cover-stable", "stable model of a cover");
    cstable->add_option("file", file)->required();
    cstable->add_flag("--allow-genus-one-good", allow_genus_one,
                      "caller asserts potentially good reduction for a genus-1 source");
    add_out(cstable);
    add_format(cstable);

    CLI::App* chull = app.add_subcommand("cover-hull", "stable hull of a cover");
    chull->add_option("file", file)->required();
    chull->add_option("--ex-source", ex_source_csv, "exceptional source vertices")->required();
    chull->add_option("--ex-target", ex_target_csv, "exceptional target vertices")->required();
    add_out(chull);
    add_format(chull);

    CLI::App* cbase = app.add_subcommand("cover-basechange", "base change of a cover");
    cbase->add_option("file", file)->required();
    cbase->add_option("-e,--index", index, "ramification index")->required();
    add_out(cbase);
    add_format(cbase);

    CLI::App* quot = app.add_subcommand("quotient", "quotient of a graph by a group action");
    quot->add_option("file", file)->required();
    quot->add_option("--action", action_path, "action file")->required();
    add_out(quot);
    add_format(quot);

    CLI::App* rh = app.add_subcommand("rh", "Riemann-Hurwitz defects of a cover");
    rh->add_option("file", file)->required();
    add_out(rh);

    CLI::App* oracle_cmd = app.add_subcommand("oracle", "exhaustive contraction poset");
    oracle_cmd->add_option("file", file)->required();
    oracle_cmd->add_option("--bound", bound, "vertex bound");
    oracle_cmd->add_option("--jobs", jobs, "parallel expansion threads");
    oracle_cmd->add_option("--ex-source", ex_source_csv, "cover hull: exceptional source");
    oracle_cmd->add_option("--ex-target", ex_target_csv, "cover hull: exceptional target");
    add_out(oracle_cmd);
    add_format(oracle_cmd);

    CLI::App* dot = app.add_subcommand("export-dot", "render a file as DOT");
    dot->add_option("file", file)->required();
    dot->add_option("-o,--output", out_path, "output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    Output out{out_path};

    if (*validate) {
        json j = load_json_file(file);
        Diagnostics d;
        switch (sniff_kind(j)) {
            case FileKind::Cover:
                d = validate_cover(cover_from_json(j));
                break;
            case FileKind::ModelFile: {
                auto [top, ex] = model_from_json(j);
                d = validate_model(top, ex);
                break;
            }
            default:
                d = validate_graph(graph_from_json(j));
        }
        out.write(dump_canonical(diagnostics_to_json(d)));
        if (!d.ok()) {
            std::cerr << "invalid: " << d.summary() << "\n";
            return 1;
        }
        return 0;
    }
    if (*genus) {
        DualGraph g = load_graph(file);
        require_valid_graph(g);
        out.write(dump_canonical(json{{"arithmetic_genus", arithmetic_genus(g)}}));
        return 0;
    }
    if (*omega) {
        DualGraph g = load_graph(file);
        require_valid_graph(g);
        json degrees = json::object();
        for (const auto& [v, data] : g.vertices()) {
            degrees[std::to_string(v.value)] = omega_degree(g, v, marked);
        }
        out.write(dump_canonical(json{{"omega_degrees", degrees}, {"marked", marked}}));
        return 0;
    }
    if (*desing) {
        DesingularizeResult r = desingularize(load_graph(file));
        if (format == "dot") {
            out.write(dot_graph(r.graph, &r.exceptional));
            return 0;
        }
        json ex = json::array();
        for (VertexId v : r.exceptional) ex.push_back(v.value);
        out.write(dump_canonical(json{{"graph", graph_to_json(r.graph)},
                                      {"exceptional", ex},
                                      {"trace", trace_to_json(r.trace)}}));
        return 0;
    }
    if (*contract_cmd) {
        DualGraph g = load_graph(file);
        require_valid_graph(g);
        ContractResult r = contract(g, parse_vertex_list(victims_csv));
        if (format == "dot") {
            out.write(dot_graph(r.graph));
            return 0;
        }
        out.write(dump_canonical(
            json{{"graph", graph_to_json(r.graph)}, {"trace", trace_to_json(r.trace)}}));
        return 0;
    }
    if (*basechange) {
        DualGraph g = load_graph(file);
        require_valid_graph(g);
        DualGraph scaled = base_change(g, index);
        out.write(format == "dot" ? dot_graph(scaled) : dump_canonical(graph_to_json(scaled)));
        return 0;
    }
    if (*split) {
        DualGraph g = load_graph(file);
        require_valid_graph(g);
        out.write(dump_canonical(json{{"splitting_index", splitting_index(g)}}));
        return 0;
    }
    if (*hull_cmd) {
        auto [top, ex] = load_model_file(file);
        HullResult r = stable_hull(make_model(std::move(top), std::move(ex)));
        out.write(format == "dot" ? dot_graph(r.hull, &r.kept_exceptional)
                                  : dump_canonical(hull_result_to_json(r)));
        return 0;
    }
    if (*mhull) {
        auto [top, ex] = load_model_file(file);
        HullResult r = stable_marked_hull(top, ex);
        out.write(format == "dot" ? dot_graph(r.hull, &r.kept_exceptional)
                                  : dump_canonical(hull_result_to_json(r)));
        return 0;
    }
    if (*mmodel) {
        DualGraph g = stable_marked_model(load_graph(file));
        out.write(format == "dot" ? dot_graph(g) : dump_canonical(graph_to_json(g)));
        return 0;
    }
    if (*join) {
        auto [top1, ex1] = load_model_file(file);
        auto [top2, ex2] = load_model_file(file2);
        Model m = join_models(make_model(std::move(top1), std::move(ex1)),
                              make_model(std::move(top2), std::move(ex2)));
        out.write(dump_canonical(model_to_json(m)));
        return 0;
    }
    if (*cvalidate) {
        Diagnostics d = validate_cover(load_cover(file));
        out.write(dump_canonical(diagnostics_to_json(d)));
        if (!d.ok()) {
            std::cerr << "invalid: " << d.summary() << "\n";
            return 1;
        }
        return 0;
    }
    if (*cstable) {
        CoverContraction r = stable_model_of_cover(load_cover(file), allow_genus_one);
        out.write(format == "dot" ? dot_cover(r.datum)
                                  : dump_canonical(cover_contraction_to_json(r)));
        return 0;
    }
    if (*chull) {
        CoverContraction r = stable_hull_of_cover(
            load_cover(file), parse_vertex_list(ex_source_csv), parse_vertex_list(ex_target_csv));
        out.write(format == "dot" ? dot_cover(r.datum)
                                  : dump_canonical(cover_contraction_to_json(r)));
        return 0;
    }
    if (*cbase) {
        CoverDatum c = base_change_cover(load_cover(file), index);
        out.write(format == "dot" ? dot_cover(c) : dump_canonical(cover_to_json(c)));
        return 0;
    }
    if (*quot) {
        DualGraph g = load_graph(file);
        require_valid_graph(g);
        ActionFile action = action_from_json(load_json_file(action_path));
        std::map<EdgeId, std::int64_t> stab;
        if (action.edge_stabilizer_orders) {
            stab = *action.edge_stabilizer_orders;
        } else {
            for (const auto& [e, data] : g.edges()) {
                std::int64_t n = 0;
                for (const auto& a : action.elements) {
                    if (a.edge_map.count(e) && a.edge_map.at(e).first == e) ++n;
                }
                stab[e] = n;
            }
        }
        CoverDatum c = quotient_by_action(g, action.elements, stab, action.quotient_genera);
        out.write(format == "dot" ? dot_cover(c) : dump_canonical(cover_to_json(c)));
        return 0;
    }
    if (*rh) {
        CoverDatum c = load_cover(file);
        require_valid_cover(c);
        json defects = json::object();
        for (const auto& [v, data] : c.source.vertices()) {
            defects[std::to_string(v.value)] = rh_defect(c, v);
        }
        out.write(dump_canonical(json{{"rh_defect", defects}}));
        return 0;
    }
    if (*oracle_cmd) {
        json j = load_json_file(file);
        DominationPoset poset;
        if (sniff_kind(j) == FileKind::Cover) {
            CoverDatum c = cover_from_json(j);
            std::set<VertexId> ex_s, ex_t;
            if (!ex_source_csv.empty() || !ex_target_csv.empty()) {
                ex_s = parse_vertex_list(ex_source_csv);
                ex_t = parse_vertex_list(ex_target_csv);
            } else {
                for (const auto& [v, data] : c.source.vertices()) ex_s.insert(v);
                for (const auto& [w, data] : c.target.vertices()) ex_t.insert(w);
            }
            poset = enumerate_cover_contractions(c, std::move(ex_s), std::move(ex_t), bound, jobs)
                        .poset;
        } else {
            auto [top, ex] = model_from_json(j);
            poset = enumerate_contractions(make_model(std::move(top), std::move(ex)), bound, jobs)
                        .poset;
        }
        out.write(format == "dot" ? dot_poset(poset) : dump_canonical(poset_to_json(poset)));
        return 0;
    }
    if (*dot) {
        json j = load_json_file(file);
        switch (sniff_kind(j)) {
            case FileKind::Cover:
                out.write(dot_cover(cover_from_json(j)));
                break;
            case FileKind::ModelFile: {
                auto [top, ex] = model_from_json(j);
                out.write(dot_graph(top, &ex));
                break;
            }
            default:
                out.write(dot_graph(graph_from_json(j)));
        }
        return 0;
    }
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const ssred::ValidationError& e) {
        std::cout << ssred::dump_canonical(ssred::diagnostics_to_json(e.diagnostics()));
        std::cerr << "invalid: " << e.what() << "\n";
        return 1;
    } catch (const ssred::PreconditionError& e) {
        ssred::json j{{"error", e.rule()}, {"message", e.what()}};
        if (e.payload()) j["splitting_index"] = *e.payload();
        std::cout << ssred::dump_canonical(j);
        std::cerr << "precondition: " << e.what() << "\n";
        return 2;
    } catch (const ssred::InternalError& e) {
        std::cerr << "internal invariant breach: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
