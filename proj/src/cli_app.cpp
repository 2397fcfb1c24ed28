#include "pathsum/cli_app.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pathsum/bounds.hpp"
#include "pathsum/engine.hpp"
#include "pathsum/errors.hpp"
#include "pathsum/graph.hpp"
#include "pathsum/matrix_io.hpp"
#include "pathsum/oracle.hpp"

namespace pathsum {

namespace {

// Shortest representation that parses back to the same double; goldens stay
// byte-stable across platforms with a correct to_chars.
std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct EntrySel {
    bool all = false;
    int row = 1; // 1-based
    int col = 1;
};

EntrySel parse_entry(const std::string& text) {
    EntrySel sel;
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw InputError("--entry wants the form R,C (1-based)");
    try {
        sel.row = std::stoi(text.substr(0, comma));
        sel.col = std::stoi(text.substr(comma + 1));
    } catch (const std::exception&) {
        throw InputError("--entry wants the form R,C (1-based)");
    }
    return sel;
}

void check_entry(const EntrySel& sel, int n) {
    if (sel.row < 1 || sel.row > n || sel.col < 1 || sel.col > n)
        throw InputError("--entry indices must lie in 1.." + std::to_string(n));
}

struct DRange {
    int lo = 0;
    int hi = 0;
};

DRange parse_d_range(const std::string& text) {
    DRange r;
    const auto dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            r.lo = r.hi = std::stoi(text);
        } else {
            r.lo = std::stoi(text.substr(0, dots));
            r.hi = std::stoi(text.substr(dots + 2));
        }
    } catch (const std::exception&) {
        throw InputError("--d wants an integer or a range A..B");
    }
    if (r.lo < 0 || r.hi < r.lo)
        throw InputError("--d range must satisfy 0 <= A <= B");
    return r;
}

std::vector<int> parse_coords(const std::string& text) {
    std::vector<int> coords;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            coords.push_back(std::stoi(part));
        } catch (const std::exception&) {
            throw InputError("--coords wants comma-separated integers");
        }
    }
    if (coords.empty()) throw InputError("--coords wants comma-separated integers");
    return coords;
}

// Either the stream handed to run_cli or a file the user asked for.
class OutputTarget {
  public:
    OutputTarget(const std::string& path, std::ostream& fallback) {
        if (path.empty() || path == "stdout") {
            stream_ = &fallback;
            return;
        }
        file_.open(path, std::ios::binary);
        if (!file_) throw InputError("cannot open output file: " + path);
        stream_ = &file_;
    }
    std::ostream& get() { return *stream_; }

  private:
    std::ofstream file_;
    std::ostream* stream_ = nullptr;
};

nlohmann::json values_json(const std::vector<double>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (double x : v) arr.push_back(x);
    return arr;
}

// ---- compute ----

struct ComputeConfig {
    std::string matrix_path;
    int grid_n = 400;
    std::string entry_text;
    bool all = false;
    std::string format = "csv";
    std::string out_path;
};

int cmd_compute(const ComputeConfig& cfg, std::ostream& out_stream) {
    const MatrixSpec spec = load_matrix_file(cfg.matrix_path);
    const TimeGrid grid = spec.grid(cfg.grid_n);
    Engine engine(spec, grid);

    std::vector<PropagatorResult> results;
    if (cfg.all || cfg.entry_text.empty()) {
        results = engine.full_propagator();
    } else {
        const EntrySel sel = parse_entry(cfg.entry_text);
        check_entry(sel, spec.n);
        results.push_back(engine.path_sum_entry(sel.row - 1, sel.col - 1));
    }

    OutputTarget target(cfg.out_path, out_stream);
    std::ostream& os = target.get();

    if (cfg.format == "csv") {
        os << "t";
        if (results.size() == 1) {
            os << ",value";
        } else {
            for (const auto& r : results)
                os << ",e" << (r.omega + 1) << "_" << (r.alpha + 1);
        }
        os << "\n";
        for (int i = 0; i < grid.n_nodes; ++i) {
            os << fmt(grid.node(i));
            for (const auto& r : results) os << "," << fmt(r.values[i]);
            os << "\n";
        }
        return 0;
    }

    nlohmann::json doc;
    doc["n"] = spec.n;
    doc["grid"] = grid.n_nodes;
    doc["interval"] = {spec.t_min, spec.t_max};
    doc["t"] = values_json(grid.nodes);
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& r : results) {
        nlohmann::json e;
        e["row"] = r.omega + 1;
        e["col"] = r.alpha + 1;
        e["values"] = values_json(r.values);
        e["paths_used"] = r.paths_used;
        e["cycles_used"] = r.cycles_used;
        e["recursion_depth"] = r.recursion_depth;
        entries.push_back(std::move(e));
    }
    doc["entries"] = std::move(entries);
    os << doc.dump(2) << "\n";
    return 0;
}

// ---- verify ----

struct VerifyConfig {
    std::string matrix_path;
    int grid_n = 400;
    double tolerance = 1e-3;
    int substeps = 4;
    std::string out_path;
};

int cmd_verify(const VerifyConfig& cfg, std::ostream& out_stream) {
    const MatrixSpec spec = load_matrix_file(cfg.matrix_path);
    const TimeGrid grid = spec.grid(cfg.grid_n);
    const int n = spec.n;

    Engine engine(spec, grid);
    const auto results = engine.full_propagator();
    const OracleResult rk = rk4_propagator(spec, grid, cfg.substeps);
    const int order = neumann_order_for_tolerance(spec, grid);
    const OracleResult nm = neumann_truncated(spec, grid, order);

    double dev_rk4 = 0.0, dev_neumann = 0.0;
    for (int i = 0; i < grid.n_nodes; ++i) {
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                const double v = results[static_cast<std::size_t>(r) * n + c].values[i];
                dev_rk4 = std::max(dev_rk4, std::abs(v - rk.at(i, r, c)));
                dev_neumann = std::max(dev_neumann, std::abs(v - nm.at(i, r, c)));
            }
        }
    }

    // Centered difference of the computed series against H(t) times itself.
    double residual = 0.0;
    std::vector<double> ht(static_cast<std::size_t>(n) * n);
    for (int i = 1; i + 1 < grid.n_nodes; ++i) {
        for (const MatrixEntry& e : spec.entries)
            ht[static_cast<std::size_t>(e.row) * n + e.col] =
                expr::evaluate(e.tree, grid.node(i));
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                const auto& series = results[static_cast<std::size_t>(r) * n + c];
                const double deriv =
                    (series.values[i + 1] - series.values[i - 1]) / (2.0 * grid.dt);
                double rhs = 0.0;
                for (int k = 0; k < n; ++k) {
                    const double h_rk = ht[static_cast<std::size_t>(r) * n + k];
                    if (h_rk == 0.0) continue;
                    rhs += h_rk * results[static_cast<std::size_t>(k) * n + c].values[i];
                }
                residual = std::max(residual, std::abs(deriv - rhs));
            }
        }
        std::fill(ht.begin(), ht.end(), 0.0);
    }

    const bool pass = dev_rk4 <= cfg.tolerance && dev_neumann <= cfg.tolerance &&
                      residual <= cfg.tolerance;

    OutputTarget target(cfg.out_path, out_stream);
    std::ostream& os = target.get();
    os << "engine_vs_rk4 " << fmt(dev_rk4) << "\n";
    os << "engine_vs_neumann " << fmt(dev_neumann) << "\n";
    os << "ode_residual " << fmt(residual) << "\n";
    os << "neumann_order " << order << "\n";
    os << "tolerance " << fmt(cfg.tolerance) << "\n";
    os << "verdict " << (pass ? "pass" : "fail") << "\n";
    return pass ? 0 : 1;
}

// ---- bounds ----

struct BoundsConfig {
    std::string structure;
    double h = 1.0;
    double elapsed = 1.0;
    double beta = 1.0;
    std::string d_text = "0";
    int N = 2;
    int max_deg = 1;
    std::string coords_text;
    std::string matrix_path;
    std::string entry_text;
    int grid_n = 400;
    std::string format = "csv";
    std::string out_path;
};

int cmd_bounds_structure(const BoundsConfig& cfg, std::ostream& os) {
    std::vector<std::pair<int, double>> rows;
    if (cfg.structure == "lattice") {
        const auto coords = parse_coords(cfg.coords_text);
        int d = 0;
        for (int a : coords) d += std::abs(a);
        rows.emplace_back(d, bound_lattice(cfg.h, cfg.elapsed, coords));
    } else {
        const DRange dr = parse_d_range(cfg.d_text);
        for (int d = dr.lo; d <= dr.hi; ++d) {
            double value = 0.0;
            if (cfg.structure == "tridiagonal")
                value = bound_tridiagonal(cfg.h, cfg.elapsed, d);
            else if (cfg.structure == "bethe")
                value = bound_bethe(cfg.h, cfg.elapsed, cfg.N, d);
            else if (cfg.structure == "hypercube")
                value = bound_hypercube(cfg.beta * cfg.h, cfg.elapsed, cfg.N, d);
            else if (cfg.structure == "generic")
                value = bound_generic(cfg.h, cfg.elapsed, cfg.max_deg, d);
            else
                throw InputError("unknown structure: " + cfg.structure);
            rows.emplace_back(d, value);
        }
    }

    if (cfg.format == "csv") {
        os << "d,bound\n";
        for (const auto& [d, v] : rows) os << d << "," << fmt(v) << "\n";
        return 0;
    }
    nlohmann::json doc;
    doc["structure"] = cfg.structure;
    doc["h"] = cfg.h;
    doc["elapsed"] = cfg.elapsed;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [d, v] : rows) arr.push_back({{"d", d}, {"bound", v}});
    doc["rows"] = std::move(arr);
    os << doc.dump(2) << "\n";
    return 0;
}

int cmd_bounds_matrix(const BoundsConfig& cfg, std::ostream& os) {
    const MatrixSpec spec = load_matrix_file(cfg.matrix_path);
    const TimeGrid grid = spec.grid(cfg.grid_n);
    EntrySel sel;
    if (!cfg.entry_text.empty()) sel = parse_entry(cfg.entry_text);
    check_entry(sel, spec.n);

    Engine engine(spec, grid);
    const PropagatorResult entry = engine.path_sum_entry(sel.row - 1, sel.col - 1);
    const BoundCheck check = bound_check_values(spec, grid, engine.graph(),
                                                entry.values, sel.row - 1,
                                                sel.col - 1);

    if (cfg.format == "csv") {
        os << "t,value,bound\n";
        for (int i = 0; i < grid.n_nodes; ++i)
            os << fmt(grid.node(i)) << "," << fmt(entry.values[i]) << ","
               << fmt(check.bound_at_node[i]) << "\n";
    } else {
        nlohmann::json doc;
        doc["row"] = sel.row;
        doc["col"] = sel.col;
        doc["h"] = check.h;
        doc["degree"] = check.degree;
        doc["distance"] = check.reachable ? nlohmann::json(check.distance)
                                          : nlohmann::json(nullptr);
        doc["reachable"] = check.reachable;
        doc["bound_final"] = check.bound_final;
        doc["max_violation"] = check.max_violation;
        doc["worst_node"] = check.worst_node;
        doc["t"] = values_json(grid.nodes);
        doc["value"] = values_json(entry.values);
        doc["bound"] = values_json(check.bound_at_node);
        os << doc.dump(2) << "\n";
    }
    return check.max_violation > 0.0 ? 1 : 0;
}

int cmd_bounds(const BoundsConfig& cfg, std::ostream& out_stream) {
    OutputTarget target(cfg.out_path, out_stream);
    if (!cfg.matrix_path.empty()) return cmd_bounds_matrix(cfg, target.get());
    if (cfg.structure.empty())
        throw InputError("bounds wants either --structure or --matrix");
    return cmd_bounds_structure(cfg, target.get());
}

// ---- graph ----

struct GraphConfig {
    std::string matrix_path;
    int grid_n = 400;
    std::string out_path;
};

int cmd_graph(const GraphConfig& cfg, std::ostream& out_stream) {
    const MatrixSpec spec = load_matrix_file(cfg.matrix_path);
    const TimeGrid grid = spec.grid(cfg.grid_n);
    const SparsityGraph g = build_graph(spec, grid);
    const std::uint64_t full = g.full_mask();

    nlohmann::json doc;
    doc["n"] = g.n;
    doc["max_degree"] = max_degree(g);

    nlohmann::json edges = nlohmann::json::array();
    for (int from = 0; from < g.n; ++from)
        for (int to : g.out[from]) edges.push_back({from + 1, to + 1});
    doc["edges"] = std::move(edges);

    nlohmann::json dist = nlohmann::json::array();
    for (int a = 0; a < g.n; ++a) {
        nlohmann::json row = nlohmann::json::array();
        for (int w = 0; w < g.n; ++w) {
            const auto d = distance(g, a, w);
            row.push_back(d ? nlohmann::json(*d) : nlohmann::json(nullptr));
        }
        dist.push_back(std::move(row));
    }
    doc["distance"] = std::move(dist);

    auto vertices_1based = [](const std::vector<int>& vs) {
        nlohmann::json arr = nlohmann::json::array();
        for (int v : vs) arr.push_back(v + 1);
        return arr;
    };

    nlohmann::json paths = nlohmann::json::array();
    for (int a = 0; a < g.n; ++a) {
        for (int w = 0; w < g.n; ++w) {
            nlohmann::json item;
            item["from"] = a + 1;
            item["to"] = w + 1;
            nlohmann::json list = nlohmann::json::array();
            for (const auto& p : simple_paths(g, full, a, w))
                list.push_back(vertices_1based(p));
            item["paths"] = std::move(list);
            paths.push_back(std::move(item));
        }
    }
    doc["paths"] = std::move(paths);

    nlohmann::json cycles = nlohmann::json::array();
    for (int a = 0; a < g.n; ++a) {
        nlohmann::json item;
        item["anchor"] = a + 1;
        nlohmann::json list = nlohmann::json::array();
        for (const auto& c : simple_cycles_at(g, full, a))
            list.push_back(vertices_1based(c));
        item["cycles"] = std::move(list);
        cycles.push_back(std::move(item));
    }
    doc["cycles"] = std::move(cycles);

    OutputTarget target(cfg.out_path, out_stream);
    target.get() << doc.dump(2) << "\n";
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
    CLI::App app{"Time-ordered matrix exponentials by path sums"};
    app.require_subcommand(1);

    ComputeConfig ccfg;
    CLI::App* compute = app.add_subcommand(
        "compute", "Evaluate propagator entries on a time grid");
    compute->add_option("--matrix", ccfg.matrix_path, "matrix file (JSON)")
        ->required();
    compute->add_option("--grid", ccfg.grid_n, "number of grid nodes");
    compute->add_option("--entry", ccfg.entry_text, "entry R,C (1-based)");
    compute->add_flag("--all", ccfg.all, "every entry");
    compute->add_option("--format", ccfg.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    compute->add_option("--out", ccfg.out_path, "output path (default stdout)");

    VerifyConfig vcfg;
    CLI::App* verify = app.add_subcommand(
        "verify", "Cross-check the engine against independent integrators");
    verify->add_option("--matrix", vcfg.matrix_path, "matrix file (JSON)")
        ->required();
    verify->add_option("--grid", vcfg.grid_n, "number of grid nodes");
    verify->add_option("--tolerance", vcfg.tolerance, "max allowed deviation");
    verify->add_option("--substeps", vcfg.substeps, "integrator substeps per interval");
    verify->add_option("--out", vcfg.out_path, "output path (default stdout)");

    BoundsConfig bcfg;
    CLI::App* bounds = app.add_subcommand(
        "bounds", "Decay envelopes for structured sparse matrices");
    bounds->set_help_flag("--help", "print help"); // frees -h for the sup-norm flag
    bounds->add_option("--structure", bcfg.structure,
                       "tridiagonal, lattice, bethe, hypercube, or generic");
    bounds->add_option("--h", bcfg.h, "sup-norm bound on the entries");
    bounds->add_option("--elapsed", bcfg.elapsed, "elapsed time t' - t");
    bounds->add_option("--beta", bcfg.beta, "inverse temperature (hypercube)");
    bounds->add_option("--d", bcfg.d_text, "graph distance, integer or range A..B");
    bounds->add_option("--N", bcfg.N, "branching number / dimension");
    bounds->add_option("--max-degree", bcfg.max_deg, "max degree (generic)");
    bounds->add_option("--coords", bcfg.coords_text, "lattice offsets a1,a2,...");
    bounds->add_option("--matrix", bcfg.matrix_path,
                       "check one computed entry against its envelope");
    bounds->add_option("--entry", bcfg.entry_text, "entry R,C (1-based)");
    bounds->add_option("--grid", bcfg.grid_n, "number of grid nodes");
    bounds->add_option("--format", bcfg.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    bounds->add_option("--out", bcfg.out_path, "output path (default stdout)");

    GraphConfig gcfg;
    CLI::App* graphcmd = app.add_subcommand(
        "graph", "Sparsity structure: edges, paths, cycles, distances");
    graphcmd->add_option("--matrix", gcfg.matrix_path, "matrix file (JSON)")
        ->required();
    graphcmd->add_option("--grid", gcfg.grid_n, "number of grid nodes");
    graphcmd->add_option("--out", gcfg.out_path, "output path (default stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (compute->parsed()) return cmd_compute(ccfg, out);
        if (verify->parsed()) return cmd_verify(vcfg, out);
        if (bounds->parsed()) return cmd_bounds(bcfg, out);
        if (graphcmd->parsed()) return cmd_graph(gcfg, out);
        err << "error: no subcommand given\n";
        return 2;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace pathsum
