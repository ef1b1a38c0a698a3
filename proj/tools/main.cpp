// pdnsim - batch transient simulator for linear power-delivery networks.
//
// Subcommands: simulate, compare, error-sweep, decompose, export-mna.
// Exit codes: 0 ok, 1 parse error, 2 numeric failure, 3 config error.

#include "pdnsim/benchgen.hpp"
#include "pdnsim/drmatex.hpp"
#include "pdnsim/solutionio.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace pdnsim;

struct CommonArgs {
    std::string netlist;
    std::string method = "rmatex";
    std::string h_text;
    double gamma = 1e-10;
    double eps = 1e-6;
    int m_max = 30;
    int groups = 100;
    int workers = 1;
    std::string probes_text;
    std::string out_path;
    std::string diag_path;
    std::string dense_output_text;
    std::string t_stop_text;
    unsigned seed = 0;
    bool force_standard = false;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double parse_seconds(const std::string& text, const char* what) {
    try {
        return parse_value(text);
    } catch (const UnknownSuffix&) {
        throw CLI::ValidationError(std::string(what) + ": cannot parse '" + text + "'");
    }
}

struct RunOutcome {
    TransientSolution solution;
    std::vector<RunDiagnostics> per_group;
};

RunOutcome run_method(const CommonArgs& args, const Circuit& circuit,
                      const MnaSystem& sys, const ProbeSet& probes,
                      const std::string& method, double h, double t_stop) {
    const BreakpointSet gts = global_transition_spots(circuit, t_stop);
    MatexOptions mo;
    mo.eps = args.eps;
    mo.m_max = args.m_max;
    mo.allow_standard = args.force_standard;
    if (!args.dense_output_text.empty())
        mo.dense_output_dt = parse_seconds(args.dense_output_text, "--dense-output");

    RunOutcome out;
    if (method == "be" || method == "tr") {
        if (!(h > 0.0))
            throw CLI::ValidationError("--h is required for be/tr");
        out.solution = run_fixed_step(
            sys, circuit, method == "be" ? FixedStepMethod::BE : FixedStepMethod::TR, h,
            t_stop, probes);
    } else if (method == "imatex") {
        out.solution = run_matex(sys, circuit, KrylovVariant::invert(), args.eps, t_stop,
                                 gts, probes, mo);
    } else if (method == "rmatex") {
        out.solution = run_matex(sys, circuit, KrylovVariant::rational(args.gamma),
                                 args.eps, t_stop, gts, probes, mo);
    } else if (method == "standard") {
        out.solution = run_matex(sys, circuit, KrylovVariant::standard(), args.eps,
                                 t_stop, gts, probes, mo);
    } else if (method == "drmatex") {
        DrMatexOptions d;
        d.max_groups = args.groups;
        d.workers = args.workers;
        d.gamma = args.gamma;
        d.eps = args.eps;
        d.m_max = args.m_max;
        DrMatexResult r = run_drmatex(circuit, sys, t_stop, probes, d);
        out.solution = std::move(r.solution);
        out.per_group = std::move(r.per_group);
    } else {
        throw CLI::ValidationError("unknown method '" + method + "'");
    }
    return out;
}

struct LoadedCircuit {
    Circuit circuit;
    MnaSystem sys;
    ProbeSet probes;
    double t_stop = 0.0;
};

LoadedCircuit load_circuit(const CommonArgs& args) {
    LoadedCircuit lc;
    if (!std::ifstream(args.netlist).good())
        throw CLI::ValidationError("cannot open netlist file '" + args.netlist + "'");
    lc.circuit = parse_netlist_file(args.netlist);
    const auto diags = validate(lc.circuit);
    if (!diags.empty()) {
        for (const auto& d : diags) std::cerr << "diagnostic: " << d.message << "\n";
        throw Error("circuit failed validation");
    }
    lc.sys = stamp(lc.circuit);
    lc.probes = make_probes(lc.circuit, lc.sys, split_list(args.probes_text));
    if (!args.t_stop_text.empty()) {
        lc.t_stop = parse_seconds(args.t_stop_text, "--t-stop");
    } else if (auto tran = lc.circuit.tran()) {
        lc.t_stop = tran->t_stop;
    } else {
        throw CLI::ValidationError("netlist has no .tran and no --t-stop given");
    }
    return lc;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw CLI::ValidationError("cannot open output file '" + path + "'");
    out << text;
}

int cmd_simulate(const CommonArgs& args) {
    const LoadedCircuit lc = load_circuit(args);
    const double h = args.h_text.empty() ? 0.0 : parse_seconds(args.h_text, "--h");
    const RunOutcome out =
        run_method(args, lc.circuit, lc.sys, lc.probes, args.method, h, lc.t_stop);

    write_text(args.out_path, solution_csv(out.solution));
    const std::string diag = diagnostics_json(
        out.solution.diag, out.per_group.empty() ? nullptr : &out.per_group);
    if (!args.diag_path.empty())
        write_text(args.diag_path, diag + "\n");
    else if (!args.out_path.empty())
        std::cout << diag << "\n";
    return 0;
}

int cmd_compare(const CommonArgs& args, const std::string& ref_method,
                const std::string& ref_h_text) {
    const LoadedCircuit lc = load_circuit(args);
    const double h = args.h_text.empty() ? 0.0 : parse_seconds(args.h_text, "--h");
    const double ref_h = ref_h_text.empty() ? h : parse_seconds(ref_h_text, "--ref-h");

    const RunOutcome test =
        run_method(args, lc.circuit, lc.sys, lc.probes, args.method, h, lc.t_stop);
    const RunOutcome ref =
        run_method(args, lc.circuit, lc.sys, lc.probes, ref_method, ref_h, lc.t_stop);

    const auto& ts = test.solution;
    double max_diff = 0.0, sum_diff = 0.0;
    std::size_t count = 0;
    for (std::size_t p = 0; p < ts.probes.indices.size(); ++p) {
        for (std::size_t i = 0; i < ts.times.size(); ++i) {
            const double d =
                std::abs(ts.states[i][static_cast<long>(p)] -
                         ref.solution.sample(p, ts.times[i]));
            max_diff = std::max(max_diff, d);
            sum_diff += d;
            ++count;
        }
    }

    nlohmann::json j;
    j["max_diff"] = max_diff;
    j["avg_diff"] = count ? sum_diff / static_cast<double>(count) : 0.0;
    auto record = [&](const char* key, const RunOutcome& r) {
        nlohmann::json m;
        m["method"] = r.solution.diag.method;
        m["total_seconds"] = r.solution.diag.total_seconds;
        m["tran_seconds"] = r.solution.diag.tran_seconds;
        m["subs_pairs"] = r.solution.diag.total_pairs();
        m["basis_builds"] = r.solution.diag.basis_builds;
        m["peak_m"] = r.solution.diag.peak_m;
        j[key] = m;
    };
    record("test", test);
    record("reference", ref);
    const double tr_t = test.solution.diag.tran_seconds;
    j["speedup_vs_reference"] =
        tr_t > 0.0 ? ref.solution.diag.tran_seconds / tr_t : 0.0;
    write_text(args.out_path, j.dump(2) + "\n");
    return 0;
}

int cmd_error_sweep(double stiffness, int n, const std::string& variants_text,
                    const std::string& h_grid_text, const std::string& m_grid_text,
                    const std::string& gammas_text, const std::string& out_path,
                    unsigned seed) {
    StiffBenchSpec spec;
    spec.n = n;
    spec.stiffness = stiffness;
    spec.seed = seed == 0 ? 1 : seed;
    const StiffBench bench = make_stiff_bench(spec);

    std::vector<double> h_grid;
    for (const auto& t : split_list(h_grid_text)) h_grid.push_back(parse_value(t));
    if (h_grid.empty())
        for (double h : {4e-13, 4e-12, 4e-11, 4e-10}) h_grid.push_back(h);

    std::vector<int> m_grid;
    for (const auto& t : split_list(m_grid_text)) m_grid.push_back(std::stoi(t));
    if (m_grid.empty())
        for (int m = 1; m <= 30; ++m) m_grid.push_back(m);

    std::vector<double> gammas;
    for (const auto& t : split_list(gammas_text)) gammas.push_back(parse_value(t));
    if (gammas.empty()) gammas.push_back(1e-10);

    auto variants = split_list(variants_text);
    if (variants.empty()) variants = {"standard", "invert", "rational"};

    std::string csv = "variant,h,m,gamma,rel_err\n";
    char buf[128];
    auto emit = [&](const std::vector<SurfaceRow>& rows) {
        for (const auto& r : rows) {
            std::snprintf(buf, sizeof(buf), "%s,%.11e,%d,%.11e,%.11e\n",
                          r.variant.c_str(), r.h, r.m, r.gamma, r.rel_err);
            csv += buf;
        }
    };
    for (const auto& vname : variants) {
        if (vname == "standard") {
            emit(error_surface(bench.C, bench.G, bench.v, KrylovVariant::standard(),
                               h_grid, m_grid));
        } else if (vname == "invert") {
            emit(error_surface(bench.C, bench.G, bench.v, KrylovVariant::invert(),
                               h_grid, m_grid));
        } else if (vname == "rational") {
            for (double g : gammas)
                emit(error_surface(bench.C, bench.G, bench.v,
                                   KrylovVariant::rational(g), h_grid, m_grid));
        } else {
            throw CLI::ValidationError("unknown variant '" + vname + "'");
        }
    }
    write_text(out_path, csv);

    nlohmann::json j;
    j["realized_stiffness"] = bench.realized_stiffness;
    j["n"] = bench.C.rows();
    if (!out_path.empty()) std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_decompose(const CommonArgs& args) {
    const LoadedCircuit lc = load_circuit(args);
    const GroupPlan plan = group_by_bump(lc.circuit, lc.t_stop, args.groups);
    nlohmann::json j;
    j["gts"] = plan.gts.times();
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : plan.groups) {
        nlohmann::json gj;
        gj["group_id"] = g.group_id;
        std::vector<std::string> ids;
        for (const auto& m : g.members) ids.push_back(m.id);
        gj["sources"] = ids;
        gj["lts"] = g.lts.times();
        groups.push_back(gj);
    }
    j["groups"] = groups;
    write_text(args.out_path, j.dump(2) + "\n");
    return 0;
}

int cmd_export_mna(const CommonArgs& args) {
    if (!std::ifstream(args.netlist).good())
        throw CLI::ValidationError("cannot open netlist file '" + args.netlist + "'");
    const Circuit circuit = parse_netlist_file(args.netlist);
    const MnaSystem sys = stamp(circuit);
    const std::string prefix = args.out_path.empty() ? "mna" : args.out_path;
    for (const auto& [name, mat] :
         {std::pair<std::string, const SpMat*>{"C", &sys.C},
          {"G", &sys.G},
          {"B", &sys.B}}) {
        std::ofstream out(prefix + "." + name + ".mtx");
        if (!out)
            throw CLI::ValidationError("cannot write " + prefix + "." + name + ".mtx");
        export_matrix_market(*mat, out);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transient simulator for linear power-delivery networks"};
    app.set_help_flag("--help", "print help"); // frees -h/--h for the step size
    app.require_subcommand(1);

    CommonArgs args;
    std::string ref_method = "tr";
    std::string ref_h_text;
    double sweep_stiffness = 4.7e6;
    int sweep_n = 100;
    std::string sweep_variants, sweep_h_grid, sweep_m_grid, sweep_gammas;

    auto add_common = [&](CLI::App* cmd, bool with_netlist) {
        cmd->set_help_flag("--help", "print help");
        if (with_netlist)
            cmd->add_option("netlist", args.netlist, "netlist file")->required();
        cmd->add_option("--method", args.method, "be|tr|imatex|rmatex|drmatex|standard");
        cmd->add_option("--h", args.h_text, "fixed step (seconds, SI suffixes ok)");
        cmd->add_option("--gamma", args.gamma, "rational shift");
        cmd->add_option("--eps", args.eps, "Krylov residual budget");
        cmd->add_option("--m-max", args.m_max, "Krylov dimension cap");
        cmd->add_option("--groups", args.groups, "max source groups (drmatex)");
        cmd->add_option("--workers", args.workers, "worker pool size (drmatex)");
        cmd->add_option("--probes", args.probes_text, "comma-separated node names");
        cmd->add_option("--out", args.out_path, "output path ('-' = stdout)");
        cmd->add_option("--diag", args.diag_path, "diagnostics JSON path");
        cmd->add_option("--dense-output", args.dense_output_text,
                        "extra output spacing (zero-solve reuse)");
        cmd->add_option("--t-stop", args.t_stop_text, "override .tran stop time");
        cmd->add_option("--seed", args.seed, "generator seed");
        cmd->add_flag("--force-standard", args.force_standard,
                      "allow the standard-Krylov transient");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run one transient analysis");
    add_common(sim, true);

    CLI::App* cmp = app.add_subcommand("compare", "run two methods and diff them");
    add_common(cmp, true);
    cmp->add_option("--ref", ref_method, "reference method");
    cmp->add_option("--ref-h", ref_h_text, "reference fixed step");

    CLI::App* sweep = app.add_subcommand("error-sweep", "MEVP error studies");
    sweep->set_help_flag("--help", "print help");
    sweep->add_option("--stiffness", sweep_stiffness, "target stiffness ratio");
    sweep->add_option("--n", sweep_n, "bench size (<= 500)");
    sweep->add_option("--variants", sweep_variants, "standard,invert,rational");
    sweep->add_option("--h-grid", sweep_h_grid, "comma list of steps");
    sweep->add_option("--m-grid", sweep_m_grid, "comma list of dimensions");
    sweep->add_option("--gamma", sweep_gammas, "comma list of shifts");
    sweep->add_option("--out", args.out_path, "CSV path");
    sweep->add_option("--seed", args.seed, "generator seed");

    CLI::App* dec = app.add_subcommand("decompose", "emit the source-group plan");
    add_common(dec, true);

    CLI::App* exp = app.add_subcommand("export-mna", "dump C/G/B in Matrix Market");
    exp->set_help_flag("--help", "print help");
    exp->add_option("netlist", args.netlist, "netlist file")->required();
    exp->add_option("--out", args.out_path, "output prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 3;
    }

    try {
        if (sim->parsed()) return cmd_simulate(args);
        if (cmp->parsed()) return cmd_compare(args, ref_method, ref_h_text);
        if (sweep->parsed())
            return cmd_error_sweep(sweep_stiffness, sweep_n, sweep_variants,
                                   sweep_h_grid, sweep_m_grid, sweep_gammas,
                                   args.out_path, args.seed);
        if (dec->parsed()) return cmd_decompose(args);
        if (exp->parsed()) return cmd_export_mna(args);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const SyntaxError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const DuplicateElement& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const UnknownSuffix& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 3;
}
