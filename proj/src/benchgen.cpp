#include "pdnsim/benchgen.hpp"

#include "pdnsim/denseref.hpp"
#include "pdnsim/mna.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace pdnsim {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// A rail is a bank of grounded RC legs whose time constants span a small
// per-rail spread; the two rails sit at opposite ends of the target ratio.
constexpr double kRailSpread = 3.0;

void emit_rail(std::ostream& out, const std::string& prefix, int m, double tau_lo) {
    const double r = 1.0;
    for (int i = 0; i < m; ++i) {
        const double tau =
            tau_lo * std::pow(kRailSpread, m > 1 ? static_cast<double>(i) / (m - 1) : 0.0);
        out << "R" << prefix << i << " " << prefix << i << " 0 " << num(r) << "\n";
        out << "C" << prefix << i << " " << prefix << i << " 0 " << num(tau / r) << "\n";
    }
}

StiffBench build_stiff(const StiffBenchSpec& spec, double tau_fast_lo) {
    const int m = std::max(spec.n / 2, 1);
    std::ostringstream nl;
    nl << "* synthetic stiff RC bench (two rails of RC legs)\n";
    emit_rail(nl, "a", m, spec.tau_slow);
    emit_rail(nl, "b", m, tau_fast_lo);
    nl << ".end\n";

    StiffBench bench;
    bench.circuit = parse_netlist(nl.str());
    const MnaSystem sys = stamp(bench.circuit);
    bench.C = sys.C;
    bench.G = sys.G;

    std::mt19937 rng(spec.seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    bench.v = Vec(sys.n);
    for (long i = 0; i < sys.n; ++i)
        bench.v[i] = 1.0 - dist(rng); // entries in (0, 1]

    const auto [lmin, lmax] = eigen_range(bench.C, bench.G);
    bench.realized_stiffness = lmin / lmax;
    return bench;
}

} // namespace

StiffBench make_stiff_bench(const StiffBenchSpec& spec) {
    if (!(spec.stiffness > 1.0))
        throw Error("stiffness target must exceed 1");
    // Slowest pole is -1/(spread*tau_slow), fastest -1/tau_fast_lo; one
    // eigen-checked correction pass absorbs any rounding.
    const double first = kRailSpread * spec.tau_slow / spec.stiffness;
    StiffBench bench = build_stiff(spec, first);
    const double correction = bench.realized_stiffness / spec.stiffness;
    bench = build_stiff(spec, first * correction);
    return bench;
}

std::string make_rc_grid_netlist(const GridBenchSpec& spec) {
    std::ostringstream nl;
    nl << "* rc grid bench " << spec.rows << "x" << spec.cols << "\n";
    auto node = [&](int r, int c) {
        return "n" + std::to_string(r) + "_" + std::to_string(c);
    };
    int rid = 0, cid = 0;
    for (int r = 0; r < spec.rows; ++r) {
        for (int c = 0; c < spec.cols; ++c) {
            if (c + 1 < spec.cols)
                nl << "R" << rid++ << " " << node(r, c) << " " << node(r, c + 1)
                   << " " << num(spec.r_mesh) << "\n";
            if (r + 1 < spec.rows)
                nl << "R" << rid++ << " " << node(r, c) << " " << node(r + 1, c)
                   << " " << num(spec.r_mesh) << "\n";
            nl << "C" << cid++ << " " << node(r, c) << " 0 " << num(spec.c_node) << "\n";
        }
    }
    for (auto [r, c] : {std::pair{0, 0},
                        std::pair{0, spec.cols - 1},
                        std::pair{spec.rows - 1, 0},
                        std::pair{spec.rows - 1, spec.cols - 1}})
        nl << "R" << rid++ << " " << node(r, c) << " 0 " << num(spec.r_ground) << "\n";

    // Pulse loads: corners land on multiples of grid_unit (so a fixed step of
    // one unit respects every breakpoint), and periodic trains keep the
    // largest breakpoint gap a few hundred units.
    std::mt19937 rng(spec.seed);
    std::uniform_int_distribution<int> pick_row(0, spec.rows - 1);
    std::uniform_int_distribution<int> pick_col(0, spec.cols - 1);
    std::uniform_real_distribution<double> amp_jitter(0.5, 1.5);
    const double u = spec.grid_unit;
    for (int s = 0; s < spec.n_sources; ++s) {
        const int sig = s % std::max(spec.n_signatures, 1);
        const double td = (10.0 + 30.0 * sig) * u;
        const double tr = 10.0 * u;
        const double pw = 30.0 * u;
        const double tf = 10.0 * u;
        const double per = 200.0 * u;
        const double amp = spec.amp * amp_jitter(rng);
        nl << "I" << s << " 0 " << node(pick_row(rng), pick_col(rng)) << " PULSE("
           << num(0.0) << " " << num(amp) << " " << num(td) << " " << num(tr) << " "
           << num(tf) << " " << num(pw) << " " << num(per) << ")\n";
    }
    nl << ".tran " << num(u) << " " << num(spec.t_stop) << "\n";
    nl << ".end\n";
    return nl.str();
}

std::string make_rc_decay_netlist(double r, double c, double i0, double t_ramp,
                                  double t_stop) {
    std::ostringstream nl;
    nl << "* scalar rc decay\n";
    nl << "r1 a 0 " << num(r) << "\n";
    nl << "c1 a 0 " << num(c) << "\n";
    nl << "i1 0 a PWL(0 " << num(i0) << " " << num(t_ramp) << " 0)\n";
    nl << ".tran " << num(t_stop / 1000.0) << " " << num(t_stop) << "\n";
    nl << ".end\n";
    return nl.str();
}

} // namespace pdnsim
