// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are fixed here, not tuned at runtime.

#include "pdnsim/benchgen.hpp"
#include "pdnsim/denseref.hpp"
#include "pdnsim/drmatex.hpp"
#include "pdnsim/solutionio.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>

using namespace pdnsim;

namespace {

int g_failures = 0;

void criterion(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d. %-38s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

struct Bench {
    Circuit circuit;
    MnaSystem sys;
    ProbeSet probes;
    BreakpointSet gts;
    double t_stop = 0.0;
};

Bench load(const std::string& netlist, double t_stop) {
    Bench b;
    b.circuit = parse_netlist(netlist);
    b.sys = stamp(b.circuit);
    b.probes = make_probes(b.circuit, b.sys);
    b.t_stop = t_stop;
    b.gts = global_transition_spots(b.circuit, t_stop);
    return b;
}

Bench grid_bench() {
    GridBenchSpec spec; // 10x10 grid, 8 pulse loads, 4 signatures, 10 ns span
    return load(make_rc_grid_netlist(spec), spec.t_stop);
}

double wall(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Max and mean |test - ref| over all probes/time points, reference sampled
/// onto the test grid.
std::pair<double, double> diff_stats(const TransientSolution& test,
                                     const TransientSolution& ref) {
    double dmax = 0.0, dsum = 0.0;
    std::size_t count = 0;
    for (std::size_t p = 0; p < test.probes.indices.size(); ++p) {
        for (std::size_t i = 0; i < test.times.size(); ++i) {
            const double d = std::abs(test.states[i][static_cast<long>(p)] -
                                      ref.sample(p, test.times[i]));
            dmax = std::max(dmax, d);
            dsum += d;
            ++count;
        }
    }
    return {dmax, count ? dsum / static_cast<double>(count) : 0.0};
}

// --------------------------------------------------------------------------

void criterion_1_and_2_and_5_and_6_and_10() {
    Bench b = grid_bench();
    const GroupPlan plan = group_by_bump(b.circuit, b.t_stop, 100);

    auto t0 = std::chrono::steady_clock::now();
    const TransientSolution rm = run_matex(b.sys, b.circuit, KrylovVariant::rational(1e-10),
                                           1e-6, b.t_stop, b.gts, b.probes);
    DrMatexOptions d;
    d.workers = 4;
    d.max_groups = 100;
    const std::uint64_t lu_before_dr = stats::lu_count();
    const DrMatexResult dr = run_drmatex(b.circuit, b.sys, b.t_stop, b.probes, d);
    const std::uint64_t dr_lu = stats::lu_count() - lu_before_dr;
    const double t_superpose = wall(t0);

    const auto [dmax1, davg1] = diff_stats(dr.solution, rm);
    criterion(1, "superposition equivalence",
              plan.groups.size() >= 3 && dmax1 <= 1e-4 && t_superpose < 10.0,
              fmt("groups=%zu max|drmatex-rmatex|=%.3e V (tol 1e-4), %.2f s",
                  plan.groups.size(), dmax1, t_superpose));

    t0 = std::chrono::steady_clock::now();
    const double h_upper = b.gts.min_gap();
    const TransientSolution tr =
        run_fixed_step(b.sys, b.circuit, FixedStepMethod::TR, h_upper, b.t_stop, b.probes);
    const double t_tr = wall(t0);
    const auto [dmax2, davg2] = diff_stats(rm, tr);
    criterion(2, "accuracy vs TR at h_upper",
              dmax2 <= 1e-4 && davg2 <= 4e-5 && t_tr < 10.0,
              fmt("max=%.3e V (tol 1e-4) avg=%.3e V (tol 4e-5), %.2f s", dmax2,
                  davg2, t_tr));

    // Operation counts on the 10 ps lattice over 10 ns.
    const TransientSolution tr10 =
        run_fixed_step(b.sys, b.circuit, FixedStepMethod::TR, 1e-11, b.t_stop, b.probes);
    const std::uint64_t k_spots = b.gts.size();
    const bool rm_pairs_ok =
        rm.diag.krylov_pairs <= k_spots * static_cast<std::uint64_t>(rm.diag.peak_m) &&
        rm.diag.peak_m <= 8;
    bool per_group_fewer = true;
    for (const auto& g : dr.per_group)
        per_group_fewer = per_group_fewer && g.basis_builds < rm.diag.basis_builds;
    criterion(5, "operation-count properties",
              tr10.diag.step_pairs == 1000 && rm_pairs_ok && dr.per_group.size() >= 2 &&
                  per_group_fewer,
              fmt("tr pairs=%llu (want 1000), rmatex pairs=%llu <= K*m=%llu, peak m=%d, "
                  "per-group builds < %llu",
                  static_cast<unsigned long long>(tr10.diag.step_pairs),
                  static_cast<unsigned long long>(rm.diag.krylov_pairs),
                  static_cast<unsigned long long>(k_spots * rm.diag.peak_m),
                  rm.diag.peak_m,
                  static_cast<unsigned long long>(rm.diag.basis_builds)));

    const TransientSolution im = run_matex(b.sys, b.circuit, KrylovVariant::invert(),
                                           1e-6, b.t_stop, b.gts, b.probes);
    criterion(6, "factorization reuse (<= 2 LU)",
              rm.diag.lu_count <= 2 && im.diag.lu_count <= 2 && dr_lu <= 2,
              fmt("rmatex=%llu imatex=%llu drmatex=%llu",
                  static_cast<unsigned long long>(rm.diag.lu_count),
                  static_cast<unsigned long long>(im.diag.lu_count),
                  static_cast<unsigned long long>(dr_lu)));

    std::string csv1, csv2, csv8;
    for (auto [workers, out] :
         {std::pair<int, std::string*>{1, &csv1}, {2, &csv2}, {8, &csv8}}) {
        DrMatexOptions dw;
        dw.workers = workers;
        *out = solution_csv(run_drmatex(b.circuit, b.sys, b.t_stop, b.probes, dw).solution);
    }
    criterion(10, "drmatex determinism across workers", csv1 == csv2 && csv1 == csv8,
              fmt("csv bytes: w1=%zu w2=%s w8=%s", csv1.size(),
                  csv1 == csv2 ? "identical" : "DIFFERENT",
                  csv1 == csv8 ? "identical" : "DIFFERENT"));
}

void criterion_3() {
    StiffBenchSpec spec;
    spec.n = 80;
    spec.stiffness = 4.7e6;
    spec.tau_slow = 1e-11;
    const StiffBench bench = make_stiff_bench(spec);
    const double h = 4e-13, gamma = 1e-13;
    const Vec exact = expmv_dense(bench.C, bench.G, bench.v, h);
    auto rel_err = [&](KrylovVariant v) {
        const KrylovOperator op = KrylovOperator::make(bench.C, bench.G, v);
        return (mevp_eval(arnoldi_fixed(op, bench.v, 3), h) - exact).norm() /
               exact.norm();
    };
    const double e_std = rel_err(KrylovVariant::standard());
    const double e_inv = rel_err(KrylovVariant::invert());
    const double e_rat = rel_err(KrylovVariant::rational(gamma));
    criterion(3, "Krylov error ordering at m=3",
              bench.realized_stiffness >= 1e6 && e_rat < e_inv && e_inv < e_std &&
                  e_std / e_inv >= 10.0,
              fmt("stiffness=%.2e err std/inv/rat = %.4f / %.2e / %.2e (ratio %.1f)",
                  bench.realized_stiffness, e_std, e_inv, e_rat, e_std / e_inv));
}

void criterion_4() {
    const double r = 1.0, c = 1e-9, i0 = 1e-3, t_stop = 1e-8;
    const double t_ramp = t_stop / 16.0;
    Bench b = load(make_rc_decay_netlist(r, c, i0, t_ramp, t_stop), t_stop);

    auto slope_of = [&](FixedStepMethod m) {
        std::vector<double> lh, le;
        for (int div : {64, 128, 256, 512, 1024}) {
            const double h = t_stop / div;
            const TransientSolution sol =
                run_fixed_step(b.sys, b.circuit, m, h, t_stop, b.probes);
            double err = 0.0;
            for (std::size_t i = 0; i < sol.times.size(); ++i)
                err = std::max(err,
                               std::abs(sol.states[i][0] -
                                        oracle::rc_ramp_decay(c, 1.0 / r, i0, t_ramp,
                                                              sol.times[i])));
            lh.push_back(std::log(h));
            le.push_back(std::log(err));
        }
        const double n = static_cast<double>(lh.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lh.size(); ++i) {
            sx += lh[i];
            sy += le[i];
            sxx += lh[i] * lh[i];
            sxy += lh[i] * le[i];
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    const double s_be = slope_of(FixedStepMethod::BE);
    const double s_tr = slope_of(FixedStepMethod::TR);
    criterion(4, "BE/TR global convergence orders",
              std::abs(s_be - 1.0) <= 0.2 && std::abs(s_tr - 2.0) <= 0.2,
              fmt("slope BE=%.3f (want 1 +- 0.2), TR=%.3f (want 2 +- 0.2)", s_be, s_tr));
}

void criterion_7() {
    // Node "mid" has no grounded capacitor: C is singular.
    Bench b = load("t\nr1 in 0 1\nr2 in mid 1\nr3 mid out 1\n"
                   "c1 in 0 1e-10\nc2 out 0 2e-10\n"
                   "i1 0 in PULSE(0 1m 0 100p 100p 300p 0)\n.end\n",
                   5e-9);
    const bool c_singular = [&] {
        try {
            dense_a(b.sys.C, b.sys.G);
            return false;
        } catch (const OracleUnavailable&) {
            return true;
        }
    }();

    const double h_upper = b.gts.min_gap();
    const TransientSolution tr =
        run_fixed_step(b.sys, b.circuit, FixedStepMethod::TR, h_upper, b.t_stop, b.probes);
    const TransientSolution im = run_matex(b.sys, b.circuit, KrylovVariant::invert(),
                                           1e-6, b.t_stop, b.gts, b.probes);
    const TransientSolution rm = run_matex(b.sys, b.circuit, KrylovVariant::rational(1e-10),
                                           1e-6, b.t_stop, b.gts, b.probes);
    const double d_im = diff_stats(im, tr).first;
    const double d_rm = diff_stats(rm, tr).first;

    bool refused = false;
    try {
        run_matex(b.sys, b.circuit, KrylovVariant::standard(), 1e-6, b.t_stop, b.gts,
                  b.probes);
    } catch (const Error&) {
        refused = true;
    }
    criterion(7, "regularization-free on singular C",
              c_singular && d_im <= 1e-4 && d_rm <= 1e-4 && refused,
              fmt("C singular=%s |imatex-tr|=%.3e |rmatex-tr|=%.3e V, standard refused=%s",
                  c_singular ? "yes" : "no", d_im, d_rm, refused ? "yes" : "no"));
}

void criterion_8() {
    std::string nl = "t\n";
    for (int i = 0; i < 30; ++i) {
        const std::string node = "n" + std::to_string(i);
        const std::string prev = i == 0 ? std::string("0") : "n" + std::to_string(i - 1);
        nl += "R" + std::to_string(i) + " " + prev + " " + node + " 1\n";
        nl += "C" + std::to_string(i) + " " + node + " 0 1e-11\n";
    }
    nl += ".end\n";
    const MnaSystem sys = stamp(parse_netlist(nl));
    const Vec v = oracle::random_vec(sys.n, 77, 0.0, 1.0);
    const double eps = 1e-6;
    const double h = 2e-10;

    double worst = 0.0;
    for (const auto variant : {KrylovVariant::invert(), KrylovVariant::rational(2e-10)}) {
        const KrylovOperator op = KrylovOperator::make(sys.C, sys.G, variant);
        const KrylovBasis full = arnoldi(op, v, h, eps, 30);
        const Vec reused = mevp_eval(full, h / 2.0);
        const KrylovBasis fresh = arnoldi(op, v, h / 2.0, eps, 30);
        const Vec direct = mevp_eval(fresh, h / 2.0);
        worst = std::max(worst, (reused - direct).norm() / v.norm());
    }
    criterion(8, "snapshot reuse (scaling invariance)", worst <= 10.0 * eps,
              fmt("midpoint reuse vs fresh basis: %.3e (tol %.0e)", worst, 10.0 * eps));
}

void criterion_9() {
    StiffBenchSpec spec;
    spec.n = 80;
    spec.stiffness = 4.7e6;
    spec.tau_slow = 1e-11;
    const StiffBench bench = make_stiff_bench(spec);
    const double h = 4e-12;
    const int m = 10;
    double lo = 1e300, hi = 0.0;
    for (double gamma : {h / 10.0, h / 3.0, h, 3.0 * h, 10.0 * h}) {
        const auto rows =
            error_surface(bench.C, bench.G, bench.v, KrylovVariant::rational(gamma), {h}, {m});
        lo = std::min(lo, rows[0].rel_err);
        hi = std::max(hi, rows[0].rel_err);
    }
    criterion(9, "gamma insensitivity (2 decades)", hi / lo < 10.0,
              fmt("error range %.3e .. %.3e (ratio %.2f, tol < 10)", lo, hi, hi / lo));
}

} // namespace

int main() {
    std::printf("acceptance criteria\n-------------------\n");
    criterion_1_and_2_and_5_and_6_and_10();
    criterion_3();
    criterion_4();
    criterion_7();
    criterion_8();
    criterion_9();
    std::printf("-------------------\n%s (%d failure%s)\n",
                g_failures == 0 ? "ALL CRITERIA PASS" : "FAILURES PRESENT", g_failures,
                g_failures == 1 ? "" : "s");
    return g_failures == 0 ? 0 : 1;
}
