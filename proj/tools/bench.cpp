// Kernel and solver benchmark: serial reference implementations vs the
// OpenMP kernels, and the DR-MATEX worker pool at several widths.

#include "pdnsim/benchgen.hpp"
#include "pdnsim/drmatex.hpp"
#include "pdnsim/kernels.hpp"
#include "pdnsim/mna.hpp"

#include <chrono>
#include <cstdio>
#include <random>

namespace {

using namespace pdnsim;
using Clock = std::chrono::steady_clock;

double time_of(int reps, const std::function<void()>& fn) {
    fn(); // warm up
    const auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    return std::chrono::duration<double>(Clock::now() - t0).count() /
           static_cast<double>(reps);
}

void bench_kernels() {
    const std::size_t n = 1u << 21;
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vec x(n), y(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = dist(rng);
        y[i] = dist(rng);
    }

    // Banded sparse matrix, ~5 nnz per row.
    std::vector<Triplet> trips;
    for (long i = 0; i < static_cast<long>(n); ++i)
        for (long o : {-1000L, -1L, 0L, 1L, 1000L}) {
            const long j = i + o;
            if (j >= 0 && j < static_cast<long>(n)) trips.emplace_back(i, j, dist(rng));
        }
    SpMat a(n, n);
    a.setFromTriplets(trips.begin(), trips.end());
    const auto csr = kernels::CsrMatrix::from_sparse(a);

    std::printf("kernel benchmark (n = %zu)\n", n);
    std::printf("%-10s %14s %14s %8s\n", "kernel", "serial-ref (s)", "openmp (s)", "speedup");

    const double t_spmv_ref = time_of(10, [&] { kernels::spmv_ref(csr, x.data(), z.data()); });
    const double t_spmv = time_of(10, [&] { kernels::spmv(csr, x.data(), z.data()); });
    std::printf("%-10s %14.6f %14.6f %7.2fx\n", "spmv", t_spmv_ref, t_spmv,
                t_spmv_ref / t_spmv);

    volatile double sink = 0.0;
    const double t_dot_ref = time_of(20, [&] { sink = kernels::dot_ref(x.data(), y.data(), n); });
    const double t_dot = time_of(20, [&] { sink = kernels::dot(x.data(), y.data(), n); });
    std::printf("%-10s %14.6f %14.6f %7.2fx\n", "dot", t_dot_ref, t_dot,
                t_dot_ref / t_dot);
    (void)sink;

    const double t_axpy_ref = time_of(20, [&] { kernels::axpy_ref(1.5, x.data(), z.data(), n); });
    const double t_axpy = time_of(20, [&] { kernels::axpy(1.5, x.data(), z.data(), n); });
    std::printf("%-10s %14.6f %14.6f %7.2fx\n", "axpy", t_axpy_ref, t_axpy,
                t_axpy_ref / t_axpy);
}

void bench_drmatex() {
    GridBenchSpec spec;
    spec.rows = 20;
    spec.cols = 20;
    spec.n_sources = 24;
    spec.n_signatures = 6;
    const Circuit circuit = parse_netlist(make_rc_grid_netlist(spec));
    const MnaSystem sys = stamp(circuit);
    const ProbeSet probes = make_probes(circuit, sys);

    std::printf("\ndrmatex pool (grid %dx%d, %d sources)\n", spec.rows, spec.cols,
                spec.n_sources);
    std::printf("%-10s %12s %12s %10s\n", "workers", "total (s)", "tran (s)", "peak m");
    for (int w : {1, 2, 4, 8}) {
        DrMatexOptions d;
        d.workers = w;
        d.max_groups = 16;
        const auto t0 = Clock::now();
        const DrMatexResult r = run_drmatex(circuit, sys, spec.t_stop, probes, d);
        const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
        std::printf("%-10d %12.4f %12.4f %10d\n", w, wall,
                    r.solution.diag.tran_seconds, r.solution.diag.peak_m);
    }
}

} // namespace

int main() {
    bench_kernels();
    bench_drmatex();
    return 0;
}
