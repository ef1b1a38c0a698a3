#include "pdnsim/drmatex.hpp"

#include "pdnsim/kernels.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pdnsim {

std::vector<GroupTask> plan_tasks(const Circuit& circuit, const MnaSystem& sys,
                                  const GroupPlan& plan) {
    std::vector<GroupTask> tasks;
    tasks.reserve(plan.groups.size());
    for (const auto& g : plan.groups) {
        GroupTask task;
        task.group_id = g.group_id;
        task.base = g.group_id == 0;
        task.lts = g.lts;
        task.gts = plan.gts;
        task.input = InputVector(sys.s);
        for (const auto& member : g.members) {
            task.input.add_piece(sys.input_index.at(member.source_name), member.piece);
            task.member_ids.push_back(member.id);
        }
        tasks.push_back(std::move(task));
    }
    if (tasks.empty())
        return tasks;

    // The base task carries everything constant: DC-only sources and the
    // baselines of decomposed pulses.
    GroupTask& base = tasks.front();
    for (const auto& e : circuit.elements) {
        if (!e.is_source() || e.time_varying()) continue;
        const int col = sys.input_index.at(e.name);
        base.input.add_dc(col, e.waveform ? e.waveform->dc_level() : e.value);
    }
    for (const auto& [name, level] : plan.baselines)
        base.input.add_dc(sys.input_index.at(name), level);
    return tasks;
}

TransientSolution run_group(const GroupTask& task, const MnaSystem& sys,
                            const MatexFactors& factors, const ProbeSet& probes,
                            const MatexOptions& opts) {
    TransientSolution sol =
        run_matex_lts(sys, factors, task.input, task.gts, task.lts, probes, opts);
    sol.diag.method = "drmatex-group" + std::to_string(task.group_id);
    return sol;
}

TransientSolution superpose(const std::vector<TransientSolution>& parts) {
    if (parts.empty())
        throw Error("superpose needs at least one part");
    TransientSolution out = parts.front();
    for (std::size_t p = 1; p < parts.size(); ++p) {
        const TransientSolution& part = parts[p];
        if (part.times.size() != out.times.size() ||
            part.probes.indices != out.probes.indices)
            throw GridMismatch("superpose: parts disagree on grid or probes");
        for (std::size_t i = 0; i < out.times.size(); ++i) {
            if (part.times[i] != out.times[i])
                throw GridMismatch("superpose: time grids differ at index " +
                                   std::to_string(i));
            out.states[i] += part.states[i];
        }
        out.diag.dc_pairs += part.diag.dc_pairs;
        out.diag.krylov_pairs += part.diag.krylov_pairs;
        out.diag.context_pairs += part.diag.context_pairs;
        out.diag.basis_builds += part.diag.basis_builds;
        out.diag.step_splits += part.diag.step_splits;
        out.diag.lu_count += part.diag.lu_count;
        out.diag.peak_m = std::max(out.diag.peak_m, part.diag.peak_m);
    }
    out.diag.method = "drmatex";
    out.diag.steps.clear();
    return out;
}

namespace {

int resolve_workers(int workers) {
    int w = std::max(workers, 1);
    if (const char* env = std::getenv("MATEX_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) w = std::min(w, cap);
    }
    return w;
}

} // namespace

DrMatexResult run_drmatex(const Circuit& circuit, const MnaSystem& sys,
                          double t_stop, const ProbeSet& probes,
                          const DrMatexOptions& opts) {
    const auto t_total = std::chrono::steady_clock::now();
    const std::uint64_t lu0 = stats::lu_count();
    const GroupPlan plan = group_by_bump(circuit, t_stop, opts.max_groups);
    std::vector<GroupTask> tasks = plan_tasks(circuit, sys, plan);

    const KrylovVariant variant = KrylovVariant::rational(opts.gamma);
    const MatexFactors factors = MatexFactors::make(sys, variant, 1);

    MatexOptions mo;
    mo.eps = opts.eps;
    mo.m_max = opts.m_max;
    mo.kernel_threads = 1; // workers parallelize across groups, not inside

    const int nw = resolve_workers(opts.workers);
    std::vector<TransientSolution> parts(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());

    const long ntasks = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic) num_threads(nw)
    for (long i = 0; i < ntasks; ++i) {
        try {
            parts[i] = run_group(tasks[i], sys, factors, probes, mo);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (long i = 0; i < ntasks; ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            throw Error("group " + std::to_string(tasks[i].group_id) +
                        " failed: " + e.what());
        }
    }

    DrMatexResult result;
    result.per_group.reserve(parts.size());
    for (const auto& p : parts)
        result.per_group.push_back(p.diag);
    result.solution = superpose(parts);
    result.solution.diag.lu_count = stats::lu_count() - lu0;
    result.solution.diag.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_total).count();
    result.solution.diag.tran_seconds = result.solution.diag.total_seconds;
    return result;
}

SpeedupEstimate estimate_speedup(const CostModelParams& p) {
    const double snapshot_cost = p.K * (p.T_H + p.T_e);
    const double reduced = p.k * p.m * p.T_bs + snapshot_cost + p.T_serial;
    if (!(reduced > 0.0))
        throw Error("cost model denominator must be positive");
    SpeedupEstimate s;
    s.vs_single = (p.K * p.m * p.T_bs + snapshot_cost + p.T_serial) / reduced;
    s.vs_fixed = (p.N * p.T_bs + p.T_serial) / reduced;
    return s;
}

} // namespace pdnsim
