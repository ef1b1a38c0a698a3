#pragma once

#include "pdnsim/integrate.hpp"
#include "pdnsim/sources.hpp"

#include <vector>

namespace pdnsim {

/// One per-group simulation task. Task inputs partition the full B u(t):
/// the base task carries every DC source and the baselines of decomposed
/// pulses, so summing all task inputs reproduces u(t) entry for entry.
struct GroupTask {
    int group_id = 0;
    bool base = false;
    BreakpointSet lts;
    BreakpointSet gts;
    InputVector input;
    std::vector<std::string> member_ids;
};

/// Builds one task per group of the plan.
std::vector<GroupTask> plan_tasks(const Circuit& circuit, const MnaSystem& sys,
                                  const GroupPlan& plan);

/// Worker body: masked MATEX run on the GTS grid, basis builds only at the
/// task's LTS anchors, snapshots by subspace reuse. The factor set is shared
/// (read-only) among workers.
TransientSolution run_group(const GroupTask& task, const MnaSystem& sys,
                            const MatexFactors& factors, const ProbeSet& probes,
                            const MatexOptions& opts);

/// Pointwise sum of per-group solutions in group order. Grids and probe sets
/// must match exactly.
TransientSolution superpose(const std::vector<TransientSolution>& parts);

struct DrMatexResult {
    TransientSolution solution;
    std::vector<RunDiagnostics> per_group;
};

struct DrMatexOptions {
    int max_groups = 100;
    int workers = 1;
    double gamma = 1e-10;
    double eps = 1e-6;
    int m_max = 30;
};

/// Distributed-by-superposition run: plan groups, run them on an OpenMP
/// worker pool with no communication during solving, then superpose. The
/// result is byte-identical for any worker count; MATEX_THREADS caps the
/// pool size.
DrMatexResult run_drmatex(const Circuit& circuit, const MnaSystem& sys,
                          double t_stop, const ProbeSet& probes,
                          const DrMatexOptions& opts);

// ---------------------------------------------------------------------------
// Runtime model
// ---------------------------------------------------------------------------

struct CostModelParams {
    double K = 0;        // |GTS|
    double k = 0;        // per-group |LTS|
    double m = 0;        // mean Krylov dimension
    double T_bs = 0;     // seconds per substitution pair
    double T_H = 0;      // seconds per dense exponential
    double T_e = 0;      // seconds per basis combination
    double T_serial = 0; // factorization + collection
    double N = 0;        // fixed-step count
};

struct SpeedupEstimate {
    double vs_single = 0; // over single MATEX
    double vs_fixed = 0;  // over the fixed-step scheme
};

/// Speedup   = (K m T_bs + K (T_H + T_e) + T_serial) / (k m T_bs + K (T_H + T_e) + T_serial)
/// Speedup'  = (N T_bs + T_serial) / (k m T_bs + K (T_H + T_e) + T_serial)
SpeedupEstimate estimate_speedup(const CostModelParams& p);

} // namespace pdnsim
