#pragma once

#include "pdnsim/krylov.hpp"
#include "pdnsim/mna.hpp"
#include "pdnsim/sources.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pdnsim {

class StepTooLarge : public Error {
public:
    StepTooLarge(double h, double h_upper)
        : Error("fixed step " + std::to_string(h) + " exceeds h_upper = " +
                std::to_string(h_upper)),
          h(h), h_upper(h_upper) {}
    double h, h_upper;
};

class GridMismatch : public Error {
public:
    explicit GridMismatch(const std::string& what) : Error(what) {}
};

/// Which state entries a solution retains.
struct ProbeSet {
    std::vector<std::string> names;
    std::vector<int> indices;
};

/// All node voltages, or a named subset.
ProbeSet make_probes(const Circuit& circuit, const MnaSystem& sys,
                     const std::vector<std::string>& nodes = {});

struct StepDiagnostic {
    double t = 0.0;
    double h = 0.0;
    int m_used = 0;
    bool reused_basis = false;
    int splits = 0;
    double est_error = 0.0;
};

struct RunDiagnostics {
    std::string method;
    double dc_seconds = 0.0;
    double tran_seconds = 0.0;
    double total_seconds = 0.0;
    std::uint64_t dc_pairs = 0;
    std::uint64_t step_pairs = 0;    // fixed-step substitution pairs
    std::uint64_t krylov_pairs = 0;  // Arnoldi pairs against X1
    std::uint64_t context_pairs = 0; // F/P pairs against G
    std::uint64_t lu_count = 0;      // factorizations performed by the run
    std::uint64_t basis_builds = 0;
    std::uint64_t step_splits = 0;
    int peak_m = 0;
    std::vector<StepDiagnostic> steps;

    [[nodiscard]] std::uint64_t total_pairs() const {
        return dc_pairs + step_pairs + krylov_pairs + context_pairs;
    }
};

struct TransientSolution {
    std::vector<double> times;
    std::vector<Vec> states; // probe-restricted, one per time point
    ProbeSet probes;
    RunDiagnostics diag;

    [[nodiscard]] long n_probes() const { return static_cast<long>(probes.indices.size()); }
    /// Linear interpolation of probe p at time t (grids are PWL between
    /// stored points for the fixed-step methods; MATEX stores all GTS spots).
    [[nodiscard]] double sample(std::size_t probe, double t) const;
};

// ---------------------------------------------------------------------------
// Classical fixed-step schemes
// ---------------------------------------------------------------------------

enum class FixedStepMethod { BE, TR };

/// One backward-Euler step: (C/h + G) x_{t+h} = (C/h) x_t + B u(t+h).
Vec step_be(const MnaSystem& sys, const LuFactor& factor, const Vec& x_t,
            const Vec& u_th, double h);

/// One trapezoidal step:
/// (C/h + G/2) x_{t+h} = (C/h - G/2) x_t + B (u_t + u_th)/2.
Vec step_tr(const MnaSystem& sys, const LuFactor& factor, const Vec& x_t,
            const Vec& u_t, const Vec& u_th, double h);

/// Fixed-step run: one factorization for the whole transient, ceil(t_stop/h)
/// steps, DC initial condition. Throws StepTooLarge when h exceeds the
/// minimum breakpoint gap.
TransientSolution run_fixed_step(const MnaSystem& sys, const Circuit& circuit,
                                 FixedStepMethod method, double h, double t_stop,
                                 const ProbeSet& probes);

// ---------------------------------------------------------------------------
// Exponential integration
// ---------------------------------------------------------------------------

/// Input-injection vectors of one anchor segment:
///   F = A^{-1} b(t) + A^{-2} (b(t+h)-b(t))/h
///   P(h') = F - h' * d,  d = G^{-1} B du/dt
/// computed with exactly two substitution pairs against G (no C^{-1}):
///   d = G \ ((b_th - b_t)/h),  F = G \ (C d - b_t).
struct StepContext {
    Vec F;
    Vec P;
    Vec b_t;
    Vec b_th;
    Vec d;
    double h = 0.0;

    [[nodiscard]] Vec p_at(double hh) const { return F - hh * d; }
};

StepContext build_step_context(const MnaSystem& sys, const LuFactor& g_factor,
                               const Vec& b_t, const Vec& b_th, double h);

struct MatexOptions {
    double eps = 1e-6;  // residual budget, relative to |v|
    int m_max = 30;
    bool allow_standard = false; // Standard refuses transient runs otherwise
    int kernel_threads = 0;
    double dense_output_dt = 0.0; // extra zero-solve output points when > 0
};

/// The two factorizations a MATEX run may perform: X1 for the subspace and
/// G for DC and the input contexts. For the invert variant X1 is G, so a
/// single factorization serves both. Shareable (read-only) across workers.
struct MatexFactors {
    KrylovVariant variant;
    KrylovOperator op;
    LuFactor g_factor;

    static MatexFactors make(const MnaSystem& sys, KrylovVariant variant,
                             int kernel_threads = 0);
};

/// MATEX adaptive transient run over a prepared factor set: march breakpoint
/// to breakpoint, building one Krylov basis per LTS anchor and reusing it at
/// snapshot spots. For a plain run lts == gts: every spot is an anchor.
TransientSolution run_matex_lts(const MnaSystem& sys, const MatexFactors& factors,
                                const InputVector& input, const BreakpointSet& gts,
                                const BreakpointSet& lts, const ProbeSet& probes,
                                const MatexOptions& opts = {});

/// Algorithm-2 style whole-circuit run over the full GTS grid.
TransientSolution run_matex(const MnaSystem& sys, const Circuit& circuit,
                            KrylovVariant variant, double eps, double t_stop,
                            const BreakpointSet& gts, const ProbeSet& probes,
                            MatexOptions opts = {});

} // namespace pdnsim
