#include "pdnsim/integrate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace pdnsim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vec restrict_to(const Vec& x, const ProbeSet& probes) {
    Vec out(static_cast<long>(probes.indices.size()));
    for (std::size_t i = 0; i < probes.indices.size(); ++i)
        out[static_cast<long>(i)] = x[probes.indices[i]];
    return out;
}

} // namespace

ProbeSet make_probes(const Circuit& circuit, const MnaSystem& sys,
                     const std::vector<std::string>& nodes) {
    ProbeSet p;
    if (nodes.empty()) {
        for (long i = 0; i < sys.n; ++i) {
            if (sys.state_map[i].kind != StateInfo::Kind::NodeVoltage) continue;
            p.names.push_back(sys.state_map[i].name);
            p.indices.push_back(static_cast<int>(i));
        }
        return p;
    }
    for (const auto& name : nodes) {
        const int idx = circuit.node_index(name);
        if (idx < 0)
            throw Error("cannot probe ground");
        p.names.push_back(name);
        p.indices.push_back(idx);
    }
    return p;
}

double TransientSolution::sample(std::size_t probe, double t) const {
    if (times.empty())
        throw Error("empty solution");
    if (t <= times.front()) return states.front()[static_cast<long>(probe)];
    if (t >= times.back()) return states.back()[static_cast<long>(probe)];
    auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - times.begin());
    const double t0 = times[j - 1], t1 = times[j];
    const double v0 = states[j - 1][static_cast<long>(probe)];
    const double v1 = states[j][static_cast<long>(probe)];
    return v0 + (v1 - v0) * ((t - t0) / (t1 - t0));
}

// ---------------------------------------------------------------------------
// BE / TR
// ---------------------------------------------------------------------------

Vec step_be(const MnaSystem& sys, const LuFactor& factor, const Vec& x_t,
            const Vec& u_th, double h) {
    const Vec rhs = (sys.C * x_t) / h + sys.B * u_th;
    return factor.solve(rhs);
}

Vec step_tr(const MnaSystem& sys, const LuFactor& factor, const Vec& x_t,
            const Vec& u_t, const Vec& u_th, double h) {
    const Vec rhs = (sys.C * x_t) / h - 0.5 * (sys.G * x_t) + sys.B * (0.5 * (u_t + u_th));
    return factor.solve(rhs);
}

TransientSolution run_fixed_step(const MnaSystem& sys, const Circuit& circuit,
                                 FixedStepMethod method, double h, double t_stop,
                                 const ProbeSet& probes) {
    if (!(h > 0.0) || !(t_stop > 0.0))
        throw Error("step and t_stop must be positive");
    const BreakpointSet gts = global_transition_spots(circuit, t_stop);
    const double h_upper = gts.min_gap();
    if (h > h_upper * (1.0 + 1e-12))
        throw StepTooLarge(h, h_upper);

    TransientSolution sol;
    sol.probes = probes;
    sol.diag.method = method == FixedStepMethod::BE ? "be" : "tr";
    const auto t_total = Clock::now();

    const InputVector input = InputVector::full(circuit, sys);

    // DC phase.
    const auto t_dc = Clock::now();
    const std::uint64_t lu0 = stats::lu_count();
    Vec x = dc_analysis(sys, input(0.0));
    sol.diag.dc_pairs = 1;
    sol.diag.dc_seconds = seconds_since(t_dc);

    // Transient phase: one factorization, reused for every step.
    const auto t_tran = Clock::now();
    const SpMat step_matrix =
        method == FixedStepMethod::BE
            ? SpMat(sys.C / h + sys.G)
            : SpMat(sys.C / h + 0.5 * sys.G);
    const LuFactor factor = LuFactor::decompose(step_matrix);

    const double ratio = t_stop / h;
    const long nsteps = static_cast<long>(std::ceil(ratio * (1.0 - 1e-12)));

    sol.times.reserve(nsteps + 1);
    sol.states.reserve(nsteps + 1);
    sol.times.push_back(0.0);
    sol.states.push_back(restrict_to(x, probes));

    Vec u_t = input(0.0);
    for (long k = 1; k <= nsteps; ++k) {
        const double t = static_cast<double>(k) * h;
        const Vec u_th = input(t);
        x = method == FixedStepMethod::BE ? step_be(sys, factor, x, u_th, h)
                                          : step_tr(sys, factor, x, u_t, u_th, h);
        u_t = u_th;
        sol.times.push_back(t);
        sol.states.push_back(restrict_to(x, probes));
    }
    sol.diag.step_pairs = factor.pairs();
    sol.diag.lu_count = stats::lu_count() - lu0;
    sol.diag.tran_seconds = seconds_since(t_tran);
    sol.diag.total_seconds = seconds_since(t_total);
    return sol;
}

// ---------------------------------------------------------------------------
// Exponential integration
// ---------------------------------------------------------------------------

StepContext build_step_context(const MnaSystem& sys, const LuFactor& g_factor,
                               const Vec& b_t, const Vec& b_th, double h) {
    StepContext ctx;
    ctx.b_t = b_t;
    ctx.b_th = b_th;
    ctx.h = h;
    ctx.d = g_factor.solve((b_th - b_t) / h);
    ctx.F = g_factor.solve(sys.C * ctx.d - b_t);
    ctx.P = ctx.F - h * ctx.d;
    return ctx;
}

MatexFactors MatexFactors::make(const MnaSystem& sys, KrylovVariant variant,
                                int kernel_threads) {
    MatexFactors f{variant,
                   KrylovOperator::make(sys.C, sys.G, variant, kernel_threads),
                   LuFactor()};
    f.g_factor = variant.kind == KrylovVariant::Kind::Invert
                     ? f.op.x1_factor()
                     : LuFactor::decompose(sys.G);
    return f;
}

TransientSolution run_matex_lts(const MnaSystem& sys, const MatexFactors& factors,
                                const InputVector& input, const BreakpointSet& gts,
                                const BreakpointSet& lts, const ProbeSet& probes,
                                const MatexOptions& opts) {
    const KrylovVariant variant = factors.variant;
    if (variant.kind == KrylovVariant::Kind::Standard && !opts.allow_standard)
        throw Error("standard Krylov transient refused for stiff circuits; "
                    "use invert/rational or force it explicitly");
    if (gts.size() < 2)
        throw Error("GTS grid needs at least {0, t_stop}");

    TransientSolution sol;
    sol.probes = probes;
    sol.diag.method = variant.name() == "rational" ? "rmatex"
                      : variant.name() == "invert" ? "imatex"
                                                   : "matex-standard";
    const auto t_total = Clock::now();
    const std::uint64_t lu0 = stats::lu_count();

    const KrylovOperator& op = factors.op;
    const LuFactor& g_factor = factors.g_factor;

    // DC phase (reuses the G factor).
    const auto t_dc = Clock::now();
    std::uint64_t g_marker = g_factor.pairs();
    Vec x = dc_analysis(sys, input(gts[0]), g_factor);
    sol.diag.dc_pairs = g_factor.pairs() - g_marker;
    sol.diag.dc_seconds = seconds_since(t_dc);

    const auto t_tran = Clock::now();
    sol.times.push_back(gts[0]);
    sol.states.push_back(restrict_to(x, probes));

    KrylovBasis basis;
    StepContext ctx;
    double anchor_t = 0.0;
    bool have_anchor = false;

    for (std::size_t k = 0; k + 1 < gts.size(); ++k) {
        const double t = gts[k];
        const double t_next = gts[k + 1];
        const double h = t_next - t;
        StepDiagnostic sd;
        sd.t = t;
        sd.h = h;

        if (lts.contains(t)) {
            // Anchor: fresh context and basis; bisect the step if the
            // residual budget cannot be met at m_max.
            double cur = t;
            Vec b_cur = sys.B * input(cur);
            const Vec b_next = sys.B * input(t_next);
            while (true) {
                const double h_seg = t_next - cur;
                g_marker = g_factor.pairs();
                ctx = build_step_context(sys, g_factor, b_cur, b_next, h_seg);
                sol.diag.context_pairs += g_factor.pairs() - g_marker;

                double h_try = h_seg;
                const Vec v = x + ctx.F;
                while (true) {
                    const std::uint64_t k_marker = op.x1_factor().pairs();
                    try {
                        basis = arnoldi(op, v, h_try, opts.eps, opts.m_max);
                        sol.diag.krylov_pairs += op.x1_factor().pairs() - k_marker;
                        break;
                    } catch (const NoConvergence&) {
                        sol.diag.krylov_pairs += op.x1_factor().pairs() - k_marker;
                        h_try *= 0.5;
                        ++sd.splits;
                        if (h_try < 1e-18)
                            throw;
                    }
                }
                basis.anchor_t = cur;
                anchor_t = cur;
                have_anchor = true;
                ++sol.diag.basis_builds;
                sol.diag.peak_m = std::max(sol.diag.peak_m, basis.m);
                sd.m_used = std::max(sd.m_used, basis.m);
                sd.est_error = basis.last_residual;

                x = mevp_eval(basis, h_try) - ctx.p_at(h_try);
                if (h_try == h_seg) {
                    cur = t_next;
                    break;
                }
                cur += h_try;
                b_cur = sys.B * input(cur);
            }
            sol.diag.step_splits += sd.splits;
        } else {
            // Snapshot: reuse the anchor basis, scaled to h_a (Eq.-28 path,
            // zero substitution pairs).
            if (!have_anchor)
                throw Error("snapshot step before any LTS anchor");
            const double h_a = t_next - anchor_t;
            x = mevp_eval(basis, h_a) - ctx.p_at(h_a);
            sd.reused_basis = true;
            sd.m_used = basis.m;
            sd.est_error = residual_estimate(op, basis, h_a);
        }

        if (opts.dense_output_dt > 0.0) {
            // Extra evaluations between spots reuse the anchor basis and
            // cost no solves. They are emitted before the spot itself.
            for (double td = anchor_t + opts.dense_output_dt;
                 td < t_next - kSpotTolerance; td += opts.dense_output_dt) {
                if (td <= t + kSpotTolerance || td <= anchor_t) continue;
                const double ha = td - anchor_t;
                const Vec xi = mevp_eval(basis, ha) - ctx.p_at(ha);
                sol.times.push_back(td);
                sol.states.push_back(restrict_to(xi, probes));
            }
        }

        sol.times.push_back(t_next);
        sol.states.push_back(restrict_to(x, probes));
        sol.diag.steps.push_back(sd);
    }

    sol.diag.lu_count = stats::lu_count() - lu0;
    sol.diag.tran_seconds = seconds_since(t_tran);
    sol.diag.total_seconds = seconds_since(t_total);
    return sol;
}

TransientSolution run_matex(const MnaSystem& sys, const Circuit& circuit,
                            KrylovVariant variant, double eps, double t_stop,
                            const BreakpointSet& gts, const ProbeSet& probes,
                            MatexOptions opts) {
    (void)t_stop; // the grid already carries the final spot
    opts.eps = eps;
    const std::uint64_t lu0 = stats::lu_count();
    const MatexFactors factors = MatexFactors::make(sys, variant, opts.kernel_threads);
    const InputVector input = InputVector::full(circuit, sys);
    TransientSolution sol = run_matex_lts(sys, factors, input, gts, gts, probes, opts);
    sol.diag.lu_count = stats::lu_count() - lu0;
    return sol;
}

} // namespace pdnsim
