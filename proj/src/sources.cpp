#include "pdnsim/sources.hpp"

#include "pdnsim/netlist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace pdnsim {

namespace {

/// Shared linear interpolation. Bump pieces carved out of a pulse use the
/// same corner times and the same expression, so a decomposed source sums
/// bit-exactly to the original waveform.
double affine(double ta, double va, double tb, double vb, double t) {
    return va + (vb - va) * ((t - ta) / (tb - ta));
}

/// Zero-based bump envelope with corners c0 <= c1 <= c2 <= c3.
double bump_eval(double c0, double c1, double c2, double c3, double amp, double t) {
    if (t < c0 || t >= c3) return 0.0;
    if (t < c1) return affine(c0, 0.0, c1, amp, t);
    if (t < c2) return amp;
    return affine(c2, amp, c3, 0.0, t);
}

struct BumpCorners {
    double c0, c1, c2, c3;
};

BumpCorners bump_corners(const PulseSpec& p, int period) {
    const double t0 = p.td + static_cast<double>(period) * p.per;
    BumpCorners c{};
    c.c0 = t0;
    c.c1 = t0 + p.tr;
    c.c2 = c.c1 + p.pw;
    c.c3 = c.c2 + p.tf;
    return c;
}

} // namespace

// ---------------------------------------------------------------------------
// Waveform
// ---------------------------------------------------------------------------

Waveform Waveform::dc(double level) {
    Waveform w;
    w.kind_ = Kind::Dc;
    w.dc_ = level;
    return w;
}

Waveform Waveform::pwl(std::vector<std::pair<double, double>> points) {
    if (points.empty())
        throw Error("PWL waveform needs at least one point");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i].first > points[i - 1].first))
            throw Error("PWL points must be strictly increasing in t");
    Waveform w;
    w.kind_ = Kind::Pwl;
    w.pwl_ = std::move(points);
    return w;
}

Waveform Waveform::pulse(const PulseSpec& p) {
    PulseSpec q = p;
    if (q.tr <= 0.0) q.tr = kMinRamp;
    if (q.tf <= 0.0) q.tf = kMinRamp;
    if (q.pw < 0.0)
        throw Error("pulse width must be >= 0");
    if (q.per != 0.0 && q.per < q.tr + q.pw + q.tf)
        throw Error("pulse period shorter than rise+width+fall");
    Waveform w;
    w.kind_ = Kind::Pulse;
    w.pulse_ = q;
    return w;
}

double Waveform::eval(double t) const {
    switch (kind_) {
    case Kind::Dc:
        return dc_;
    case Kind::Pwl: {
        if (t <= pwl_.front().first) return pwl_.front().second;
        if (t >= pwl_.back().first) return pwl_.back().second;
        auto it = std::upper_bound(pwl_.begin(), pwl_.end(), t,
                                   [](double v, const auto& pt) { return v < pt.first; });
        const auto& b = *it;
        const auto& a = *(it - 1);
        return affine(a.first, a.second, b.first, b.second, t);
    }
    case Kind::Pulse: {
        const PulseSpec& p = pulse_;
        if (t < p.td) return p.v1;
        int period = 0;
        if (p.per > 0.0)
            period = static_cast<int>(std::floor((t - p.td) / p.per));
        const BumpCorners c = bump_corners(p, period);
        return p.v1 + bump_eval(c.c0, c.c1, c.c2, c.c3, p.v2 - p.v1, t);
    }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// BreakpointSet
// ---------------------------------------------------------------------------

BreakpointSet::BreakpointSet(std::vector<double> times) {
    std::sort(times.begin(), times.end());
    times_.reserve(times.size());
    for (double t : times) {
        if (times_.empty() || t - times_.back() > kSpotTolerance)
            times_.push_back(t);
    }
}

bool BreakpointSet::contains(double t) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t - kSpotTolerance);
    return it != times_.end() && std::abs(*it - t) <= kSpotTolerance;
}

std::optional<double> BreakpointSet::next_after(double t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t + kSpotTolerance);
    if (it == times_.end()) return std::nullopt;
    return *it;
}

double BreakpointSet::min_gap() const {
    if (times_.size() < 2) return std::numeric_limits<double>::infinity();
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < times_.size(); ++i)
        gap = std::min(gap, times_[i] - times_[i - 1]);
    return gap;
}

BreakpointSet BreakpointSet::merged(const std::vector<BreakpointSet>& sets) {
    std::vector<double> all;
    for (const auto& s : sets)
        all.insert(all.end(), s.times().begin(), s.times().end());
    return BreakpointSet(std::move(all));
}

// ---------------------------------------------------------------------------
// Breakpoint extraction
// ---------------------------------------------------------------------------

BreakpointSet breakpoints(const Waveform& w, double t_stop) {
    if (!(t_stop > 0.0))
        throw Error("t_stop must be positive");
    std::vector<double> pts{0.0};
    switch (w.kind()) {
    case Waveform::Kind::Dc:
        break;
    case Waveform::Kind::Pwl:
        for (const auto& [t, v] : w.pwl_points())
            if (t >= 0.0 && t <= t_stop) pts.push_back(t);
        break;
    case Waveform::Kind::Pulse: {
        const PulseSpec& p = w.pulse_spec();
        for (int i = 0;; ++i) {
            const BumpCorners c = bump_corners(p, i);
            if (c.c0 > t_stop) break;
            for (double t : {c.c0, c.c1, c.c2, c.c3})
                if (t <= t_stop) pts.push_back(t);
            if (p.per <= 0.0) break;
        }
        break;
    }
    }
    return BreakpointSet(std::move(pts));
}

BreakpointSet global_transition_spots(const Circuit& circuit, double t_stop) {
    std::vector<double> all{0.0, t_stop};
    for (const auto& e : circuit.elements) {
        if (!e.is_source() || !e.waveform) continue;
        const std::vector<double> ts = breakpoints(*e.waveform, t_stop).times();
        all.insert(all.end(), ts.begin(), ts.end());
    }
    return BreakpointSet(std::move(all));
}

BreakpointSet snapshots(const BreakpointSet& gts, const BreakpointSet& lts) {
    for (double t : lts.times())
        if (!gts.contains(t))
            throw SubsetViolation(t);
    std::vector<double> diff;
    for (double t : gts.times())
        if (!lts.contains(t))
            diff.push_back(t);
    return BreakpointSet(std::move(diff));
}

// ---------------------------------------------------------------------------
// Bump grouping
// ---------------------------------------------------------------------------

namespace {

/// A single bump as an exact PWL piece (zero outside its corners).
Waveform bump_piece(const PulseSpec& p, int period) {
    const BumpCorners c = bump_corners(p, period);
    const double amp = p.v2 - p.v1;
    std::vector<std::pair<double, double>> pts;
    pts.emplace_back(c.c0, 0.0);
    pts.emplace_back(c.c1, amp);
    if (c.c2 > c.c1) pts.emplace_back(c.c2, amp);
    pts.emplace_back(c.c3, 0.0);
    return Waveform::pwl(std::move(pts));
}

struct ProtoGroup {
    std::vector<GroupMember> members;
    std::vector<double> spot_pool;
};

} // namespace

GroupPlan group_by_bump(const Circuit& circuit, double t_stop, int max_groups) {
    if (max_groups < 1)
        throw Error("max_groups must be >= 1");

    GroupPlan plan;
    plan.gts = global_transition_spots(circuit, t_stop);

    // Signature key: {1, t_delay, t_rise, t_width, t_fall} for pulse bumps,
    // {0, knot times...} for PWL sources. std::map keeps the grouping
    // deterministic.
    std::map<std::vector<double>, ProtoGroup> by_signature;
    bool any_current = false;

    for (const auto& e : circuit.elements) {
        if (!e.time_varying()) continue;
        if (e.kind != ElementKind::CurrentSource) continue;
        any_current = true;

        const Waveform& w = *e.waveform;
        if (w.kind() == Waveform::Kind::Pulse) {
            const PulseSpec& p = w.pulse_spec();
            int nbumps = 1;
            if (p.per > 0.0) {
                nbumps = 0;
                for (int i = 0; bump_corners(p, i).c0 < t_stop; ++i) ++nbumps;
                nbumps = std::max(nbumps, 1);
            }
            if (p.v1 != 0.0)
                plan.baselines.emplace_back(e.name, p.v1);
            for (int i = 0; i < nbumps; ++i) {
                const BumpCorners c = bump_corners(p, i);
                GroupMember m;
                m.id = nbumps > 1 ? e.name + "." + std::to_string(i + 1) : e.name;
                m.source_name = e.name;
                m.piece = bump_piece(p, i);
                auto& g = by_signature[{1.0, c.c0, p.tr, p.pw, p.tf}];
                const std::vector<double> bps = breakpoints(m.piece, t_stop).times();
                g.spot_pool.insert(g.spot_pool.end(), bps.begin(), bps.end());
                g.members.push_back(std::move(m));
            }
        } else { // PWL: keep whole, keyed by its knot times
            std::vector<double> key{0.0};
            for (const auto& [t, v] : w.pwl_points()) key.push_back(t);
            GroupMember m;
            m.id = e.name;
            m.source_name = e.name;
            m.piece = w;
            auto& g = by_signature[key];
            const std::vector<double> bps = breakpoints(w, t_stop).times();
            g.spot_pool.insert(g.spot_pool.end(), bps.begin(), bps.end());
            g.members.push_back(std::move(m));
        }
    }
    if (!any_current)
        throw NoSources();

    std::vector<ProtoGroup> groups;
    groups.reserve(by_signature.size());
    for (auto& [key, g] : by_signature)
        groups.push_back(std::move(g));

    // Time-varying voltage sources ride in the base group (index 0).
    for (const auto& e : circuit.elements) {
        if (!e.time_varying() || e.kind != ElementKind::VoltageSource) continue;
        GroupMember m;
        m.id = e.name;
        m.source_name = e.name;
        m.piece = *e.waveform;
        const std::vector<double> bps = breakpoints(m.piece, t_stop).times();
        groups.front().spot_pool.insert(groups.front().spot_pool.end(), bps.begin(), bps.end());
        groups.front().members.push_back(std::move(m));
    }

    // Merge smallest-LTS groups pairwise until the bound holds. Group 0 (the
    // base group) keeps its slot so voltage-source spots stay with it.
    auto lts_size = [&](const ProtoGroup& g) {
        return BreakpointSet(g.spot_pool).size();
    };
    while (static_cast<int>(groups.size()) > max_groups) {
        std::size_t a = 0, b = 0;
        std::size_t best_a = std::numeric_limits<std::size_t>::max();
        std::size_t best_b = best_a;
        for (std::size_t i = 0; i < groups.size(); ++i) {
            const std::size_t sz = lts_size(groups[i]);
            if (sz < best_a) {
                best_b = best_a; b = a;
                best_a = sz; a = i;
            } else if (sz < best_b) {
                best_b = sz; b = i;
            }
        }
        if (a > b) std::swap(a, b);
        auto& ga = groups[a];
        auto& gb = groups[b];
        ga.members.insert(ga.members.end(),
                          std::make_move_iterator(gb.members.begin()),
                          std::make_move_iterator(gb.members.end()));
        ga.spot_pool.insert(ga.spot_pool.end(), gb.spot_pool.begin(), gb.spot_pool.end());
        groups.erase(groups.begin() + static_cast<long>(b));
    }

    // Every group owns 0 (first basis anchor) and t_stop (final spot), so the
    // union of group LTS equals the GTS.
    plan.groups.reserve(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) {
        SourceGroup g;
        g.group_id = static_cast<int>(i);
        g.members = std::move(groups[i].members);
        auto pool = std::move(groups[i].spot_pool);
        pool.push_back(0.0);
        pool.push_back(t_stop);
        g.lts = BreakpointSet(std::move(pool));
        plan.groups.push_back(std::move(g));
    }
    std::sort(plan.baselines.begin(), plan.baselines.end());
    return plan;
}

} // namespace pdnsim
