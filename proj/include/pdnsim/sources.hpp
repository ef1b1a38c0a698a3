#pragma once

#include "pdnsim/types.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pdnsim {

class Circuit;

/// Two transition spots closer than this are the same spot.
inline constexpr double kSpotTolerance = 1e-15;

/// Zero rise/fall times are promoted to this ramp so every input stays
/// piecewise linear with finite slopes.
inline constexpr double kMinRamp = 1e-15;

class NoSources : public Error {
public:
    NoSources() : Error("circuit has no time-varying current sources") {}
};

class SubsetViolation : public Error {
public:
    explicit SubsetViolation(double t)
        : Error("LTS spot " + std::to_string(t) + " is not a GTS spot") {}
};

// ---------------------------------------------------------------------------
// Waveforms
// ---------------------------------------------------------------------------

struct PulseSpec {
    double v1 = 0.0;
    double v2 = 0.0;
    double td = 0.0;
    double tr = kMinRamp;
    double tf = kMinRamp;
    double pw = 0.0;
    double per = 0.0; // 0 = single pulse
};

/// Input waveform u_j(t): DC level, piecewise-linear table, or pulse train.
class Waveform {
public:
    enum class Kind { Dc, Pwl, Pulse };

    static Waveform dc(double level);
    /// Points must be strictly increasing in t.
    static Waveform pwl(std::vector<std::pair<double, double>> points);
    /// tr/tf of zero are promoted to kMinRamp; requires per == 0 or
    /// per >= tr+pw+tf.
    static Waveform pulse(const PulseSpec& p);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] bool is_dc() const { return kind_ == Kind::Dc; }
    [[nodiscard]] double dc_level() const { return dc_; }
    [[nodiscard]] const PulseSpec& pulse_spec() const { return pulse_; }
    [[nodiscard]] const std::vector<std::pair<double, double>>& pwl_points() const {
        return pwl_;
    }

    /// Exact piecewise-linear value at t >= 0.
    [[nodiscard]] double eval(double t) const;

private:
    Kind kind_ = Kind::Dc;
    double dc_ = 0.0;
    PulseSpec pulse_;
    std::vector<std::pair<double, double>> pwl_;
};

// ---------------------------------------------------------------------------
// Breakpoints (transition spots)
// ---------------------------------------------------------------------------

/// Sorted set of transition spots with kSpotTolerance deduplication.
class BreakpointSet {
public:
    BreakpointSet() = default;
    /// Sorts and deduplicates; the result is independent of input order.
    explicit BreakpointSet(std::vector<double> times);

    [[nodiscard]] const std::vector<double>& times() const { return times_; }
    [[nodiscard]] std::size_t size() const { return times_.size(); }
    [[nodiscard]] bool empty() const { return times_.empty(); }
    [[nodiscard]] double operator[](std::size_t i) const { return times_[i]; }

    [[nodiscard]] bool contains(double t) const;
    /// Smallest spot strictly greater than t (tolerance-aware), if any.
    [[nodiscard]] std::optional<double> next_after(double t) const;
    /// Minimum gap between consecutive spots (h_upper); +inf if < 2 spots.
    [[nodiscard]] double min_gap() const;

    [[nodiscard]] static BreakpointSet merged(const std::vector<BreakpointSet>& sets);

private:
    std::vector<double> times_;
};

/// All slope-change times of w in [0, t_stop], including 0 and periodic
/// repetitions. DC yields {0}.
BreakpointSet breakpoints(const Waveform& w, double t_stop);

/// Union of every source's breakpoints, plus t_stop as the final spot.
BreakpointSet global_transition_spots(const Circuit& circuit, double t_stop);

/// GTS \ LTS. Throws SubsetViolation if some lts spot is absent from gts.
BreakpointSet snapshots(const BreakpointSet& gts, const BreakpointSet& lts);

// ---------------------------------------------------------------------------
// Source grouping ("bump" decomposition)
// ---------------------------------------------------------------------------

/// One member of a group: either a whole source or a single bump carved out
/// of a periodic pulse source. The pieces of a source, plus its baseline DC
/// share, sum exactly to the original waveform.
struct GroupMember {
    std::string id;          // "i3" for a whole source, "i3.2" for bump #2
    std::string source_name; // owning element
    Waveform piece;
};

struct SourceGroup {
    int group_id = 0;
    std::vector<GroupMember> members;
    BreakpointSet lts;
};

struct GroupPlan {
    BreakpointSet gts;
    std::vector<SourceGroup> groups;
    /// Baseline DC shares of decomposed sources (source name, level); these
    /// belong to the base task together with all DC-only sources.
    std::vector<std::pair<std::string, double>> baselines;
};

/// Decompose the time-varying current sources into at most max_groups groups
/// keyed by bump signature (delay, rise, width, fall). Distinct bumps of one
/// periodic source land in separate groups; when signatures exceed
/// max_groups, the smallest-LTS groups are merged pairwise. Time-varying
/// voltage sources ride along in group 0 (the base group).
GroupPlan group_by_bump(const Circuit& circuit, double t_stop, int max_groups);

} // namespace pdnsim
