#pragma once

#include "pdnsim/netlist.hpp"
#include "pdnsim/sparsela.hpp"
#include "pdnsim/types.hpp"

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace pdnsim {

class SingularTopology : public Error {
public:
    explicit SingularTopology(const std::string& what) : Error(what) {}
};

struct StateInfo {
    enum class Kind { NodeVoltage, BranchCurrent };
    Kind kind;
    std::string name; // node name, or element name for branch currents
};

/// Sparse MNA system C x' = -G x + B u(t). Node voltages come first in the
/// state vector (circuit node order), then one branch current per voltage
/// source and inductor. Immutable after stamping and shareable across
/// threads.
struct MnaSystem {
    SpMat C;
    SpMat G;
    SpMat B;
    long n = 0; // states
    long s = 0; // inputs
    std::vector<StateInfo> state_map;
    std::vector<std::string> input_map; // B column -> source element name
    std::unordered_map<std::string, int> input_index;

    [[nodiscard]] int state_of_node(const Circuit& ckt, const std::string& node) const {
        return ckt.node_index(node);
    }
};

/// Standard MNA stamping. Current from node_pos to node_neg is positive.
/// Throws SingularTopology on voltage-source loops or current-source cutsets.
MnaSystem stamp(const Circuit& circuit);

/// Solves G x = B u0 by sparse LU; residual bounded by 1e-9 * |B u0|_inf.
Vec dc_analysis(const MnaSystem& sys, const Vec& u0);
Vec dc_analysis(const MnaSystem& sys, const Vec& u0, const LuFactor& g_factor);

/// Assembles u(t), one entry per source column: a DC level plus any number
/// of PWL/pulse pieces. Group tasks build masked variants whose entries sum
/// exactly to the full input.
class InputVector {
public:
    InputVector() = default;
    explicit InputVector(long s) : entries_(static_cast<std::size_t>(s)) {}

    /// Full input of the circuit: every source contributes its own waveform.
    static InputVector full(const Circuit& circuit, const MnaSystem& sys);

    void add_dc(int col, double level) { entries_.at(col).dc += level; }
    void add_piece(int col, Waveform piece) {
        entries_.at(col).pieces.push_back(std::move(piece));
    }

    [[nodiscard]] long size() const { return static_cast<long>(entries_.size()); }
    [[nodiscard]] Vec operator()(double t) const;

private:
    struct Entry {
        double dc = 0.0;
        std::vector<Waveform> pieces;
    };
    std::vector<Entry> entries_;
};

/// Matrix Market coordinate export (for cross-checking against other tools).
void export_matrix_market(const SpMat& m, std::ostream& out);

} // namespace pdnsim
