#pragma once

#include "pdnsim/sources.hpp"
#include "pdnsim/types.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace pdnsim {

class SyntaxError : public Error {
public:
    SyntaxError(int line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line(line) {}
    int line;
};

class DuplicateElement : public Error {
public:
    explicit DuplicateElement(const std::string& name)
        : Error("duplicate element '" + name + "'") {}
};

class UnknownSuffix : public Error {
public:
    explicit UnknownSuffix(const std::string& token)
        : Error("unknown value suffix in '" + token + "'") {}
};

enum class ElementKind { Resistor, Capacitor, Inductor, CurrentSource, VoltageSource };

struct Element {
    ElementKind kind = ElementKind::Resistor;
    std::string name;     // lower-cased, includes the type prefix
    std::string node_pos; // lower-cased node name; "0" is ground
    std::string node_neg;
    double value = 0.0;   // ohm/farad/henry, or DC level for sources
    std::optional<Waveform> waveform; // sources only

    [[nodiscard]] bool is_source() const {
        return kind == ElementKind::CurrentSource || kind == ElementKind::VoltageSource;
    }
    /// Source value at time t (waveform if present, else the DC level).
    [[nodiscard]] double source_value(double t) const {
        return waveform ? waveform->eval(t) : value;
    }
    [[nodiscard]] bool time_varying() const {
        return is_source() && waveform && !waveform->is_dc();
    }
};

struct AnalysisDirective {
    enum class Kind { Tran };
    Kind kind = Kind::Tran;
    double step_hint = 0.0;
    double t_stop = 0.0;
};

/// Parsed netlist. Node indices are assigned in first-appearance order;
/// ground ("0" or "gnd") is index -1 and never an unknown. Immutable once
/// parsed, so it can be shared freely between threads.
class Circuit {
public:
    std::string title;
    std::vector<Element> elements;
    std::vector<AnalysisDirective> analyses;

    [[nodiscard]] int node_count() const { return static_cast<int>(node_names_.size()); }
    [[nodiscard]] const std::vector<std::string>& node_names() const { return node_names_; }
    /// Index of a node name; -1 for ground; throws Error for unknown names.
    [[nodiscard]] int node_index(const std::string& name) const;
    [[nodiscard]] static bool is_ground(const std::string& name) {
        return name == "0" || name == "gnd";
    }

    /// Registers (or finds) a node, assigning the next index. Ground is -1.
    int intern_node(const std::string& name);

    [[nodiscard]] std::optional<AnalysisDirective> tran() const;

private:
    std::vector<std::string> node_names_;
    std::unordered_map<std::string, int> node_index_;
};

/// Parse the SPICE-subset dialect of the IBM power-grid benchmarks:
/// title line; `R|C|L|I|V name n+ n- value|PULSE(...)|PWL(...)`;
/// `.tran step tstop`; `.end`; `*` comments; case-insensitive;
/// SI suffixes f p n u m k meg g.
Circuit parse_netlist(std::istream& in);
Circuit parse_netlist(const std::string& text);
Circuit parse_netlist_file(const std::string& path);

/// Numeric literal with optional SI suffix and optional trailing unit
/// letters ("10ps", "1k", "2meg"). Throws UnknownSuffix.
double parse_value(const std::string& token);

struct Diagnostic {
    enum class Code { ZeroValue, FloatingNode, VSourceConflict };
    Code code;
    std::string subject; // element or node name
    std::string message;
};

/// Empty result means the circuit is simulatable.
std::vector<Diagnostic> validate(const Circuit& circuit);

/// Canonical netlist text; parse(unparse(parse(x))) preserves the element
/// multiset and all values exactly.
std::string unparse(const Circuit& circuit);

} // namespace pdnsim
