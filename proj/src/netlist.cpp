#include "pdnsim/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace pdnsim {

namespace {

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

/// Splits on whitespace and commas, keeping "pulse(...)" style calls as a
/// single token even when their arguments contain spaces.
std::vector<std::string> tokenize(const std::string& line, int lineno) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char ch : line) {
        if (ch == '(') {
            ++depth;
            cur.push_back(ch);
        } else if (ch == ')') {
            --depth;
            if (depth < 0) throw SyntaxError(lineno, "unbalanced ')'");
            cur.push_back(ch);
        } else if (depth == 0 && (std::isspace(static_cast<unsigned char>(ch)) || ch == ',')) {
            if (!cur.empty()) { out.push_back(cur); cur.clear(); }
        } else if (depth > 0 && ch == ',') {
            cur.push_back(' ');
        } else {
            cur.push_back(ch);
        }
    }
    if (depth != 0) throw SyntaxError(lineno, "unbalanced '('");
    if (!cur.empty()) out.push_back(cur);
    return out;
}

bool is_numeric_start(const std::string& t) {
    if (t.empty()) return false;
    char c = t[0];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
}

} // namespace

double parse_value(const std::string& token) {
    const std::string t = to_lower(token);
    std::size_t pos = 0;
    double base = 0.0;
    try {
        base = std::stod(t, &pos);
    } catch (const std::exception&) {
        throw UnknownSuffix(token);
    }
    std::string tail = t.substr(pos);
    double scale = 1.0;
    // Longest-match suffix scan ("meg" before "m").
    static const std::pair<const char*, double> suffixes[] = {
        {"meg", 1e6}, {"f", 1e-15}, {"p", 1e-12}, {"n", 1e-9},
        {"u", 1e-6},  {"m", 1e-3},  {"k", 1e3},   {"g", 1e9}};
    for (const auto& [sfx, sc] : suffixes) {
        if (tail.rfind(sfx, 0) == 0) {
            scale = sc;
            tail = tail.substr(std::string(sfx).size());
            break;
        }
    }
    // Optional unit letters after the scale factor ("10ps", "1megohm").
    static const char* units[] = {"", "s", "f", "h", "v", "a", "hz", "ohm"};
    if (std::none_of(std::begin(units), std::end(units),
                     [&](const char* u) { return tail == u; }))
        throw UnknownSuffix(token);
    return base * scale;
}

int Circuit::node_index(const std::string& name) const {
    const std::string key = to_lower(name);
    if (is_ground(key)) return -1;
    auto it = node_index_.find(key);
    if (it == node_index_.end())
        throw Error("unknown node '" + name + "'");
    return it->second;
}

int Circuit::intern_node(const std::string& name) {
    const std::string key = to_lower(name);
    if (is_ground(key)) return -1;
    auto it = node_index_.find(key);
    if (it != node_index_.end()) return it->second;
    const int idx = static_cast<int>(node_names_.size());
    node_names_.push_back(key);
    node_index_.emplace(key, idx);
    return idx;
}

std::optional<AnalysisDirective> Circuit::tran() const {
    for (const auto& a : analyses)
        if (a.kind == AnalysisDirective::Kind::Tran) return a;
    return std::nullopt;
}

namespace {

Waveform parse_waveform_call(const std::string& token, int lineno) {
    const auto open = token.find('(');
    const auto close = token.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw SyntaxError(lineno, "malformed waveform '" + token + "'");
    const std::string fn = token.substr(0, open);
    std::istringstream args(token.substr(open + 1, close - open - 1));
    std::vector<double> vals;
    std::string a;
    while (args >> a) vals.push_back(parse_value(a));

    if (fn == "pulse") {
        if (vals.size() < 2 || vals.size() > 7)
            throw SyntaxError(lineno, "PULSE expects 2..7 parameters");
        PulseSpec p;
        p.v1 = vals[0];
        p.v2 = vals[1];
        if (vals.size() > 2) p.td = vals[2];
        if (vals.size() > 3) p.tr = vals[3];
        if (vals.size() > 4) p.tf = vals[4];
        if (vals.size() > 5) p.pw = vals[5];
        if (vals.size() > 6) p.per = vals[6];
        try {
            return Waveform::pulse(p);
        } catch (const Error& e) {
            throw SyntaxError(lineno, e.what());
        }
    }
    if (fn == "pwl") {
        if (vals.size() < 2 || vals.size() % 2 != 0)
            throw SyntaxError(lineno, "PWL expects an even number of parameters");
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < vals.size(); i += 2)
            pts.emplace_back(vals[i], vals[i + 1]);
        try {
            return Waveform::pwl(std::move(pts));
        } catch (const Error& e) {
            throw SyntaxError(lineno, e.what());
        }
    }
    throw SyntaxError(lineno, "unsupported waveform '" + fn + "'");
}

ElementKind kind_from_prefix(char c, int lineno) {
    switch (c) {
    case 'r': return ElementKind::Resistor;
    case 'c': return ElementKind::Capacitor;
    case 'l': return ElementKind::Inductor;
    case 'i': return ElementKind::CurrentSource;
    case 'v': return ElementKind::VoltageSource;
    default: break;
    }
    throw SyntaxError(lineno, std::string("unsupported element type '") + c + "'");
}

} // namespace

Circuit parse_netlist(std::istream& in) {
    Circuit ckt;
    std::string raw;
    int lineno = 0;
    bool have_title = false;
    bool ended = false;
    std::unordered_map<std::string, bool> seen_names;

    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (!have_title) {
            ckt.title = raw;
            have_title = true;
            continue;
        }
        if (ended || is_blank(raw)) continue;
        const std::string line = to_lower(raw);
        if (line[line.find_first_not_of(" \t")] == '*') continue;

        auto tokens = tokenize(line, lineno);
        if (tokens.empty()) continue;
        const std::string& head = tokens[0];

        if (head[0] == '.') {
            if (head == ".end") {
                ended = true;
            } else if (head == ".tran") {
                if (tokens.size() != 3)
                    throw SyntaxError(lineno, ".tran expects: .tran step tstop");
                AnalysisDirective d;
                d.step_hint = parse_value(tokens[1]);
                d.t_stop = parse_value(tokens[2]);
                if (!(d.t_stop > 0.0) || !(d.step_hint > 0.0))
                    throw SyntaxError(lineno, ".tran step and tstop must be positive");
                ckt.analyses.push_back(d);
            } else {
                throw SyntaxError(lineno, "unsupported directive '" + head + "'");
            }
            continue;
        }

        Element e;
        e.kind = kind_from_prefix(head[0], lineno);
        e.name = head;
        if (seen_names.count(e.name))
            throw DuplicateElement(e.name);
        seen_names.emplace(e.name, true);

        if (tokens.size() < 4)
            throw SyntaxError(lineno, "element needs: name n+ n- value");
        e.node_pos = tokens[1];
        e.node_neg = tokens[2];
        ckt.intern_node(e.node_pos);
        ckt.intern_node(e.node_neg);

        std::size_t vi = 3;
        if (e.is_source() && tokens[vi] == "dc") {
            if (++vi >= tokens.size())
                throw SyntaxError(lineno, "DC keyword needs a value");
        }
        const std::string& vt = tokens[vi];
        if (is_numeric_start(vt)) {
            try {
                e.value = parse_value(vt);
            } catch (const UnknownSuffix&) {
                throw;
            }
            ++vi;
        } else if (e.is_source() &&
                   (vt.rfind("pulse(", 0) == 0 || vt.rfind("pwl(", 0) == 0)) {
            e.waveform = parse_waveform_call(vt, lineno);
            ++vi;
        } else {
            throw SyntaxError(lineno, "expected value or waveform, got '" + vt + "'");
        }
        if (vi != tokens.size())
            throw SyntaxError(lineno, "trailing tokens after element definition");

        ckt.elements.push_back(std::move(e));
    }
    if (!have_title)
        throw SyntaxError(0, "empty netlist (missing title line)");
    return ckt;
}

Circuit parse_netlist(const std::string& text) {
    std::istringstream in(text);
    return parse_netlist(in);
}

Circuit parse_netlist_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open netlist file '" + path + "'");
    return parse_netlist(in);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

} // namespace

std::vector<Diagnostic> validate(const Circuit& circuit) {
    std::vector<Diagnostic> diags;
    const int n = circuit.node_count();
    const int ground = n; // extra slot for the ground net

    UnionFind conductive(n + 1); // R, L, V edges: paths that carry DC
    UnionFind vloops(n + 1);     // V edges only: loop detection

    auto slot = [&](const std::string& name) {
        const int i = circuit.node_index(name);
        return i < 0 ? ground : i;
    };

    for (const auto& e : circuit.elements) {
        const int a = slot(e.node_pos);
        const int b = slot(e.node_neg);
        if (!e.is_source() && !(e.value > 0.0)) {
            diags.push_back({Diagnostic::Code::ZeroValue, e.name,
                             "element '" + e.name + "' has non-positive value"});
            continue;
        }
        switch (e.kind) {
        case ElementKind::Resistor:
        case ElementKind::Inductor:
            conductive.unite(a, b);
            break;
        case ElementKind::VoltageSource:
            conductive.unite(a, b);
            if (!vloops.unite(a, b))
                diags.push_back({Diagnostic::Code::VSourceConflict, e.name,
                                 "voltage source '" + e.name +
                                     "' closes a loop of ideal voltage sources"});
            break;
        case ElementKind::Capacitor:
        case ElementKind::CurrentSource:
            break;
        }
    }

    for (int i = 0; i < n; ++i) {
        if (conductive.find(i) != conductive.find(ground))
            diags.push_back({Diagnostic::Code::FloatingNode, circuit.node_names()[i],
                             "node '" + circuit.node_names()[i] +
                                 "' has no resistive path to ground"});
    }
    return diags;
}

// ---------------------------------------------------------------------------
// Unparse
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string unparse(const Circuit& circuit) {
    std::ostringstream out;
    out << circuit.title << "\n";
    for (const auto& e : circuit.elements) {
        out << e.name << " " << e.node_pos << " " << e.node_neg;
        if (e.waveform) {
            const Waveform& w = *e.waveform;
            if (w.kind() == Waveform::Kind::Pulse) {
                const PulseSpec& p = w.pulse_spec();
                out << " PULSE(" << fmt(p.v1) << " " << fmt(p.v2) << " " << fmt(p.td)
                    << " " << fmt(p.tr) << " " << fmt(p.tf) << " " << fmt(p.pw) << " "
                    << fmt(p.per) << ")";
            } else if (w.kind() == Waveform::Kind::Pwl) {
                out << " PWL(";
                bool first = true;
                for (const auto& [t, v] : w.pwl_points()) {
                    if (!first) out << " ";
                    out << fmt(t) << " " << fmt(v);
                    first = false;
                }
                out << ")";
            } else {
                out << " " << fmt(w.dc_level());
            }
        } else {
            out << " " << fmt(e.value);
        }
        out << "\n";
    }
    for (const auto& a : circuit.analyses)
        out << ".tran " << fmt(a.step_hint) << " " << fmt(a.t_stop) << "\n";
    out << ".end\n";
    return out.str();
}

} // namespace pdnsim
