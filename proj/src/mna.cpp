#include "pdnsim/mna.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

namespace pdnsim {

namespace {

/// Accumulates duplicate triplets in a canonical order (row, col, value), so
/// the stamped matrix is bit-identical for any element ordering.
SpMat assemble(long rows, long cols, std::vector<Triplet>& trips) {
    std::sort(trips.begin(), trips.end(), [](const Triplet& a, const Triplet& b) {
        if (a.row() != b.row()) return a.row() < b.row();
        if (a.col() != b.col()) return a.col() < b.col();
        return a.value() < b.value();
    });
    std::vector<Triplet> summed;
    summed.reserve(trips.size());
    for (const auto& t : trips) {
        if (!summed.empty() && summed.back().row() == t.row() &&
            summed.back().col() == t.col()) {
            summed.back() = Triplet(t.row(), t.col(), summed.back().value() + t.value());
        } else {
            summed.push_back(t);
        }
    }
    SpMat m(rows, cols);
    m.setFromTriplets(summed.begin(), summed.end());
    m.makeCompressed();
    return m;
}

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

MnaSystem stamp(const Circuit& circuit) {
    const int nn = circuit.node_count();

    // Branch unknowns for voltage sources and inductors, in element order.
    std::vector<std::pair<const Element*, int>> branches;
    for (const auto& e : circuit.elements)
        if (e.kind == ElementKind::VoltageSource || e.kind == ElementKind::Inductor)
            branches.emplace_back(&e, 0);
    const long n = nn + static_cast<long>(branches.size());

    MnaSystem sys;
    sys.n = n;
    sys.state_map.reserve(n);
    for (int i = 0; i < nn; ++i)
        sys.state_map.push_back({StateInfo::Kind::NodeVoltage, circuit.node_names()[i]});
    {
        int next = nn;
        for (auto& [e, idx] : branches) {
            idx = next++;
            sys.state_map.push_back({StateInfo::Kind::BranchCurrent, e->name});
        }
    }

    for (const auto& e : circuit.elements) {
        if (e.is_source()) {
            sys.input_index.emplace(e.name, static_cast<int>(sys.input_map.size()));
            sys.input_map.push_back(e.name);
        }
    }
    sys.s = static_cast<long>(sys.input_map.size());

    // Topology checks: loops of ideal voltage sources and nodes fed only by
    // current sources make the system singular by construction.
    {
        UnionFind vloops(nn + 1);
        std::vector<bool> has_non_current(nn, false);
        std::vector<bool> touched(nn, false);
        auto slot = [&](const std::string& node) {
            const int i = circuit.node_index(node);
            return i < 0 ? nn : i;
        };
        for (const auto& e : circuit.elements) {
            const int a = slot(e.node_pos);
            const int b = slot(e.node_neg);
            if (e.kind == ElementKind::VoltageSource && !vloops.unite(a, b))
                throw SingularTopology("voltage-source loop through '" + e.name + "'");
            for (int x : {a, b}) {
                if (x == nn) continue;
                touched[x] = true;
                if (e.kind != ElementKind::CurrentSource) has_non_current[x] = true;
            }
        }
        for (int i = 0; i < nn; ++i)
            if (touched[i] && !has_non_current[i])
                throw SingularTopology("current-source cutset at node '" +
                                       circuit.node_names()[i] + "'");
    }

    std::vector<Triplet> tc, tg, tb;
    auto node = [&](const std::string& name) { return circuit.node_index(name); };
    auto stamp_pair = [](std::vector<Triplet>& t, int a, int b, double v) {
        if (a >= 0) t.emplace_back(a, a, v);
        if (b >= 0) t.emplace_back(b, b, v);
        if (a >= 0 && b >= 0) {
            t.emplace_back(a, b, -v);
            t.emplace_back(b, a, -v);
        }
    };

    std::size_t branch_at = 0;
    for (const auto& e : circuit.elements) {
        const int a = node(e.node_pos);
        const int b = node(e.node_neg);
        switch (e.kind) {
        case ElementKind::Resistor: {
            if (!(e.value > 0.0))
                throw Error("resistor '" + e.name + "' has non-positive value");
            stamp_pair(tg, a, b, 1.0 / e.value);
            break;
        }
        case ElementKind::Capacitor: {
            if (!(e.value > 0.0))
                throw Error("capacitor '" + e.name + "' has non-positive value");
            stamp_pair(tc, a, b, e.value);
            break;
        }
        case ElementKind::Inductor: {
            if (!(e.value > 0.0))
                throw Error("inductor '" + e.name + "' has non-positive value");
            const int br = branches[branch_at++].second;
            if (a >= 0) { tg.emplace_back(a, br, 1.0); tg.emplace_back(br, a, 1.0); }
            if (b >= 0) { tg.emplace_back(b, br, -1.0); tg.emplace_back(br, b, -1.0); }
            tc.emplace_back(br, br, -e.value);
            break;
        }
        case ElementKind::VoltageSource: {
            const int br = branches[branch_at++].second;
            if (a >= 0) { tg.emplace_back(a, br, 1.0); tg.emplace_back(br, a, 1.0); }
            if (b >= 0) { tg.emplace_back(b, br, -1.0); tg.emplace_back(br, b, -1.0); }
            tb.emplace_back(br, sys.input_index.at(e.name), 1.0);
            break;
        }
        case ElementKind::CurrentSource: {
            const int col = sys.input_index.at(e.name);
            if (a >= 0) tb.emplace_back(a, col, -1.0);
            if (b >= 0) tb.emplace_back(b, col, 1.0);
            break;
        }
        }
    }

    sys.C = assemble(n, n, tc);
    sys.G = assemble(n, n, tg);
    sys.B = assemble(n, std::max(sys.s, 1L), tb);
    if (sys.s == 0) sys.B.resize(n, 0);
    return sys;
}

Vec dc_analysis(const MnaSystem& sys, const Vec& u0, const LuFactor& g_factor) {
    if (u0.size() != sys.s)
        throw DimensionMismatch(sys.s, u0.size());
    const Vec b = sys.B * u0;
    Vec x = g_factor.solve(b);
    const double bn = b.cwiseAbs().maxCoeff();
    if (bn > 0.0) {
        const double resid = (sys.G * x - b).cwiseAbs().maxCoeff();
        if (!(resid <= 1e-9 * bn))
            throw Error("DC residual too large: " + std::to_string(resid));
    }
    return x;
}

Vec dc_analysis(const MnaSystem& sys, const Vec& u0) {
    LuFactor g = LuFactor::decompose(sys.G);
    return dc_analysis(sys, u0, g);
}

InputVector InputVector::full(const Circuit& circuit, const MnaSystem& sys) {
    InputVector u(sys.s);
    for (const auto& e : circuit.elements) {
        if (!e.is_source()) continue;
        const int col = sys.input_index.at(e.name);
        if (e.waveform)
            u.add_piece(col, *e.waveform);
        else
            u.add_dc(col, e.value);
    }
    return u;
}

Vec InputVector::operator()(double t) const {
    Vec u(static_cast<long>(entries_.size()));
    for (std::size_t j = 0; j < entries_.size(); ++j) {
        double v = entries_[j].dc;
        for (const auto& p : entries_[j].pieces) v += p.eval(t);
        u[static_cast<long>(j)] = v;
    }
    return u;
}

void export_matrix_market(const SpMat& m, std::ostream& out) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
    char buf[64];
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SpMat::InnerIterator it(m, k); it; ++it) {
            std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n",
                          static_cast<long>(it.row()) + 1,
                          static_cast<long>(it.col()) + 1, it.value());
            out << buf;
        }
    }
}

} // namespace pdnsim
