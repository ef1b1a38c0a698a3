#include "pdnsim/solutionio.hpp"

#include <json.hpp>

#include <cstdio>
#include <ostream>
#include <sstream>

namespace pdnsim {

void write_solution_csv(const TransientSolution& sol, std::ostream& out) {
    out << "time";
    for (const auto& name : sol.probes.names) out << "," << name;
    out << "\n";
    char buf[32];
    for (std::size_t i = 0; i < sol.times.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.11e", sol.times[i]);
        out << buf;
        const Vec& x = sol.states[i];
        for (long j = 0; j < x.size(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.11e", x[j]);
            out << "," << buf;
        }
        out << "\n";
    }
}

std::string solution_csv(const TransientSolution& sol) {
    std::ostringstream out;
    write_solution_csv(sol, out);
    return out.str();
}

CsvData read_csv(std::istream& in) {
    CsvData data;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        if (header) {
            while (std::getline(ls, cell, ',')) data.columns.push_back(cell);
            header = false;
            continue;
        }
        std::vector<double> row;
        row.reserve(data.columns.size());
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != data.columns.size())
            throw Error("CSV row width mismatch");
        data.rows.push_back(std::move(row));
    }
    return data;
}

std::string diagnostics_json(const RunDiagnostics& diag,
                             const std::vector<RunDiagnostics>* per_group) {
    nlohmann::json j;
    j["method"] = diag.method;
    j["dc_seconds"] = diag.dc_seconds;
    j["tran_seconds"] = diag.tran_seconds;
    j["total_seconds"] = diag.total_seconds;
    j["subs_pairs"] = diag.total_pairs();
    j["dc_pairs"] = diag.dc_pairs;
    j["step_pairs"] = diag.step_pairs;
    j["krylov_pairs"] = diag.krylov_pairs;
    j["context_pairs"] = diag.context_pairs;
    j["peak_m"] = diag.peak_m;
    j["basis_builds"] = diag.basis_builds;
    j["lu_count"] = diag.lu_count;
    j["step_splits"] = diag.step_splits;
    if (per_group) {
        nlohmann::json groups = nlohmann::json::array();
        for (const auto& g : *per_group) {
            nlohmann::json gj;
            gj["group"] = g.method;
            gj["basis_builds"] = g.basis_builds;
            gj["krylov_pairs"] = g.krylov_pairs;
            gj["subs_pairs"] = g.total_pairs();
            gj["peak_m"] = g.peak_m;
            groups.push_back(gj);
        }
        j["groups"] = groups;
    }
    return j.dump(2);
}

} // namespace pdnsim
