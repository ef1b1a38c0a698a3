#pragma once

#include "pdnsim/integrate.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace pdnsim {

/// Waveform CSV: header `time,<node>...`, one row per time point, scientific
/// notation with 12 significant digits. Parses back losslessly at that
/// precision.
void write_solution_csv(const TransientSolution& sol, std::ostream& out);
std::string solution_csv(const TransientSolution& sol);

struct CsvData {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};
CsvData read_csv(std::istream& in);

/// Run diagnostics as JSON (DC/Tran/Total seconds, substitution-pair
/// breakdown, peak Krylov dimension), with optional per-group records for
/// the distributed runs.
std::string diagnostics_json(const RunDiagnostics& diag,
                             const std::vector<RunDiagnostics>* per_group = nullptr);

} // namespace pdnsim
