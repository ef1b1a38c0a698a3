#pragma once

#include "pdnsim/netlist.hpp"
#include "pdnsim/types.hpp"

#include <random>
#include <string>

namespace pdnsim {

/// Synthetic stiff RC testbench: two RC rails whose time constants span the
/// target ratio of extreme eigenvalue real parts. The published study
/// circuit is unavailable, so this generator is the documented stand-in.
struct StiffBenchSpec {
    int n = 100;               // total nodes (split across the two rails)
    double stiffness = 4.7e6;  // target Re(lambda_min)/Re(lambda_max)
    double tau_slow = 1e-9;    // slow-rail time constant
    unsigned seed = 1;
};

struct StiffBench {
    Circuit circuit;
    SpMat C;
    SpMat G;
    Vec v; // random start vector, entries in (0,1]
    double realized_stiffness = 0.0;
};

StiffBench make_stiff_bench(const StiffBenchSpec& spec);

/// RC power-grid style bench: a resistor mesh with grounded capacitors and
/// pulse current loads drawn from a small set of bump signatures, corners on
/// a fixed time grid. Returns netlist text so runs exercise the parser too.
struct GridBenchSpec {
    int rows = 10;
    int cols = 10;
    double r_mesh = 1.0;
    double c_node = 4e-10;
    double r_ground = 10.0;
    int n_sources = 8;
    int n_signatures = 4;     // distinct bump shapes (>= 3 groups)
    double grid_unit = 1e-11; // pulse corners land on multiples of this
    double amp = 2e-3;
    double t_stop = 1e-8;
    unsigned seed = 7;
};

std::string make_rc_grid_netlist(const GridBenchSpec& spec);

/// Scalar RC bench with a ramp-down current source; the decay is analytic.
/// Used by the stability-order studies.
std::string make_rc_decay_netlist(double r, double c, double i0, double t_ramp,
                                  double t_stop);

} // namespace pdnsim
