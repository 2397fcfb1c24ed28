#pragma once

#include <string>
#include <vector>

#include "pathsum/matrix_spec.hpp"
#include "pathsum/time_grid.hpp"

namespace pathsum {

// Full n x n propagator sampled at every grid node, computed by a reference
// method that shares no code path with the kernel algebra.
struct OracleResult {
    std::string method;
    TimeGrid grid;
    int n = 0;
    // node-major, row-major within a node: values[(node*n + row)*n + col]
    std::vector<double> values;
    double step = 0.0; // integrator step actually used (0 when not applicable)
    int order = 0;     // substeps for rk4, truncation order for neumann

    double at(int node, int row, int col) const {
        return values[(static_cast<std::size_t>(node) * n + row) * n + col];
    }
};

// Classical fixed-step RK4 on U' = H(t)U, U(t_min) = I; `substeps` steps per
// grid interval, all columns advanced jointly.
OracleResult rk4_propagator(const MatrixSpec& spec, const TimeGrid& grid,
                            int substeps = 4);

// Truncated Dyson/Neumann series: sum_{k=0..order} H^{star k} assembled
// entrywise in the kernel algebra on the given grid, then integrated in the
// second argument. Tail of the full series is below h^{P+1} dt^P / P!.
OracleResult neumann_truncated(const MatrixSpec& spec, const TimeGrid& grid,
                               int order);

// Smallest truncation order whose analytic tail bound h^{P+1} dt^P / P! drops
// below tail_tol, with h the largest induced max-row-sum norm of H over the
// grid nodes. Evaluated in log space; capped at 400.
int neumann_order_for_tolerance(const MatrixSpec& spec, const TimeGrid& grid,
                                double tail_tol = 1e-10);

// exp(M) for a dense row-major n x n matrix by scaling and squaring with a
// truncated Taylor core.
std::vector<double> matrix_exp(const std::vector<double>& m, int n);

} // namespace pathsum
