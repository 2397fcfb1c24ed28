#pragma once

#include <vector>

#include "pathsum/engine.hpp"
#include "pathsum/graph.hpp"
#include "pathsum/matrix_spec.hpp"
#include "pathsum/time_grid.hpp"

namespace pathsum {

// Walk counts between vertices at graph distance d. Values are exact
// non-negative integers while they fit a double; larger values carry the
// usual floating-point rounding, which the envelope series tolerates.

// Looped path graph (self loop on every vertex): walks of length k between
// vertices d apart. sum_j C(k, 2j+d) C(2j+d, j).
double walk_count_path_graph(int d, int k);

// Looped N-hypercube walks of length k = 2*n_pairs + d between vertices at
// Hamming distance d, by the parity-sum formula. Requires 0 <= d <= N.
double walk_count_hypercube(int N, int d, int n_pairs);

struct BetheCount {
    double exact = 0.0; // walks of length 2n+d on the degree-(N+1) regular tree
    double bound = 0.0; // the closed-form majorant of that count
};
// Loopless regular tree where every vertex has N+1 neighbors; N >= 2.
BetheCount walk_count_bethe_upper(int N, int d, int n);

// Decay envelopes: |OE(t', t)_{omega alpha}| <= bound(h, t'-t, d) where h
// bounds every entry and d is the graph distance alpha -> omega.
double bound_tridiagonal(double h, double elapsed, int d);
double bound_lattice(double h, double elapsed, const std::vector<int>& coords);
double bound_bethe(double h, double elapsed, int N, int d);
double bound_hypercube(double beta_h, double elapsed, int N, int d);
double bound_generic(double h, double elapsed, int max_degree, int d);

struct BoundCheck {
    double h = 0.0;        // sup over grid nodes of the largest |entry|
    int degree = 0;        // max out-degree of the sparsity graph
    int distance = -1;     // alpha -> omega; -1 when unreachable
    bool reachable = false;
    std::vector<double> bound_at_node;
    double bound_final = 0.0;
    double max_violation = 0.0; // max over nodes of |entry| - bound
    int worst_node = 0;
};

// Generic envelope for one propagator entry, checked against precomputed
// entry values (one per grid node).
BoundCheck bound_check_values(const MatrixSpec& spec, const TimeGrid& grid,
                              const SparsityGraph& g,
                              const std::vector<double>& entry_values,
                              int omega, int alpha);

// Runs the path-sum engine for entry (omega, alpha) and checks it against
// the generic envelope at every grid node.
BoundCheck bound_from_matrix(const MatrixSpec& spec, const TimeGrid& grid,
                             int omega, int alpha,
                             const EngineOptions& opt = {});

} // namespace pathsum
