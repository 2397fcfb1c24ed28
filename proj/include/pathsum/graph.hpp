#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pathsum/matrix_spec.hpp"
#include "pathsum/time_grid.hpp"

namespace pathsum {

// Directed sparsity graph of H(t). Entry (row a, col b) being nonzero puts the
// edge b -> a in the graph: column index feeds row index under propagation.
// Vertices are 0-based; self-loops allowed, multi-edges impossible.
struct SparsityGraph {
    int n = 0;
    std::vector<std::vector<int>> out; // sorted out-neighbor lists

    std::uint64_t full_mask() const {
        return n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    }

    bool has_edge(int from, int to) const;
};

// An entry is an edge iff |value| > nonzero_tol at some grid node, unless the
// entry carries a force flag, which decides outright.
SparsityGraph build_graph(const MatrixSpec& spec, const TimeGrid& grid,
                          double nonzero_tol = 1e-12);

// All self-avoiding walks alpha -> omega inside the induced subgraph given by
// the vertex bitmask, in lexicographic order. For alpha == omega the result is
// the single trivial path (alpha).
std::vector<std::vector<int>> simple_paths(const SparsityGraph& g, std::uint64_t mask,
                                           int alpha, int omega);

// All cycles alpha -> ... -> alpha whose intermediate vertices are distinct,
// inside the mask, lexicographic. A self-loop is the length-1 cycle
// (alpha, alpha). Sequences include both endpoints.
std::vector<std::vector<int>> simple_cycles_at(const SparsityGraph& g,
                                               std::uint64_t mask, int alpha);

// Directed BFS shortest-path length; nullopt when omega is unreachable.
std::optional<int> distance(const SparsityGraph& g, int alpha, int omega);

// Maximum out-degree, counting a self-loop once.
int max_degree(const SparsityGraph& g);

} // namespace pathsum
