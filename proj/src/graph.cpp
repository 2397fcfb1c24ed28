#include "pathsum/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace pathsum {

bool SparsityGraph::has_edge(int from, int to) const {
    const auto& nb = out[from];
    return std::binary_search(nb.begin(), nb.end(), to);
}

SparsityGraph build_graph(const MatrixSpec& spec, const TimeGrid& grid,
                          double nonzero_tol) {
    SparsityGraph g;
    g.n = spec.n;
    g.out.assign(spec.n, {});
    for (const MatrixEntry& e : spec.entries) {
        bool nonzero = false;
        if (e.force_nonzero >= 0) {
            nonzero = e.force_nonzero == 1;
        } else {
            for (int i = 0; i < grid.n_nodes; ++i) {
                if (std::abs(expr::evaluate(e.tree, grid.node(i))) > nonzero_tol) {
                    nonzero = true;
                    break;
                }
            }
        }
        if (nonzero) g.out[e.col].push_back(e.row);
    }
    for (auto& nb : g.out) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    return g;
}

namespace {

bool in_mask(std::uint64_t mask, int v) { return (mask >> v) & 1u; }

void paths_dfs(const SparsityGraph& g, std::uint64_t mask, int omega,
               std::vector<int>& path, std::uint64_t visited,
               std::vector<std::vector<int>>& out) {
    const int v = path.back();
    if (v == omega) {
        out.push_back(path);
        return;
    }
    for (int w : g.out[v]) {
        if (!in_mask(mask, w) || in_mask(visited, w)) continue;
        path.push_back(w);
        paths_dfs(g, mask, omega, path, visited | (std::uint64_t{1} << w), out);
        path.pop_back();
    }
}

void cycles_dfs(const SparsityGraph& g, std::uint64_t mask, int alpha,
                std::vector<int>& path, std::uint64_t visited,
                std::vector<std::vector<int>>& out) {
    const int v = path.back();
    for (int w : g.out[v]) {
        if (w == alpha) {
            path.push_back(alpha);
            out.push_back(path);
            path.pop_back();
            continue;
        }
        if (!in_mask(mask, w) || in_mask(visited, w)) continue;
        path.push_back(w);
        cycles_dfs(g, mask, alpha, path, visited | (std::uint64_t{1} << w), out);
        path.pop_back();
    }
}

} // namespace

std::vector<std::vector<int>> simple_paths(const SparsityGraph& g, std::uint64_t mask,
                                           int alpha, int omega) {
    if (!in_mask(mask, alpha) || !in_mask(mask, omega))
        throw InputError("path endpoints must lie in the subgraph mask");
    if (alpha == omega) return {{alpha}};
    std::vector<std::vector<int>> out;
    std::vector<int> path{alpha};
    paths_dfs(g, mask, omega, path, std::uint64_t{1} << alpha, out);
    return out;
}

std::vector<std::vector<int>> simple_cycles_at(const SparsityGraph& g,
                                               std::uint64_t mask, int alpha) {
    if (!in_mask(mask, alpha))
        throw InputError("cycle anchor must lie in the subgraph mask");
    std::vector<std::vector<int>> out;
    std::vector<int> path{alpha};
    cycles_dfs(g, mask, alpha, path, std::uint64_t{1} << alpha, out);
    return out;
}

std::optional<int> distance(const SparsityGraph& g, int alpha, int omega) {
    if (alpha == omega) return 0;
    std::vector<int> dist(g.n, -1);
    dist[alpha] = 0;
    std::deque<int> q{alpha};
    while (!q.empty()) {
        const int v = q.front();
        q.pop_front();
        for (int w : g.out[v]) {
            if (dist[w] >= 0) continue;
            dist[w] = dist[v] + 1;
            if (w == omega) return dist[w];
            q.push_back(w);
        }
    }
    return std::nullopt;
}

int max_degree(const SparsityGraph& g) {
    std::size_t best = 0;
    for (const auto& nb : g.out) best = std::max(best, nb.size());
    return static_cast<int>(best);
}

} // namespace pathsum
