#include "pathsum/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace pathsum {

Engine::Engine(const MatrixSpec& spec, const TimeGrid& grid, EngineOptions opt)
    : spec_(spec), opt_(opt), requested_(grid), fine_(grid.refined(opt.refine)) {
    if (!(spec.t_min == grid.t_min && spec.t_max == grid.t_max))
        throw InputError("grid interval does not match the matrix interval");
    // Edge detection uses the requested grid; refinement is purely a
    // quadrature device and must not change the sparsity structure.
    graph_ = build_graph(spec_, requested_, opt_.nonzero_tol);
    zero_ = StarElement::zero(fine_);
    edges_.assign(static_cast<std::size_t>(spec_.n) * spec_.n, zero_);
    for (const MatrixEntry& e : spec_.entries) {
        if (!graph_.has_edge(e.col, e.row)) continue;
        edges_[static_cast<std::size_t>(e.row) * spec_.n + e.col] =
            sample_kernel(e.tree, fine_, SampleMode::earlier_time);
    }
}

const StarElement& Engine::edge_kernel(int row, int col) const {
    return edges_[static_cast<std::size_t>(row) * spec_.n + col];
}

Engine::CachedKernel Engine::compute_green(std::uint64_t mask, int alpha) {
    const auto cycles = simple_cycles_at(graph_, mask, alpha);
    CachedKernel out;
    out.cycles = static_cast<int>(cycles.size());
    if (cycles.empty()) {
        out.g = StarElement::identity(fine_);
        return out;
    }

    StarElement m = StarElement::zero(fine_);
    int max_child_depth = 0;
    for (const auto& cyc : cycles) {
        // cyc = (alpha, mu_1, ..., mu_k, alpha); weight chains right to left:
        // H_{alpha,mu_k} * G_{mask minus {alpha,mu_1..mu_{k-1}}; mu_k} * ...
        //   ... * G_{mask minus {alpha}; mu_1} * H_{mu_1,alpha}
        const int k = static_cast<int>(cyc.size()) - 2;
        if (k == 0) {
            star_accumulate(m, edge_kernel(alpha, alpha));
            continue;
        }
        StarElement acc = edge_kernel(cyc[1], alpha);
        std::uint64_t sub = mask & ~(std::uint64_t{1} << alpha);
        for (int step = 1; step <= k; ++step) {
            const int mu = cyc[step];
            const CachedKernel& gk = green_cached(sub, mu);
            max_child_depth = std::max(max_child_depth, gk.depth);
            acc = star_product(gk.g, acc);
            const int next = cyc[step + 1]; // alpha when step == k
            acc = star_product(edge_kernel(next, mu), acc);
            sub &= ~(std::uint64_t{1} << mu);
        }
        star_accumulate(m, acc);
    }
    out.depth = 1 + max_child_depth;
    out.g = resolvent(m, opt_.pivot_tol);
    return out;
}

const Engine::CachedKernel& Engine::green_cached(std::uint64_t mask, int alpha) {
    if (!opt_.use_cache) {
        // Uncached mode recomputes every time; used to check that memoization
        // does not change results. Thread-local storage keeps references valid
        // for the duration of the calling computation.
        thread_local std::vector<std::unique_ptr<CachedKernel>> scratch;
        scratch.push_back(std::make_unique<CachedKernel>(compute_green(mask, alpha)));
        return *scratch.back();
    }

    const std::pair<std::uint64_t, int> key{mask, alpha};
    std::shared_ptr<std::shared_future<CachedKernel>> fut;
    std::shared_ptr<std::promise<CachedKernel>> prom;
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            prom = std::make_shared<std::promise<CachedKernel>>();
            fut = std::make_shared<std::shared_future<CachedKernel>>(
                prom->get_future().share());
            cache_.emplace(key, fut);
        } else {
            fut = it->second;
        }
    }
    if (prom) {
        try {
            prom->set_value(compute_green(mask, alpha));
        } catch (...) {
            prom->set_exception(std::current_exception());
        }
    }
    return fut->get();
}

StarElement Engine::green_kernel(std::uint64_t mask, int alpha) {
    if (alpha < 0 || alpha >= spec_.n || !((mask >> alpha) & 1u))
        throw InputError("green kernel anchor must lie in the subgraph mask");
    return green_cached(mask, alpha).g;
}

PropagatorResult Engine::path_sum_entry(int omega, int alpha) {
    if (omega < 0 || omega >= spec_.n || alpha < 0 || alpha >= spec_.n)
        throw InputError("propagator entry indices out of range");

    const std::uint64_t full = graph_.full_mask();
    const auto paths = simple_paths(graph_, full, alpha, omega);

    PropagatorResult res;
    res.omega = omega;
    res.alpha = alpha;
    res.paths_used = static_cast<int>(paths.size());

    StarElement total = StarElement::zero(fine_);
    for (const auto& p : paths) {
        const CachedKernel& g0 = green_cached(full, alpha);
        res.cycles_used += g0.cycles;
        res.recursion_depth = std::max(res.recursion_depth, g0.depth);
        StarElement acc = g0.g;
        std::uint64_t sub = full & ~(std::uint64_t{1} << alpha);
        for (std::size_t step = 1; step < p.size(); ++step) {
            const int nu = p[step];
            acc = star_product(edge_kernel(nu, p[step - 1]), acc);
            const CachedKernel& gk = green_cached(sub, nu);
            res.cycles_used += gk.cycles;
            res.recursion_depth = std::max(res.recursion_depth, gk.depth);
            acc = star_product(gk.g, acc);
            sub &= ~(std::uint64_t{1} << nu);
        }
        star_accumulate(total, acc);
    }

    res.values.resize(requested_.n_nodes);
    for (int i = 0; i < requested_.n_nodes; ++i)
        res.values[i] = integrate_final(total, opt_.refine * i, 0);
    return res;
}

int Engine::resolve_thread_count() const {
    int t = opt_.threads;
    if (t <= 0) {
        if (const char* env = std::getenv("PATHSUM_THREADS")) t = std::atoi(env);
    }
    if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
    if (t <= 0) t = 1;
    return t;
}

std::vector<PropagatorResult> Engine::full_propagator() {
    const int n = spec_.n;
    const int n_tasks = n * n;
    std::vector<PropagatorResult> results(n_tasks);
    const int n_threads = std::min(resolve_thread_count(), n_tasks);

    if (n_threads <= 1) {
        for (int task = 0; task < n_tasks; ++task)
            results[task] = path_sum_entry(task / n, task % n);
        return results;
    }

    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(n_threads);
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int task = next.fetch_add(1); task < n_tasks;
                     task = next.fetch_add(1))
                    results[task] = path_sum_entry(task / n, task % n);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
    return results;
}

double Engine::dyson_residual() {
    if (spec_.n != 2) throw InputError("dyson residual wants a 2-vertex matrix");

    const std::uint64_t full = graph_.full_mask();
    const StarElement g = green_kernel(full, 0);
    const StarElement g0 = resolvent(edge_kernel(0, 0), opt_.pivot_tol);
    const StarElement sigma = star_product(
        edge_kernel(0, 1), star_product(green_kernel(std::uint64_t{1} << 1, 1),
                                        edge_kernel(1, 0)));
    const StarElement rhs = star_product(g, star_product(sigma, g0));

    const double delta_residual = g.delta_coeff - g0.delta_coeff - rhs.delta_coeff;
    if (delta_residual != 0.0)
        throw NumericError("delta parts of the identity failed to cancel");

    const std::size_t sz = StarElement::packed_size(fine_.n_nodes);
    double worst = 0.0;
    for (std::size_t idx = 0; idx < sz; ++idx) {
        const double gs = g.smooth.empty() ? 0.0 : g.smooth[idx];
        const double g0s = g0.smooth.empty() ? 0.0 : g0.smooth[idx];
        const double rs = rhs.smooth.empty() ? 0.0 : rhs.smooth[idx];
        worst = std::max(worst, std::abs(gs - g0s - rs));
    }
    return worst;
}

} // namespace pathsum
