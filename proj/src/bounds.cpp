#include "pathsum/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "pathsum/errors.hpp"
#include "pathsum/special_functions.hpp"

namespace pathsum {

namespace {

// C(n, k) by the multiplicative ladder; every intermediate is itself a
// binomial coefficient, so the result is exact whenever it fits a double.
double binomial(int n, int k) {
    if (k < 0 || k > n || n < 0) return 0.0;
    if (k > n - k) k = n - k;
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

double pow_int(double base, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

double log_sinh(double x) { return x + std::log1p(-std::exp(-2.0 * x)) - std::log(2.0); }
double log_cosh(double x) { return x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0); }

} // namespace

double walk_count_path_graph(int d, int k) {
    if (d < 0 || k < 0) throw InputError("walk count indices must be non-negative");
    double total = 0.0;
    for (int j = 0; 2 * j + d <= k; ++j)
        total += binomial(k, 2 * j + d) * binomial(2 * j + d, j);
    return total;
}

double walk_count_hypercube(int N, int d, int n_pairs) {
    if (N < 0 || n_pairs < 0) throw InputError("walk count indices must be non-negative");
    if (d < 0 || d > N)
        throw InputError("hypercube distance must satisfy 0 <= d <= N");
    const int k = 2 * n_pairs + d;
    if (k == 0) return d == 0 ? 1.0 : 0.0;
    // The factor 2 out front folds the spectrum's +- symmetry, so i only
    // walks the non-negative half; an even N's zero mode contributes 0^k = 0.
    const int parity = N % 2;
    double total = 0.0;
    for (int i = 0; i <= N / 2; ++i) {
        double inner = 0.0;
        for (int j = 0; j <= d; ++j) {
            const double c = binomial(N - d, N / 2 - i - j) * binomial(d, j);
            inner += (j % 2 == 0) ? c : -c;
        }
        if (inner == 0.0) continue;
        total += pow_int(2.0 * i + parity, k) * inner;
    }
    return total * 2.0 / pow_int(2.0, N);
}

BetheCount walk_count_bethe_upper(int N, int d, int n) {
    if (N < 2) throw InputError("bethe branching number must be at least 2");
    if (d < 0 || n < 0) throw InputError("walk count indices must be non-negative");
    BetheCount out;
    for (int k = d; k <= n + d; ++k)
        out.exact += binomial(2 * n + d, n + d - k) * pow_int(N, n + d - k) *
                     (2.0 * k - d + 1.0) / (n + k + 1.0);
    out.bound = (n + 1.0) * binomial(2 * n + d, n) * pow_int(N, n) * (d + 1.0) /
                (n + d + 1.0);
    return out;
}

double bound_tridiagonal(double h, double elapsed, int d) {
    if (h < 0.0 || elapsed < 0.0 || d < 0)
        throw InputError("bound arguments must be non-negative");
    const double x = h * elapsed;
    return std::exp(x) * bessel_i(d, 2.0 * x);
}

double bound_lattice(double h, double elapsed, const std::vector<int>& coords) {
    if (h < 0.0 || elapsed < 0.0)
        throw InputError("bound arguments must be non-negative");
    const double x = h * elapsed;
    double prod = std::exp(x);
    for (int a : coords) {
        if (a < 0) throw InputError("lattice offsets must be non-negative");
        prod *= bessel_i(a, 2.0 * x);
    }
    return prod;
}

double bound_bethe(double h, double elapsed, int N, int d) {
    if (h < 0.0 || elapsed < 0.0 || d < 0)
        throw InputError("bound arguments must be non-negative");
    if (N < 2) throw InputError("bethe branching number must be at least 2");
    const double m = h * elapsed * std::sqrt(static_cast<double>(N));
    if (m == 0.0) return d == 0 ? 1.0 : 0.0;
    return std::exp(m) / m * (d + 1.0) * std::pow(static_cast<double>(N), -0.5 * d) *
           (bessel_i(d + 1, 2.0 * m) + m * bessel_i(d + 2, 2.0 * m));
}

double bound_hypercube(double beta_h, double elapsed, int N, int d) {
    if (beta_h < 0.0 || elapsed < 0.0)
        throw InputError("bound arguments must be non-negative");
    if (N < 0 || d < 0 || d > N)
        throw InputError("hypercube distance must satisfy 0 <= d <= N");
    const double x = beta_h * elapsed;
    if (x == 0.0) return d == 0 ? 1.0 : 0.0;
    if (x * (N + 1) > 500.0)
        return std::exp(x + d * log_sinh(x) + (N - d) * log_cosh(x));
    return std::exp(x) * pow_int(std::sinh(x), d) * pow_int(std::cosh(x), N - d);
}

double bound_generic(double h, double elapsed, int max_degree, int d) {
    if (h < 0.0 || elapsed < 0.0 || max_degree < 0 || d < 0)
        throw InputError("bound arguments must be non-negative");
    const double y = max_degree * h * elapsed;
    if (y == 0.0) return d == 0 ? 1.0 : 0.0;
    if (y > 500.0 || d > 100)
        return std::exp(y + d * std::log(y) - std::lgamma(d + 1.0));
    double p = 1.0;
    for (int i = 1; i <= d; ++i) p *= y / i;
    return std::exp(y) * p;
}

BoundCheck bound_check_values(const MatrixSpec& spec, const TimeGrid& grid,
                              const SparsityGraph& g,
                              const std::vector<double>& entry_values,
                              int omega, int alpha) {
    if (omega < 0 || omega >= spec.n || alpha < 0 || alpha >= spec.n)
        throw InputError("entry indices out of range");
    if (static_cast<int>(entry_values.size()) != grid.n_nodes)
        throw InputError("one entry value per grid node expected");

    BoundCheck out;
    out.degree = max_degree(g);

    // The envelope premise: h bounds every entry the walks can traverse.
    for (const MatrixEntry& e : spec.entries) {
        if (!g.has_edge(e.col, e.row)) continue;
        for (int i = 0; i < grid.n_nodes; ++i)
            out.h = std::max(out.h, std::abs(expr::evaluate(e.tree, grid.node(i))));
    }

    const auto dist = distance(g, alpha, omega);
    out.reachable = dist.has_value();
    out.distance = dist.value_or(-1);

    out.bound_at_node.resize(grid.n_nodes);
    for (int i = 0; i < grid.n_nodes; ++i) {
        const double b =
            out.reachable
                ? bound_generic(out.h, grid.node(i) - grid.t_min, out.degree, *dist)
                : 0.0;
        out.bound_at_node[i] = b;
        const double excess = std::abs(entry_values[i]) - b;
        if (excess > out.max_violation) {
            out.max_violation = excess;
            out.worst_node = i;
        }
    }
    out.bound_final = out.bound_at_node.back();
    return out;
}

BoundCheck bound_from_matrix(const MatrixSpec& spec, const TimeGrid& grid,
                             int omega, int alpha, const EngineOptions& opt) {
    Engine engine(spec, grid, opt);
    const PropagatorResult entry = engine.path_sum_entry(omega, alpha);
    return bound_check_values(spec, grid, engine.graph(), entry.values, omega, alpha);
}

} // namespace pathsum
