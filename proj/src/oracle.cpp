#include "pathsum/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "pathsum/errors.hpp"
#include "pathsum/star_element.hpp"

namespace pathsum {

namespace {

// H(t) into a dense row-major buffer; absent entries stay zero.
void eval_matrix(const MatrixSpec& spec, double t, double* out) {
    const int n = spec.n;
    std::memset(out, 0, sizeof(double) * n * n);
    for (const MatrixEntry& e : spec.entries)
        out[static_cast<std::size_t>(e.row) * n + e.col] = expr::evaluate(e.tree, t);
}

// dst = a * b for row-major n x n.
void mat_mul(const double* a, const double* b, double* dst, int n) {
    for (int i = 0; i < n; ++i) {
        double* row = dst + static_cast<std::size_t>(i) * n;
        std::memset(row, 0, sizeof(double) * n);
        for (int k = 0; k < n; ++k) {
            const double aik = a[static_cast<std::size_t>(i) * n + k];
            if (aik == 0.0) continue;
            const double* brow = b + static_cast<std::size_t>(k) * n;
            for (int j = 0; j < n; ++j) row[j] += aik * brow[j];
        }
    }
}

bool all_finite(const double* v, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i)
        if (!std::isfinite(v[i])) return false;
    return true;
}

} // namespace

OracleResult rk4_propagator(const MatrixSpec& spec, const TimeGrid& grid,
                            int substeps) {
    if (substeps < 1) throw InputError("rk4 substeps must be at least 1");
    if (!(spec.t_min == grid.t_min && spec.t_max == grid.t_max))
        throw InputError("grid interval does not match the matrix interval");

    const int n = spec.n;
    const std::size_t sz = static_cast<std::size_t>(n) * n;
    const double h = grid.dt / substeps;

    OracleResult res;
    res.method = "rk4";
    res.grid = grid;
    res.n = n;
    res.step = h;
    res.order = substeps;
    res.values.assign(static_cast<std::size_t>(grid.n_nodes) * sz, 0.0);

    std::vector<double> u(sz, 0.0);
    for (int i = 0; i < n; ++i) u[static_cast<std::size_t>(i) * n + i] = 1.0;

    std::vector<double> ht(sz), k1(sz), k2(sz), k3(sz), k4(sz), tmp(sz);
    auto deriv = [&](double t, const double* state, double* out) {
        eval_matrix(spec, t, ht.data());
        mat_mul(ht.data(), state, out, n);
    };

    std::copy(u.begin(), u.end(), res.values.begin());
    for (int node = 0; node + 1 < grid.n_nodes; ++node) {
        const double t0 = grid.node(node);
        for (int s = 0; s < substeps; ++s) {
            const double t = t0 + s * h;
            deriv(t, u.data(), k1.data());
            for (std::size_t i = 0; i < sz; ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
            deriv(t + 0.5 * h, tmp.data(), k2.data());
            for (std::size_t i = 0; i < sz; ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
            deriv(t + 0.5 * h, tmp.data(), k3.data());
            for (std::size_t i = 0; i < sz; ++i) tmp[i] = u[i] + h * k3[i];
            deriv(t + h, tmp.data(), k4.data());
            for (std::size_t i = 0; i < sz; ++i)
                u[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if (!all_finite(u.data(), sz))
            throw NumericError("rk4 state blew up near t = " +
                               std::to_string(grid.node(node + 1)));
        std::copy(u.begin(), u.end(),
                  res.values.begin() + static_cast<std::size_t>(node + 1) * sz);
    }
    return res;
}

OracleResult neumann_truncated(const MatrixSpec& spec, const TimeGrid& grid,
                               int order) {
    if (order < 0) throw InputError("neumann order must be non-negative");
    if (!(spec.t_min == grid.t_min && spec.t_max == grid.t_max))
        throw InputError("grid interval does not match the matrix interval");

    const int n = spec.n;
    OracleResult res;
    res.method = "neumann";
    res.grid = grid;
    res.n = n;
    res.order = order;
    res.values.assign(static_cast<std::size_t>(grid.n_nodes) * n * n, 0.0);

    // Kernels of every declared entry; absent positions stay the zero element.
    std::vector<StarElement> hk(static_cast<std::size_t>(n) * n,
                                StarElement::zero(grid));
    for (const MatrixEntry& e : spec.entries)
        hk[static_cast<std::size_t>(e.row) * n + e.col] =
            sample_kernel(e.tree, grid, SampleMode::earlier_time);

    // acc starts at the k=0 term (the identity); power walks H^{star k}.
    std::vector<StarElement> acc(static_cast<std::size_t>(n) * n,
                                 StarElement::zero(grid));
    std::vector<StarElement> power = acc;
    for (int i = 0; i < n; ++i) {
        acc[static_cast<std::size_t>(i) * n + i] = StarElement::identity(grid);
        power[static_cast<std::size_t>(i) * n + i] = StarElement::identity(grid);
    }

    std::vector<StarElement> next(static_cast<std::size_t>(n) * n,
                                  StarElement::zero(grid));
    for (int k = 1; k <= order; ++k) {
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                StarElement cell = StarElement::zero(grid);
                for (int j = 0; j < n; ++j) {
                    const StarElement& left = hk[static_cast<std::size_t>(r) * n + j];
                    const StarElement& right = power[static_cast<std::size_t>(j) * n + c];
                    if (left.delta_coeff == 0.0 && left.smooth_is_zero()) continue;
                    if (right.delta_coeff == 0.0 && right.smooth_is_zero()) continue;
                    star_accumulate(cell, star_product(left, right));
                }
                next[static_cast<std::size_t>(r) * n + c] = std::move(cell);
            }
        }
        power.swap(next);
        for (std::size_t i = 0; i < acc.size(); ++i)
            star_accumulate(acc[i], power[i]);
    }

    for (int node = 0; node < grid.n_nodes; ++node)
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                res.values[(static_cast<std::size_t>(node) * n + r) * n + c] =
                    integrate_final(acc[static_cast<std::size_t>(r) * n + c], node, 0);
    return res;
}

int neumann_order_for_tolerance(const MatrixSpec& spec, const TimeGrid& grid,
                                double tail_tol) {
    if (!(tail_tol > 0.0)) throw InputError("tail tolerance must be positive");
    const int n = spec.n;
    std::vector<double> ht(static_cast<std::size_t>(n) * n);
    double hsup = 0.0;
    for (int i = 0; i < grid.n_nodes; ++i) {
        eval_matrix(spec, grid.node(i), ht.data());
        for (int r = 0; r < n; ++r) {
            double row = 0.0;
            for (int c = 0; c < n; ++c)
                row += std::abs(ht[static_cast<std::size_t>(r) * n + c]);
            hsup = std::max(hsup, row);
        }
    }
    if (hsup == 0.0) return 0;

    const double span = grid.t_max - grid.t_min;
    const double lh = std::log(hsup);
    const double lspan = span > 0.0 ? std::log(span) : 0.0;
    for (int p = 0; p <= 400; ++p) {
        const double ltail = (p + 1) * lh + p * lspan - std::lgamma(p + 1.0);
        if (ltail < std::log(tail_tol)) return p;
    }
    throw NumericError("neumann tail bound needs more than 400 terms");
}

std::vector<double> matrix_exp(const std::vector<double>& m, int n) {
    if (n < 1) throw InputError("matrix_exp needs a positive dimension");
    const std::size_t sz = static_cast<std::size_t>(n) * n;
    if (m.size() != sz) throw InputError("matrix_exp buffer size mismatch");

    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += std::abs(m[static_cast<std::size_t>(i) * n + j]);
        norm = std::max(norm, row);
    }

    int squarings = 0;
    double scale = 1.0;
    while (norm * scale > 0.5) {
        scale *= 0.5;
        ++squarings;
    }

    std::vector<double> a(sz);
    for (std::size_t i = 0; i < sz; ++i) a[i] = m[i] * scale;

    std::vector<double> result(sz, 0.0), term(sz, 0.0), tmp(sz);
    for (int i = 0; i < n; ++i) {
        result[static_cast<std::size_t>(i) * n + i] = 1.0;
        term[static_cast<std::size_t>(i) * n + i] = 1.0;
    }
    for (int k = 1; k <= 60; ++k) {
        mat_mul(term.data(), a.data(), tmp.data(), n);
        for (std::size_t i = 0; i < sz; ++i) term[i] = tmp[i] / k;
        double tnorm = 0.0, rnorm = 0.0;
        for (std::size_t i = 0; i < sz; ++i) {
            result[i] += term[i];
            tnorm = std::max(tnorm, std::abs(term[i]));
            rnorm = std::max(rnorm, std::abs(result[i]));
        }
        if (tnorm <= 1e-18 * std::max(rnorm, 1.0)) break;
    }
    for (int s = 0; s < squarings; ++s) {
        mat_mul(result.data(), result.data(), tmp.data(), n);
        result.swap(tmp);
    }
    return result;
}

} // namespace pathsum
