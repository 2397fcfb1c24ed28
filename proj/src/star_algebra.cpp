#include "pathsum/star_element.hpp"

#include <cmath>
#include <cstring>
#include <string>

namespace pathsum {

namespace {

// Unrolled dot product with a fixed accumulation order so results are
// reproducible run to run. The independent partial sums let the compiler keep
// several FMA chains in flight; this loop is where nearly all engine time goes.
double dot(const double* x, const double* y, int len) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    double s4 = 0.0, s5 = 0.0, s6 = 0.0, s7 = 0.0;
    int l = 0;
    for (; l + 8 <= len; l += 8) {
        s0 += x[l] * y[l];
        s1 += x[l + 1] * y[l + 1];
        s2 += x[l + 2] * y[l + 2];
        s3 += x[l + 3] * y[l + 3];
        s4 += x[l + 4] * y[l + 4];
        s5 += x[l + 5] * y[l + 5];
        s6 += x[l + 6] * y[l + 6];
        s7 += x[l + 7] * y[l + 7];
    }
    double s = ((s0 + s1) + (s2 + s3)) + ((s4 + s5) + (s6 + s7));
    for (; l < len; ++l) s += x[l] * y[l];
    return s;
}

// Column-major copy of the packed triangle: column j holds k(l, j) for
// l = j..n-1, contiguously. Gives the product loop two contiguous streams.
struct ColumnMajor {
    std::vector<double> data;
    std::vector<std::size_t> col_off;

    ColumnMajor(const StarElement& m, int n) {
        data.resize(StarElement::packed_size(n));
        col_off.resize(n);
        std::size_t off = 0;
        for (int j = 0; j < n; ++j) {
            col_off[j] = off;
            off += static_cast<std::size_t>(n - j);
        }
        for (int i = 0; i < n; ++i) {
            const double* row = &m.smooth[m.row_offset(i)];
            for (int j = 0; j <= i; ++j) data[col_off[j] + (i - j)] = row[j];
        }
    }

    const double* col(int j) const { return &data[col_off[j]]; }
};

void scale_smooth_into(StarElement& out, const StarElement& src, double c) {
    if (c == 0.0 || src.smooth_is_zero()) return;
    if (c == 1.0) {
        out.smooth = src.smooth;
        return;
    }
    out.smooth.resize(src.smooth.size());
    for (std::size_t i = 0; i < src.smooth.size(); ++i) out.smooth[i] = c * src.smooth[i];
}

} // namespace

StarElement star_product(const StarElement& a, const StarElement& b) {
    if (!a.grid.same_as(b.grid)) throw InputError("incompatible grids");
    const int n = a.grid.n_nodes;
    const double dt = a.grid.dt;

    StarElement out;
    out.grid = a.grid;
    out.delta_coeff = a.delta_coeff * b.delta_coeff;

    const bool az = a.smooth_is_zero();
    const bool bz = b.smooth_is_zero();
    if (az && bz) return out;
    if (az) {
        // a is a pure delta multiple; in particular the identity copies b exactly.
        scale_smooth_into(out, b, a.delta_coeff);
        return out;
    }
    if (bz) {
        scale_smooth_into(out, a, b.delta_coeff);
        return out;
    }

    out.smooth.resize(StarElement::packed_size(n));
    ColumnMajor bt(b, n);
    const double ad = a.delta_coeff;
    const double bd = b.delta_coeff;

    for (int i = 0; i < n; ++i) {
        const double* arow = &a.smooth[a.row_offset(i)];
        double* orow = &out.smooth[out.row_offset(i)];
        for (int j = 0; j < i; ++j) {
            const double* bcol = bt.col(j);
            const int len = i - j + 1;
            double s = dot(arow + j, bcol, len);
            s -= 0.5 * (arow[j] * bcol[0] + arow[i] * bcol[len - 1]);
            orow[j] = ad * bcol[len - 1] + bd * arow[j] + dt * s;
        }
        orow[i] = ad * bt.col(i)[0] + bd * arow[i];
    }
    return out;
}

StarElement star_power(const StarElement& m, int p) {
    if (p < 0) throw InputError("star power wants a non-negative exponent");
    if (p == 0) return StarElement::identity(m.grid);
    StarElement acc = m;
    for (int q = 1; q < p; ++q) acc = star_product(m, acc);
    return acc;
}

StarElement resolvent(const StarElement& m, double pivot_tol) {
    if (m.delta_coeff != 0.0)
        throw InputError("resolvent wants a delta-free kernel");
    if (m.smooth_is_zero()) return StarElement::identity(m.grid);

    const int n = m.grid.n_nodes;
    const double dt = m.grid.dt;

    StarElement out = StarElement::with_smooth(m.grid);
    out.delta_coeff = 1.0;

    std::vector<double> col(n);
    for (int j = 0; j < n; ++j) {
        col[j] = m.k(j, j);
        for (int i = j + 1; i < n; ++i) {
            const double* mrow = &m.smooth[m.row_offset(i)];
            const double denom = 1.0 - 0.5 * dt * mrow[i];
            if (std::abs(denom) < pivot_tol)
                throw NumericError("grid too coarse for implicit step at node " +
                                   std::to_string(i));
            double s = dot(mrow + j, col.data() + j, i - j);
            s -= 0.5 * mrow[j] * col[j];
            col[i] = (mrow[j] + dt * s) / denom;
        }
        for (int i = j; i < n; ++i) out.at(i, j) = col[i];
    }
    return out;
}

double integrate_final(const StarElement& g, int i, int j) {
    if (i < j) throw InputError("acausal query");
    double v = g.delta_coeff;
    if (g.smooth_is_zero() || i == j) return v;
    const double* row = &g.smooth[g.row_offset(i)];
    double s = 0.0;
    for (int l = j; l <= i; ++l) s += row[l];
    s -= 0.5 * (row[j] + row[i]);
    return v + g.grid.dt * s;
}

StarElement star_add(const StarElement& a, const StarElement& b) {
    if (!a.grid.same_as(b.grid)) throw InputError("incompatible grids");
    StarElement out;
    out.grid = a.grid;
    out.delta_coeff = a.delta_coeff + b.delta_coeff;
    if (a.smooth_is_zero()) {
        out.smooth = b.smooth;
    } else if (b.smooth_is_zero()) {
        out.smooth = a.smooth;
    } else {
        out.smooth.resize(a.smooth.size());
        for (std::size_t i = 0; i < a.smooth.size(); ++i)
            out.smooth[i] = a.smooth[i] + b.smooth[i];
    }
    return out;
}

void star_accumulate(StarElement& acc, const StarElement& w) {
    if (!acc.grid.same_as(w.grid)) throw InputError("incompatible grids");
    acc.delta_coeff += w.delta_coeff;
    if (w.smooth_is_zero()) return;
    if (acc.smooth_is_zero()) {
        acc.smooth = w.smooth;
        return;
    }
    for (std::size_t i = 0; i < acc.smooth.size(); ++i) acc.smooth[i] += w.smooth[i];
}

namespace {

StarElement sample_values(const std::vector<double>& vals, const TimeGrid& grid,
                          SampleMode mode) {
    const int n = grid.n_nodes;
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(vals[i]))
            throw NumericError("kernel expression is not finite at t = " +
                               std::to_string(grid.node(i)));
    }
    bool all_zero = true;
    for (int i = 0; i < n; ++i)
        if (vals[i] != 0.0) {
            all_zero = false;
            break;
        }
    if (all_zero) return StarElement::zero(grid);

    StarElement out = StarElement::with_smooth(grid);
    if (mode == SampleMode::earlier_time) {
        for (int i = 0; i < n; ++i)
            std::memcpy(&out.smooth[out.row_offset(i)], vals.data(),
                        (static_cast<std::size_t>(i) + 1) * sizeof(double));
    } else {
        for (int i = 0; i < n; ++i) {
            double* row = &out.smooth[out.row_offset(i)];
            for (int j = 0; j <= i; ++j) row[j] = vals[i];
        }
    }
    return out;
}

} // namespace

StarElement sample_kernel(const expr::Node& e, const TimeGrid& grid, SampleMode mode) {
    std::vector<double> vals(grid.n_nodes);
    for (int i = 0; i < grid.n_nodes; ++i) vals[i] = expr::evaluate(e, grid.node(i));
    return sample_values(vals, grid, mode);
}

StarElement sample_kernel(const expr::ExprPtr& e, const TimeGrid& grid, SampleMode mode) {
    return sample_kernel(*e, grid, mode);
}

StarElement sample_kernel(const std::function<double(double)>& f, const TimeGrid& grid,
                          SampleMode mode) {
    std::vector<double> vals(grid.n_nodes);
    for (int i = 0; i < grid.n_nodes; ++i) vals[i] = f(grid.node(i));
    return sample_values(vals, grid, mode);
}

} // namespace pathsum
