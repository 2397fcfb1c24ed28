#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "pathsum/expr.hpp"
#include "pathsum/time_grid.hpp"

namespace pathsum {

// Element of the kernel ring: a scalar multiple of the Dirac identity plus a
// smooth two-time kernel sampled on the causal triangle t' >= t.
//
// The smooth part is packed by rows: row i starts at i*(i+1)/2 and holds
// columns 0..i, so k(i, j) = smooth[i*(i+1)/2 + j] for i >= j. Entries above
// the diagonal are never stored or read. An empty smooth vector means the
// smooth part is identically zero; keeping that case symbolic is what makes
// products with the ring identity exact rather than merely accurate.
struct StarElement {
    TimeGrid grid;
    double delta_coeff = 0.0;
    std::vector<double> smooth;

    static std::size_t packed_size(int n) {
        return static_cast<std::size_t>(n) * (n + 1) / 2;
    }

    static StarElement zero(const TimeGrid& g) {
        StarElement e;
        e.grid = g;
        return e;
    }

    static StarElement identity(const TimeGrid& g) {
        StarElement e;
        e.grid = g;
        e.delta_coeff = 1.0;
        return e;
    }

    // Delta-free element with an allocated, zero-filled smooth triangle.
    static StarElement with_smooth(const TimeGrid& g) {
        StarElement e;
        e.grid = g;
        e.smooth.assign(packed_size(g.n_nodes), 0.0);
        return e;
    }

    bool smooth_is_zero() const { return smooth.empty(); }
    bool is_identity() const { return delta_coeff == 1.0 && smooth.empty(); }

    std::size_t row_offset(int i) const {
        return static_cast<std::size_t>(i) * (i + 1) / 2;
    }

    double k(int i, int j) const {
        return smooth.empty() ? 0.0 : smooth[row_offset(i) + j];
    }

    double& at(int i, int j) { return smooth[row_offset(i) + j]; }
};

// (a * b)(t', t) = a.delta*b.delta * 1 + cross terms + integral of
// a.smooth(t', tau) b.smooth(tau, t) over tau in [t, t'], composite trapezoid
// over the grid nodes between j and i. Throws InputError on grid mismatch.
// Products where one factor is the ring identity are exact.
StarElement star_product(const StarElement& a, const StarElement& b);

// m^{*0} = identity; m^{*p} = m * m^{*(p-1)}.
StarElement star_power(const StarElement& m, int p);

// (1 - m)^{*-1} = 1 + h where h solves the second-kind Volterra equation
// h = m + m*h, marched column by column with the implicit trapezoidal step.
// Requires delta-free m. Throws NumericError when the implicit-step pivot
// |1 - (dt/2) m(t_i,t_i)| falls below pivot_tol.
StarElement resolvent(const StarElement& m, double pivot_tol = 1e-12);

// g.delta_coeff + trapezoidal integral of g.smooth(t_i, tau) for tau in
// [t_j, t_i]; the delta part contributes its coefficient once (step convention
// at zero width). Throws InputError for i < j.
double integrate_final(const StarElement& g, int i, int j);

// Pointwise sum. The engine sums cycle weights with this.
StarElement star_add(const StarElement& a, const StarElement& b);
void star_accumulate(StarElement& acc, const StarElement& w);

// How a one-variable entry expression is placed on the two-time triangle.
// earlier_time: k(i, j) = f(t_j), the convention the propagator engine uses.
// later_time:   k(i, j) = f(t_i).
enum class SampleMode { earlier_time, later_time };

// Throws NumericError naming the offending node if the expression is not
// finite somewhere on the grid. An expression that is zero at every node
// yields the zero element (empty smooth part).
StarElement sample_kernel(const expr::Node& e, const TimeGrid& grid,
                          SampleMode mode = SampleMode::earlier_time);
StarElement sample_kernel(const expr::ExprPtr& e, const TimeGrid& grid,
                          SampleMode mode = SampleMode::earlier_time);
StarElement sample_kernel(const std::function<double(double)>& f, const TimeGrid& grid,
                          SampleMode mode = SampleMode::earlier_time);

} // namespace pathsum
