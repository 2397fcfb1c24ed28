#pragma once

#include <vector>

#include "pathsum/errors.hpp"

namespace pathsum {

// Uniform discretization of [t_min, t_max]. Every kernel lives on one of these.
struct TimeGrid {
    double t_min = 0.0;
    double t_max = 1.0;
    int n_nodes = 2;
    double dt = 1.0;
    std::vector<double> nodes;

    TimeGrid() : nodes{0.0, 1.0} {}

    TimeGrid(double t0, double t1, int n) {
        if (n < 2) throw InputError("time grid needs at least 2 nodes");
        if (!(t0 < t1)) throw InputError("time grid needs t_min < t_max");
        t_min = t0;
        t_max = t1;
        n_nodes = n;
        dt = (t1 - t0) / (n - 1);
        nodes.resize(n);
        for (int i = 0; i < n; ++i) nodes[i] = t0 + i * dt;
        nodes[n - 1] = t1;
    }

    double node(int i) const { return nodes[i]; }

    // Operations require both operands on the same grid; identity is by value.
    bool same_as(const TimeGrid& o) const {
        return t_min == o.t_min && t_max == o.t_max && n_nodes == o.n_nodes;
    }

    // Same interval, spacing divided by factor; node(factor*i) lands on node(i).
    TimeGrid refined(int factor) const {
        if (factor < 1) throw InputError("refinement factor must be >= 1");
        if (factor == 1) return *this;
        return TimeGrid(t_min, t_max, factor * (n_nodes - 1) + 1);
    }
};

} // namespace pathsum
