#pragma once

#include <cmath>
#include <vector>

#include "errors.hpp"
#include "summation.hpp"

namespace nehari {

// Uniform interior collocation grid on (-1,1): N nodes x_i = -1 + (i+1)h,
// h = 2/(N+1), so both boundary points are excluded and the zero exterior
// extension is implicit. Quadrature weights are the plain h.
struct Grid {
    int num_nodes = 0;
    double h = 0.0;
    std::vector<double> nodes;
    std::vector<double> quad_weights;
};

inline Grid build_grid(int num_nodes) {
    if (num_nodes < 3) throw config_error("grid requires num_nodes >= 3");
    Grid g;
    g.num_nodes = num_nodes;
    g.h = 2.0 / (num_nodes + 1);
    g.nodes.resize(num_nodes);
    g.quad_weights.assign(num_nodes, g.h);
    for (int i = 0; i < num_nodes; ++i) g.nodes[i] = -1.0 + (i + 1) * g.h;
    return g;
}

// Nodal values on a Grid; zero outside (-1,1) by convention.
struct GridFunction {
    const Grid* grid = nullptr;
    std::vector<double> values;

    int size() const { return static_cast<int>(values.size()); }
};

inline GridFunction make_function(const Grid& g, std::vector<double> values) {
    if (static_cast<int>(values.size()) != g.num_nodes)
        throw config_error("grid function size does not match grid");
    return GridFunction{&g, std::move(values)};
}

inline GridFunction constant_function(const Grid& g, double c) {
    return GridFunction{&g, std::vector<double>(g.num_nodes, c)};
}

inline GridFunction positive_part(const GridFunction& w) {
    GridFunction out{w.grid, w.values};
    for (double& v : out.values) v = std::max(v, 0.0);
    return out;
}

// Sum_i h * f(x_i)^exponent. Negative nodal values are allowed only for
// integer exponents; otherwise the power is undefined and we refuse.
inline double lp_weighted_sum(const GridFunction& f, double exponent) {
    if (!(exponent > 0.0)) throw config_error("lp_weighted_sum requires exponent > 0");
    const bool integral_exponent = exponent == std::floor(exponent);
    const double h = f.grid->h;
    CompensatedSum acc;
    for (double v : f.values) {
        if (v < 0.0 && !integral_exponent)
            throw config_error("lp_weighted_sum: negative base with fractional exponent");
        acc.add(h * std::pow(v, exponent));
    }
    return acc.value();
}

// (Sum_i h |f(x_i)|^m)^{1/m}
inline double lp_weighted_norm(const GridFunction& f, double m) {
    if (!(m > 0.0)) throw config_error("lp_weighted_norm requires m > 0");
    const double h = f.grid->h;
    CompensatedSum acc;
    for (double v : f.values) acc.add(h * std::pow(std::abs(v), m));
    return std::pow(acc.value(), 1.0 / m);
}

}
