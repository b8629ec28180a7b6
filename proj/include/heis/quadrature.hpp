#pragma once

#include <span>
#include <vector>

namespace heis {

/// Nodes and weights of a one-dimensional quadrature rule on [a, b].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
    double integrate(std::span<const double> values) const;
};

/// Gauss-Legendre rule with `count` nodes mapped to [a, b].
QuadratureRule gauss_legendre(int count, double a, double b);

/// Composite Gauss-Legendre rule: one `per_panel` panel between each pair of
/// consecutive breakpoints. Breakpoints must be strictly increasing.
QuadratureRule composite_gauss(std::span<const double> breakpoints, int per_panel);

/// Composite Gauss rule in the variable u with x = a + (b - a)(1 - cos(pi u))/2 on each
/// panel. Square-root endpoint behaviour becomes smooth in u.
QuadratureRule clustered_gauss(std::span<const double> breakpoints, int per_panel);

enum class GridScheme { gauss, uniform };

/// Quadrature grid on [0, R]. Integrates f as sum_i w_i f(r_i) r_i^measure_exponent.
struct RadialGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
    double measure_exponent = 0.0;
    GridScheme scheme = GridScheme::gauss;
    double upper = 0.0;  ///< right end of the covered interval

    std::size_t size() const { return nodes.size(); }
    double r_max() const;
    double integrate(std::span<const double> values) const;
    /// Node spacing of a uniform grid; throws for Gauss grids.
    double spacing() const;
    void validate() const;
};

/// Gauss grids are exact for polynomials of degree <= 2*count-1. Uniform grids
/// use midpoint nodes (i + 1/2) h. count >= 8.
RadialGrid make_radial_grid(double r_max, int count, GridScheme scheme,
                            double measure_exponent = 0.0);

/// Radial grid built from a composite Gauss rule on [breakpoints.front(), breakpoints.back()].
RadialGrid make_panel_grid(std::span<const double> breakpoints, int per_panel,
                           double measure_exponent = 0.0);

/// A real radial function sampled on a RadialGrid.
struct RadialProfile {
    RadialGrid grid;
    std::vector<double> values;

    double integrate() const { return grid.integrate(values); }
};

template <class F>
RadialProfile sample_profile(const RadialGrid& grid, F&& f) {
    RadialProfile out{grid, {}};
    out.values.reserve(grid.size());
    for (double r : grid.nodes) out.values.push_back(f(r));
    return out;
}

}  // namespace heis
