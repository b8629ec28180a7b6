#include "heis/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace heis {

namespace {

struct StandardRule {
    std::vector<double> x;
    std::vector<double> w;
};

StandardRule compute_standard_rule(int n) {
    StandardRule rule{std::vector<double>(n), std::vector<double>(n)};
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // one more derivative evaluation at the converged node
        double p0 = 1.0;
        double p1 = x;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.x[i] = -x;
        rule.w[i] = w;
        rule.x[n - 1 - i] = x;
        rule.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.x[n / 2] = 0.0;
    return rule;
}

const StandardRule& standard_rule(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<StandardRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<StandardRule>(compute_standard_rule(n));
    return *slot;
}

}  // namespace

double QuadratureRule::integrate(std::span<const double> values) const {
    if (values.size() != nodes.size())
        throw std::invalid_argument("QuadratureRule::integrate: size mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) sum += weights[i] * values[i];
    return sum;
}

QuadratureRule gauss_legendre(int count, double a, double b) {
    if (count < 1) throw std::invalid_argument("gauss_legendre: count must be >= 1");
    if (!(b > a)) throw std::invalid_argument("gauss_legendre: need b > a");
    const auto& std_rule = standard_rule(count);
    QuadratureRule rule;
    rule.nodes.resize(count);
    rule.weights.resize(count);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int i = 0; i < count; ++i) {
        rule.nodes[i] = mid + half * std_rule.x[i];
        rule.weights[i] = half * std_rule.w[i];
    }
    return rule;
}

QuadratureRule composite_gauss(std::span<const double> breakpoints, int per_panel) {
    if (breakpoints.size() < 2)
        throw std::invalid_argument("composite_gauss: need at least two breakpoints");
    QuadratureRule rule;
    for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
        if (!(breakpoints[p + 1] > breakpoints[p]))
            throw std::invalid_argument("composite_gauss: breakpoints must increase");
        auto panel = gauss_legendre(per_panel, breakpoints[p], breakpoints[p + 1]);
        rule.nodes.insert(rule.nodes.end(), panel.nodes.begin(), panel.nodes.end());
        rule.weights.insert(rule.weights.end(), panel.weights.begin(), panel.weights.end());
    }
    return rule;
}

QuadratureRule clustered_gauss(std::span<const double> breakpoints, int per_panel) {
    auto base = composite_gauss(std::vector<double>{0.0, 1.0}, per_panel);
    QuadratureRule rule;
    for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
        const double a = breakpoints[p];
        const double b = breakpoints[p + 1];
        if (!(b > a)) throw std::invalid_argument("clustered_gauss: breakpoints must increase");
        for (std::size_t i = 0; i < base.size(); ++i) {
            const double u = base.nodes[i];
            rule.nodes.push_back(a + (b - a) * 0.5 * (1.0 - std::cos(std::numbers::pi * u)));
            rule.weights.push_back(base.weights[i] * (b - a) * 0.5 * std::numbers::pi *
                                   std::sin(std::numbers::pi * u));
        }
    }
    if (rule.nodes.empty()) throw std::invalid_argument("clustered_gauss: need at least two breakpoints");
    return rule;
}

double RadialGrid::r_max() const {
    if (upper > 0.0) return upper;
    return nodes.empty() ? 0.0 : nodes.back();
}

double RadialGrid::integrate(std::span<const double> values) const {
    if (values.size() != nodes.size())
        throw std::invalid_argument("RadialGrid::integrate: size mismatch");
    double sum = 0.0;
    if (measure_exponent == 0.0) {
        for (std::size_t i = 0; i < values.size(); ++i) sum += weights[i] * values[i];
    } else {
        for (std::size_t i = 0; i < values.size(); ++i)
            sum += weights[i] * values[i] * std::pow(nodes[i], measure_exponent);
    }
    return sum;
}

double RadialGrid::spacing() const {
    if (scheme != GridScheme::uniform || nodes.size() < 2)
        throw std::logic_error("RadialGrid::spacing: not a uniform grid");
    return nodes[1] - nodes[0];
}

void RadialGrid::validate() const {
    if (nodes.size() != weights.size())
        throw std::invalid_argument("RadialGrid: nodes/weights size mismatch");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!(nodes[i] > 0.0)) throw std::invalid_argument("RadialGrid: nodes must be positive");
        if (!(weights[i] > 0.0)) throw std::invalid_argument("RadialGrid: weights must be positive");
        if (i > 0 && !(nodes[i] > nodes[i - 1]))
            throw std::invalid_argument("RadialGrid: nodes must be strictly increasing");
    }
}

RadialGrid make_radial_grid(double r_max, int count, GridScheme scheme, double measure_exponent) {
    if (!(r_max > 0.0)) throw std::invalid_argument("make_radial_grid: R_max must be positive");
    if (count < 8)
        throw std::invalid_argument("make_radial_grid: count must be >= 8, got " +
                                    std::to_string(count));
    RadialGrid grid;
    grid.measure_exponent = measure_exponent;
    grid.scheme = scheme;
    grid.upper = r_max;
    if (scheme == GridScheme::gauss) {
        auto rule = gauss_legendre(count, 0.0, r_max);
        grid.nodes = std::move(rule.nodes);
        grid.weights = std::move(rule.weights);
    } else {
        const double h = r_max / count;
        grid.nodes.resize(count);
        grid.weights.assign(count, h);
        for (int i = 0; i < count; ++i) grid.nodes[i] = (i + 0.5) * h;
    }
    return grid;
}

RadialGrid make_panel_grid(std::span<const double> breakpoints, int per_panel,
                           double measure_exponent) {
    auto rule = composite_gauss(breakpoints, per_panel);
    RadialGrid grid;
    grid.nodes = std::move(rule.nodes);
    grid.weights = std::move(rule.weights);
    grid.measure_exponent = measure_exponent;
    grid.scheme = GridScheme::gauss;
    grid.upper = breakpoints.back();
    if (!grid.nodes.empty() && grid.nodes.front() <= 0.0)
        throw std::invalid_argument("make_panel_grid: radial grid must start at r >= 0");
    return grid;
}

}  // namespace heis
