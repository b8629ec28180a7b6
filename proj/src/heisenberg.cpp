#include "heis/heisenberg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "heis/laguerre.hpp"

namespace heis {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Weights of a radial grid with the grid's own measure exponent folded in.
std::vector<double> effective_weights(const RadialGrid& grid) {
    std::vector<double> w(grid.weights);
    if (grid.measure_exponent != 0.0)
        for (std::size_t i = 0; i < w.size(); ++i) w[i] *= std::pow(grid.nodes[i], grid.measure_exponent);
    return w;
}

bool same_nodes(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > 1e-12 * std::max(1.0, std::abs(a[i]))) return false;
    return true;
}

bool lambda_match(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

std::uint64_t checked_mul_div(std::uint64_t value, std::uint64_t mul, std::uint64_t div) {
    const unsigned __int128 wide = static_cast<unsigned __int128>(value) * mul / div;
    if (wide > std::numeric_limits<std::uint64_t>::max())
        throw std::overflow_error("binomial: result exceeds 64 bits");
    return static_cast<std::uint64_t>(wide);
}

}  // namespace

void HeisenbergRadialFunction::validate() const {
    if (n < 1) throw std::invalid_argument("HeisenbergRadialFunction: n must be >= 1");
    if (terms.empty()) throw std::invalid_argument("HeisenbergRadialFunction: no terms");
    for (const auto& term : terms) {
        term.u.grid.validate();
        if (term.u.values.size() != term.u.grid.size())
            throw std::invalid_argument("HeisenbergRadialFunction: radial samples do not match grid");
        if (term.v.values.size() != term.v.rule.size() || term.v.rule.size() == 0)
            throw std::invalid_argument("HeisenbergRadialFunction: central samples do not match rule");
        if (!same_nodes(term.u.grid.nodes, terms.front().u.grid.nodes))
            throw std::invalid_argument("HeisenbergRadialFunction: terms must share one radial grid");
        for (double x : term.u.values)
            if (!std::isfinite(x)) throw std::invalid_argument("HeisenbergRadialFunction: non-finite u");
        for (double x : term.v.values)
            if (!std::isfinite(x)) throw std::invalid_argument("HeisenbergRadialFunction: non-finite v");
    }
}

const RadialGrid& HeisenbergRadialFunction::radial_grid() const {
    if (terms.empty()) throw std::invalid_argument("HeisenbergRadialFunction: no terms");
    return terms.front().u.grid;
}

double sphere_area(int n) {
    if (n < 1) throw std::invalid_argument("sphere_area: n must be >= 1");
    return 2.0 * std::pow(kPi, n) / std::tgamma(static_cast<double>(n));
}

double HeisenbergRadialFunction::l2_norm_sq() const {
    validate();
    const auto w = effective_weights(radial_grid());
    const auto& nodes = radial_grid().nodes;
    double total = 0.0;
    for (const auto& a : terms) {
        for (const auto& b : terms) {
            if (!same_nodes(a.v.rule.nodes, b.v.rule.nodes))
                throw std::invalid_argument("l2_norm_sq: cross terms need a shared t rule");
            double radial = 0.0;
            for (std::size_t i = 0; i < nodes.size(); ++i)
                radial += w[i] * a.u.values[i] * b.u.values[i] * std::pow(nodes[i], 2 * n - 1);
            double central = 0.0;
            for (std::size_t i = 0; i < a.v.rule.size(); ++i)
                central += a.v.rule.weights[i] * a.v.values[i] * b.v.values[i];
            total += a.weight * b.weight * radial * central;
        }
    }
    return sphere_area(n) * total;
}

double HeisenbergRadialFunction::l1_norm() const {
    validate();
    if (terms.size() != 1) throw std::invalid_argument("l1_norm: single-term functions only");
    const auto& term = terms.front();
    const auto w = effective_weights(term.u.grid);
    double radial = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        radial += w[i] * std::abs(term.u.values[i]) * std::pow(term.u.grid.nodes[i], 2 * n - 1);
    double central = 0.0;
    for (std::size_t i = 0; i < term.v.rule.size(); ++i)
        central += term.v.rule.weights[i] * std::abs(term.v.values[i]);
    return std::abs(term.weight) * sphere_area(n) * radial * central;
}

cplx central_transform(const CentralProfile& v, double lambda) {
    if (v.values.size() != v.rule.size()) throw std::invalid_argument("central_transform: size mismatch");
    cplx acc{};
    for (std::size_t i = 0; i < v.rule.size(); ++i)
        acc += v.rule.weights[i] * v.values[i] * std::polar(1.0, lambda * v.rule.nodes[i]);
    return acc;
}

RadialProfile central_inverse_fourier(const HeisenbergRadialFunction& f, double lambda) {
    f.validate();
    RadialProfile out{f.radial_grid(), std::vector<double>(f.radial_grid().size(), 0.0)};
    for (const auto& term : f.terms) {
        const cplx vhat = central_transform(term.v, lambda);
        double scale = 0.0;
        for (std::size_t i = 0; i < term.v.rule.size(); ++i)
            scale += term.v.rule.weights[i] * std::abs(term.v.values[i]);
        if (std::abs(vhat.imag()) > 1e-10 * std::max(scale, 1e-300))
            throw std::invalid_argument("central_inverse_fourier: t-profile is not even");
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] += term.weight * term.u.values[i] * vhat.real();
    }
    return out;
}

std::vector<double> radial_coefficients(const RadialProfile& slice, double lambda, int k_max, int n) {
    if (lambda == 0.0) throw std::invalid_argument("radial coefficients: lambda = 0 is excluded");
    if (k_max < 0 || n < 1) throw std::invalid_argument("radial coefficients: need k_max >= 0, n >= 1");
    if (slice.values.size() != slice.grid.size())
        throw std::invalid_argument("radial coefficients: samples do not match grid");
    const auto w = effective_weights(slice.grid);
    const double scale = std::sqrt(std::abs(lambda));
    std::vector<double> out(k_max + 1, 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double r = slice.grid.nodes[i];
        const double weight = w[i] * slice.values[i] * std::pow(r, 2 * n - 1);
        if (weight == 0.0) continue;
        const auto p = psi_sequence(n - 1.0, scale * r, k_max);
        for (int k = 0; k <= k_max; ++k) out[k] += weight * p[k];
    }
    const double area = sphere_area(n);
    for (auto& x : out) x *= area;
    return out;
}

std::vector<double> radial_fourier_coefficients(const HeisenbergRadialFunction& f, double lambda,
                                                int k_max) {
    if (lambda == 0.0) throw std::invalid_argument("radial_fourier_coefficients: lambda = 0 is excluded");
    return radial_coefficients(central_inverse_fourier(f, lambda), lambda, k_max, f.n);
}

std::uint64_t binomial(int m, int j) {
    if (m < 0 || j < 0 || j > m) throw std::invalid_argument("binomial: need 0 <= j <= m");
    j = std::min(j, m - j);
    std::uint64_t value = 1;
    for (int i = 1; i <= j; ++i) value = checked_mul_div(value, static_cast<std::uint64_t>(m - j + i), i);
    return value;
}

std::uint64_t multiplicity(int k, int n) {
    if (k < 0 || n < 1) throw std::invalid_argument("multiplicity: need k >= 0, n >= 1");
    return binomial(k + n - 1, n - 1);
}

SpectralTable SpectralTable::zeros(int n, std::vector<double> lambdas, int k_max) {
    SpectralTable t;
    t.n = n;
    t.k_max = k_max;
    t.lambdas = std::move(lambdas);
    t.values.assign(t.lambdas.size() * static_cast<std::size_t>(k_max + 1), 0.0);
    t.validate();
    return t;
}

double SpectralTable::mu(std::size_t l, int k) const { return (2.0 * k + n) * std::abs(lambdas.at(l)); }

std::size_t SpectralTable::find_lambda(double lambda) const {
    for (std::size_t l = 0; l < lambdas.size(); ++l)
        if (lambda_match(lambdas[l], lambda)) return l;
    throw std::invalid_argument("SpectralTable: lambda not on the grid");
}

bool SpectralTable::same_grid(const SpectralTable& other) const {
    if (n != other.n || k_max != other.k_max || lambdas.size() != other.lambdas.size()) return false;
    for (std::size_t l = 0; l < lambdas.size(); ++l)
        if (!lambda_match(lambdas[l], other.lambdas[l])) return false;
    return true;
}

void SpectralTable::validate() const {
    if (n < 1 || k_max < 0) throw std::invalid_argument("SpectralTable: need n >= 1, k_max >= 0");
    for (double l : lambdas)
        if (l == 0.0 || !std::isfinite(l)) throw std::invalid_argument("SpectralTable: lambda must be finite and nonzero");
    if (values.size() != lambdas.size() * static_cast<std::size_t>(k_max + 1))
        throw std::invalid_argument("SpectralTable: value count inconsistent with grid");
}

SpectralTable build_spectral_table(const HeisenbergRadialFunction& f, const std::vector<double>& lambdas,
                                   int k_max) {
    auto table = SpectralTable::zeros(f.n, lambdas, k_max);
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
        const auto column = radial_fourier_coefficients(f, lambdas[l], k_max);
        std::copy(column.begin(), column.end(), table.values.begin() + table.index(l, 0));
    }
    return table;
}

double hs_norm_sq(const SpectralTable& table, double lambda) {
    const std::size_t l = table.find_lambda(lambda);
    double sum = 0.0;
    for (int k = 0; k <= table.k_max; ++k) {
        const double r = table.at(l, k);
        sum += static_cast<double>(multiplicity(k, table.n)) * r * r;
    }
    return sum;
}

SpectralTable convolve_radial(const SpectralTable& a, const SpectralTable& b) {
    if (!a.same_grid(b)) throw std::invalid_argument("convolve_radial: grid mismatch");
    SpectralTable out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a.values[i] * b.values[i];
    return out;
}

SpectralTable dilate_spectral(const SpectralTable& table, double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("dilate_spectral: r must be positive");
    table.validate();
    SpectralTable out = table;
    const double factor = std::pow(r, -(2.0 * table.n + 2.0));
    for (auto& l : out.lambdas) l *= r * r;
    for (auto& v : out.values) v *= factor;
    return out;
}

SpectralTable resample_lambda(const SpectralTable& table, const std::vector<double>& lambdas) {
    table.validate();
    auto out = SpectralTable::zeros(table.n, lambdas, table.k_max);
    for (std::size_t target = 0; target < lambdas.size(); ++target) {
        const double x = lambdas[target];
        std::vector<std::size_t> side;
        for (std::size_t l = 0; l < table.lambdas.size(); ++l)
            if ((table.lambdas[l] > 0.0) == (x > 0.0)) side.push_back(l);
        std::sort(side.begin(), side.end(),
                  [&](std::size_t a, std::size_t b) { return table.lambdas[a] < table.lambdas[b]; });
        auto exact = std::find_if(side.begin(), side.end(),
                                  [&](std::size_t l) { return lambda_match(table.lambdas[l], x); });
        if (exact != side.end()) {
            for (int k = 0; k <= table.k_max; ++k) out.at(target, k) = table.at(*exact, k);
            continue;
        }
        if (side.size() < 2 || x < table.lambdas[side.front()] || x > table.lambdas[side.back()])
            throw std::invalid_argument("resample_lambda: extrapolation beyond the lambda grid");
        std::size_t hi = 1;
        while (table.lambdas[side[hi]] < x) ++hi;
        const std::size_t width = std::min<std::size_t>(4, side.size());
        std::size_t first = hi >= 2 ? hi - 2 : 0;
        first = std::min(first, side.size() - width);
        for (std::size_t a = first; a < first + width; ++a) {
            double weight = 1.0;
            for (std::size_t b = first; b < first + width; ++b) {
                if (a == b) continue;
                weight *= (x - table.lambdas[side[b]]) / (table.lambdas[side[a]] - table.lambdas[side[b]]);
            }
            for (int k = 0; k <= table.k_max; ++k) out.at(target, k) += weight * table.at(side[a], k);
        }
    }
    return out;
}

void write_table_csv(const SpectralTable& table, const std::filesystem::path& path) {
    table.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "lambda,k,d,R\n" << std::setprecision(17);
    for (std::size_t l = 0; l < table.lambdas.size(); ++l)
        for (int k = 0; k <= table.k_max; ++k)
            out << table.lambdas[l] << ',' << k << ',' << multiplicity(k, table.n) << ','
                << table.at(l, k) << '\n';
}

SpectralTable read_table_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "lambda,k,d,R")
        throw std::runtime_error(path.string() + ": missing lambda,k,d,R header");
    std::vector<double> lambdas;
    std::vector<std::vector<double>> columns;
    int n = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        double lambda = 0.0, value = 0.0;
        long long k = 0;
        unsigned long long d = 0;
        char c1 = 0, c2 = 0, c3 = 0;
        if (!(row >> lambda >> c1 >> k >> c2 >> d >> c3 >> value) || c1 != ',' || c2 != ',' || c3 != ',')
            throw std::runtime_error(path.string() + ": malformed row: " + line);
        if (lambdas.empty() || !lambda_match(lambdas.back(), lambda)) {
            lambdas.push_back(lambda);
            columns.emplace_back();
        }
        if (k != static_cast<long long>(columns.back().size()))
            throw std::runtime_error(path.string() + ": k out of order");
        if (k == 1 && n == 0) {
            // d(1, n) = n
            n = static_cast<int>(d);
        }
        columns.back().push_back(value);
    }
    if (lambdas.empty()) throw std::runtime_error(path.string() + ": no rows");
    const int k_max = static_cast<int>(columns.front().size()) - 1;
    if (n == 0) n = 1;
    auto table = SpectralTable::zeros(n, lambdas, k_max);
    for (std::size_t l = 0; l < columns.size(); ++l) {
        if (columns[l].size() != static_cast<std::size_t>(k_max + 1))
            throw std::runtime_error(path.string() + ": ragged columns");
        std::copy(columns[l].begin(), columns[l].end(), table.values.begin() + table.index(l, 0));
    }
    return table;
}

void write_table_binary(const SpectralTable& table, const std::string& key, const std::filesystem::path& path) {
    table.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write("HST1", 4);
    const std::int64_t header[4] = {static_cast<std::int64_t>(key.size()), table.n, table.k_max,
                                    static_cast<std::int64_t>(table.lambdas.size())};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    out.write(key.data(), static_cast<std::streamsize>(key.size()));
    out.write(reinterpret_cast<const char*>(table.lambdas.data()),
              static_cast<std::streamsize>(table.lambdas.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(table.values.data()),
              static_cast<std::streamsize>(table.values.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

bool read_table_binary(const std::filesystem::path& path, const std::string& key, SpectralTable& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    char magic[4];
    std::int64_t header[4];
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in || std::memcmp(magic, "HST1", 4) != 0) return false;
    if (header[0] != static_cast<std::int64_t>(key.size()) || header[1] < 1 || header[2] < 0 || header[3] < 0 ||
        header[2] > (1 << 24) || header[3] > (1 << 24))
        return false;
    std::string stored(key.size(), '\0');
    in.read(stored.data(), static_cast<std::streamsize>(stored.size()));
    if (!in || stored != key) return false;
    SpectralTable t;
    t.n = static_cast<int>(header[1]);
    t.k_max = static_cast<int>(header[2]);
    t.lambdas.resize(static_cast<std::size_t>(header[3]));
    t.values.resize(t.lambdas.size() * static_cast<std::size_t>(t.k_max + 1));
    in.read(reinterpret_cast<char*>(t.lambdas.data()), static_cast<std::streamsize>(t.lambdas.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(t.values.data()), static_cast<std::streamsize>(t.values.size() * sizeof(double)));
    if (!in) return false;
    try {
        t.validate();
    } catch (const std::invalid_argument&) {
        return false;
    }
    out = std::move(t);
    return true;
}

QuadratureRule symmetric_lambda_rule(double lambda_max, int panels, int per_panel, double first_panel) {
    if (!(lambda_max > 0.0) || panels < 1 || !(first_panel > 0.0) || first_panel > lambda_max)
        throw std::invalid_argument("symmetric_lambda_rule: bad parameters");
    std::vector<double> breaks{0.0};
    if (panels == 1) {
        breaks.push_back(lambda_max);
    } else {
        for (int p = 0; p < panels; ++p)
            breaks.push_back(first_panel * std::pow(lambda_max / first_panel, static_cast<double>(p) / (panels - 1)));
    }
    const auto half = composite_gauss(breaks, per_panel);
    QuadratureRule rule;
    for (std::size_t i = half.size(); i-- > 0;) {
        rule.nodes.push_back(-half.nodes[i]);
        rule.weights.push_back(half.weights[i]);
    }
    rule.nodes.insert(rule.nodes.end(), half.nodes.begin(), half.nodes.end());
    rule.weights.insert(rule.weights.end(), half.weights.begin(), half.weights.end());
    return rule;
}

PlancherelReport plancherel_check(const HeisenbergRadialFunction& f, const QuadratureRule& lambda_rule,
                                  int k_max, double tolerance) {
    PlancherelReport report;
    report.spatial = f.l2_norm_sq();
    double lambda_top = 0.0;
    report.smallest_lambda = std::numeric_limits<double>::infinity();
    for (double l : lambda_rule.nodes) {
        if (l == 0.0) throw std::invalid_argument("plancherel_check: lambda = 0 node");
        lambda_top = std::max(lambda_top, std::abs(l));
        report.smallest_lambda = std::min(report.smallest_lambda, std::abs(l));
    }
    // Missing k-tail per column, extrapolated from the decay between the last two
    // blocks of 5% of the k range.
    const int block = std::max(1, (k_max + 1) / 20);
    double total = 0.0, k_tail = 0.0, edge = 0.0;
    for (std::size_t i = 0; i < lambda_rule.size(); ++i) {
        const double lambda = lambda_rule.nodes[i];
        const auto column = radial_fourier_coefficients(f, lambda, k_max);
        const double measure = lambda_rule.weights[i] * std::pow(std::abs(lambda), f.n);
        double hs = 0.0, m1 = 0.0, m2 = 0.0;
        for (int k = 0; k <= k_max; ++k) {
            const double term = static_cast<double>(multiplicity(k, f.n)) * column[k] * column[k];
            hs += term;
            if (k > k_max - block) m2 += term;
            else if (k > k_max - 2 * block) m1 += term;
        }
        double tail = 0.0;
        if (m2 > 0.0) tail = (m1 > m2) ? m2 * m2 / (m1 - m2) : m2 * (k_max + 1.0) / block;
        total += measure * hs;
        k_tail += measure * tail;
        if (std::abs(lambda) >= 0.8 * lambda_top) edge += measure * hs;
    }
    const double constant = std::pow(2.0 * kPi, -(f.n + 1.0));
    report.spectral = constant * total;
    report.relative = std::abs(report.spectral - report.spatial) / report.spatial;
    report.k_tail_fraction = total > 0.0 ? k_tail / total : 0.0;
    report.lambda_edge_fraction = total > 0.0 ? edge / total : 0.0;
    report.truncation_dominated =
        report.relative > tolerance || report.k_tail_fraction > tolerance || report.lambda_edge_fraction > tolerance;
    return report;
}

WeylPlancherelReport weyl_plancherel_check(const RadialProfile& g, double lambda, int k_max, int n) {
    WeylPlancherelReport report;
    const auto w = effective_weights(g.grid);
    double norm = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        norm += w[i] * g.values[i] * g.values[i] * std::pow(g.grid.nodes[i], 2 * n - 1);
    report.spatial = std::pow(2.0 * kPi, n) * sphere_area(n) * norm;
    const auto column = radial_coefficients(g, lambda, k_max, n);
    double hs = 0.0;
    for (int k = 0; k <= k_max; ++k) hs += static_cast<double>(multiplicity(k, n)) * column[k] * column[k];
    report.spectral = std::pow(std::abs(lambda), n) * hs;
    report.relative = std::abs(report.spectral - report.spatial) / report.spatial;
    return report;
}

HeisPoint group_multiply(const HeisPoint& a, const HeisPoint& b) {
    if (a.z.size() != b.z.size()) throw std::invalid_argument("group_multiply: dimension mismatch");
    HeisPoint out;
    out.z.resize(a.z.size());
    double symplectic = 0.0;
    for (std::size_t j = 0; j < a.z.size(); ++j) {
        out.z[j] = a.z[j] + b.z[j];
        symplectic += (a.z[j] * std::conj(b.z[j])).imag();
    }
    out.t = a.t + b.t + 0.5 * symplectic;
    return out;
}

HeisPoint group_inverse(const HeisPoint& a) {
    HeisPoint out{a.z, -a.t};
    for (auto& z : out.z) z = -z;
    return out;
}

double koranyi_norm(const HeisPoint& x) {
    double r2 = 0.0;
    for (const auto& z : x.z) r2 += std::norm(z);
    return std::pow(r2 * r2 + x.t * x.t, 0.25);
}

double koranyi_norm(cplx z, double t) { return koranyi_norm(HeisPoint{{z}, t}); }

bool KoranyiBall::contains(const HeisPoint& x) const {
    if (!(radius > 0.0)) throw std::invalid_argument("KoranyiBall: radius must be positive");
    return koranyi_norm(group_multiply(group_inverse(center), x)) < radius;
}

double BlockSpec::disc_radius() const {
    const double shape = a > 0.0 ? a : 1.0 / std::sqrt(kPi);
    return shape * rho;
}

double BlockSpec::support_radius() const {
    const double R = disc_radius();
    const double half = 0.5 * tau * tau;
    return std::pow(R * R * R * R + half * half, 0.25);
}

double BlockSpec::radius_bound() const { return disc_radius() + std::pow(0.25, 0.25) * tau; }

double RadialTSample::l1_norm() const {
    const auto w = effective_weights(r);
    double total = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        double line = 0.0;
        for (std::size_t j = 0; j < cells(); ++j) line += std::abs(at(i, j)) * (t_edges[j + 1] - t_edges[j]);
        total += w[i] * 2.0 * kPi * r.nodes[i] * line;
    }
    return total;
}

double RadialTSample::integral() const {
    const auto w = effective_weights(r);
    double total = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        double line = 0.0;
        for (std::size_t j = 0; j < cells(); ++j) line += at(i, j) * (t_edges[j + 1] - t_edges[j]);
        total += w[i] * 2.0 * kPi * r.nodes[i] * line;
    }
    return total;
}

double RadialTSample::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

namespace {

void guard_axis(std::size_t count, int max_axis, const char* what) {
    if (count > static_cast<std::size_t>(max_axis))
        throw std::invalid_argument(std::string("group convolution: ") + what + " exceeds the grid budget");
}

void validate_block(const BlockSpec& b) {
    if (!(b.rho > 0.0) || !(b.tau > 0.0) || b.a < 0.0) throw std::invalid_argument("BlockSpec: bad parameters");
}

// Output radial nodes on [0, r_max], clustered at every panel end.
RadialGrid output_radial_grid(double r_max, double kink, const DirectConvolutionOptions& options) {
    std::vector<double> breaks;
    for (int p = 0; p <= options.r_panels; ++p) breaks.push_back(r_max * p / options.r_panels);
    if (kink > 1e-9 * r_max && kink < r_max * (1.0 - 1e-9)) breaks.push_back(kink);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [&](double x, double y) { return std::abs(x - y) < 1e-9 * r_max; }),
                 breaks.end());
    const auto rule = clustered_gauss(breaks, options.r_per_panel);
    RadialGrid grid;
    grid.nodes = rule.nodes;
    grid.weights = rule.weights;
    grid.scheme = GridScheme::gauss;
    grid.upper = r_max;
    return grid;
}

std::vector<double> uniform_edges(double half, int cells) {
    std::vector<double> edges(cells + 1);
    for (int j = 0; j <= cells; ++j) edges[j] = -half + 2.0 * half * j / cells;
    return edges;
}

// G(u) = int_0^u clamp(v, 0, 2A) dv
struct RampIntegral {
    double A;

    // Coefficients (p0, p1, p2) of G on the piece containing u.
    std::array<double, 3> piece(double u) const {
        if (u <= 0.0) return {0.0, 0.0, 0.0};
        if (u <= 2.0 * A) return {0.0, 0.0, 0.5};
        return {-2.0 * A * A, 2.0 * A, 0.0};
    }
    double operator()(double u) const {
        const auto p = piece(u);
        return p[0] + p[1] * u + p[2] * u * u;
    }
};

// int_{-theta0}^{theta0} G(alpha + c sin(theta)) d theta, piecewise in closed form.
double angular_ramp_integral(const RampIntegral& G, double alpha, double c, double theta0) {
    if (theta0 <= 0.0) return 0.0;
    if (c == 0.0) return 2.0 * theta0 * G(alpha);
    std::array<double, 8> cuts{};
    std::size_t count = 0;
    cuts[count++] = -theta0;
    for (double kappa : {0.0, 2.0 * G.A}) {
        const double y = (kappa - alpha) / c;
        if (std::abs(y) >= 1.0) continue;
        const double as = std::asin(y);
        for (double th : {as, kPi - as, -kPi - as})
            if (th > -theta0 && th < theta0) cuts[count++] = th;
    }
    cuts[count++] = theta0;
    std::sort(cuts.begin(), cuts.begin() + count);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < count; ++i) {
        const double a = cuts[i];
        const double b = cuts[i + 1];
        if (b <= a) continue;
        const auto p = G.piece(alpha + c * std::sin(0.5 * (a + b)));
        if (p[0] == 0.0 && p[1] == 0.0 && p[2] == 0.0) continue;
        const double d = b - a;
        const double s1 = std::cos(a) - std::cos(b);
        const double s2 = 0.5 * d - 0.25 * (std::sin(2.0 * b) - std::sin(2.0 * a));
        total += p[0] * d + p[1] * (alpha * d + c * s1) + p[2] * (alpha * alpha * d + 2.0 * alpha * c * s1 + c * c * s2);
    }
    return total;
}

// Half-opening of the arc {|w| = s, |r - w| < R}.
double arc_half_angle(double r, double s, double R) {
    if (s + r <= R) return kPi;
    if (std::abs(r - s) >= R) return 0.0;
    const double c = (r * r + s * s - R * R) / (2.0 * r * s);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

// Antiderivatives in t of a cell-average profile: P = int H, PP = int P.
struct CellPrimitive {
    const std::vector<double>* edges = nullptr;
    std::vector<double> avg, P, PP;

    double operator()(double x) const {
        const auto& e = *edges;
        if (x <= e.front()) return 0.0;
        if (x >= e.back()) return PP.back() + P.back() * (x - e.back());
        const double h = e[1] - e[0];
        std::size_t m = static_cast<std::size_t>((x - e.front()) / h);
        m = std::min(m, avg.size() - 1);
        const double d = x - e[m];
        return PP[m] + P[m] * d + 0.5 * avg[m] * d * d;
    }
};

}  // namespace

RadialTSample sample_block(const BlockSpec& block, const DirectConvolutionOptions& options) {
    validate_block(block);
    RadialTSample out;
    out.r = output_radial_grid(block.disc_radius(), 0.0, options);
    out.t_edges = uniform_edges(0.5 * block.tau * block.tau, options.t_cells);
    guard_axis(out.r.size(), options.max_axis, "radial axis");
    guard_axis(out.cells(), options.max_axis, "t axis");
    out.values.assign(out.r.size() * out.cells(), block.height());
    return out;
}

RadialTSample group_convolve_blocks(const BlockSpec& f1, const BlockSpec& f2, const DirectConvolutionOptions& options) {
    validate_block(f1);
    validate_block(f2);
    const double R1 = f1.disc_radius();
    const double R2 = f2.disc_radius();
    const double A = 0.5 * f1.tau * f1.tau;
    const double B = 0.5 * f2.tau * f2.tau;
    const double h12 = 1.0 / (f1.tau * f1.tau * f2.tau * f2.tau);
    const double heights = 1.0 / (f1.rho * f1.rho * f2.rho * f2.rho);

    RadialTSample out;
    out.r = output_radial_grid(R1 + R2, std::abs(R1 - R2), options);
    out.t_edges = uniform_edges(A + B + 0.5 * (R1 + R2) * R2, options.t_cells);
    guard_axis(out.r.size(), options.max_axis, "radial axis");
    guard_axis(out.cells(), options.max_axis, "t axis");
    guard_axis(3 * static_cast<std::size_t>(options.s_per_panel), options.max_axis, "inner radial axis");
    out.values.assign(out.r.size() * out.cells(), 0.0);

    const RampIntegral G{A};
    // Q(x) = h12 [G(x + A + B) - G(x + A - B)], the primitive of the t-convolution of the boxes.
    auto angular_Q = [&](double x, double c, double theta0) {
        return h12 * (angular_ramp_integral(G, x + A + B, c, theta0) - angular_ramp_integral(G, x + A - B, c, theta0));
    };

    std::vector<double> primitive(out.t_edges.size());
    for (std::size_t i = 0; i < out.r.size(); ++i) {
        const double r = out.r.nodes[i];
        const double lo = std::max(0.0, r - R1);
        const double hi = std::min(R2, r + R1);
        if (hi <= lo) continue;
        std::vector<double> breaks{lo, hi};
        if (R1 - r > lo && R1 - r < hi) breaks.insert(breaks.begin() + 1, R1 - r);
        const auto s_rule = clustered_gauss(breaks, options.s_per_panel);
        std::fill(primitive.begin(), primitive.end(), 0.0);
        for (std::size_t q = 0; q < s_rule.size(); ++q) {
            const double s = s_rule.nodes[q];
            const double theta0 = r == 0.0 ? (s < R1 ? kPi : 0.0) : arc_half_angle(r, s, R1);
            if (theta0 <= 0.0) continue;
            const double c = 0.5 * r * s;
            const double weight = s_rule.weights[q] * s;
            for (std::size_t e = 0; e < out.t_edges.size(); ++e)
                primitive[e] += weight * angular_Q(out.t_edges[e], c, theta0);
        }
        for (std::size_t j = 0; j < out.cells(); ++j) {
            const double dt = out.t_edges[j + 1] - out.t_edges[j];
            out.values[i * out.cells() + j] = heights * (primitive[j + 1] - primitive[j]) / dt;
        }
    }
    return out;
}

RadialTSample group_convolve_sampled(const RadialTSample& h, const BlockSpec& f3, const DirectConvolutionOptions& options) {
    validate_block(f3);
    if (h.t_edges.size() < 2 || h.values.size() != h.r.size() * h.cells())
        throw std::invalid_argument("group_convolve_sampled: malformed sample");
    const double dt = h.t_edges[1] - h.t_edges[0];
    for (std::size_t j = 1; j < h.t_edges.size(); ++j)
        if (std::abs(h.t_edges[j] - h.t_edges[j - 1] - dt) > 1e-9 * dt)
            throw std::invalid_argument("group_convolve_sampled: t cells must be uniform");
    const double R3 = f3.disc_radius();
    const double C = 0.5 * f3.tau * f3.tau;
    const double h3 = 1.0 / (f3.tau * f3.tau);
    const double H3 = 1.0 / (f3.rho * f3.rho);
    const double rh = h.r.r_max();
    const double t_half = std::max(std::abs(h.t_edges.front()), std::abs(h.t_edges.back()));

    RadialTSample out;
    out.r = output_radial_grid(rh + R3, std::abs(rh - R3), options);
    out.t_edges = uniform_edges(t_half + C + 0.5 * (rh + R3) * R3, options.t_cells);
    guard_axis(out.r.size(), options.max_axis, "radial axis");
    guard_axis(out.cells(), options.max_axis, "t axis");
    guard_axis(static_cast<std::size_t>(options.s_per_panel), options.max_axis, "inner radial axis");
    guard_axis(static_cast<std::size_t>(options.angles), options.max_axis, "inner angular axis");
    out.values.assign(out.r.size() * out.cells(), 0.0);

    std::vector<CellPrimitive> prim(h.r.size());
    for (std::size_t i = 0; i < h.r.size(); ++i) {
        auto& p = prim[i];
        p.edges = &h.t_edges;
        p.avg.assign(h.values.begin() + i * h.cells(), h.values.begin() + (i + 1) * h.cells());
        p.P.assign(h.t_edges.size(), 0.0);
        p.PP.assign(h.t_edges.size(), 0.0);
        for (std::size_t j = 0; j < h.cells(); ++j) {
            const double d = h.t_edges[j + 1] - h.t_edges[j];
            p.P[j + 1] = p.P[j] + p.avg[j] * d;
            p.PP[j + 1] = p.PP[j] + p.P[j] * d + 0.5 * p.avg[j] * d * d;
        }
    }

    // Double primitive of H at radius rr, linear in r between nodes and tapering to zero at the edge.
    auto lookup = [&](double rr, double x) {
        const auto& nodes = h.r.nodes;
        if (rr >= rh) return 0.0;
        if (rr <= nodes.front()) return prim.front()(x);
        if (rr >= nodes.back()) {
            const double frac = (rh - rr) / (rh - nodes.back());
            return frac * prim.back()(x);
        }
        const std::size_t hi = static_cast<std::size_t>(std::upper_bound(nodes.begin(), nodes.end(), rr) - nodes.begin());
        const double frac = (rr - nodes[hi - 1]) / (nodes[hi] - nodes[hi - 1]);
        return (1.0 - frac) * prim[hi - 1](x) + frac * prim[hi](x);
    };

    const auto s_rule = gauss_legendre(options.s_per_panel, 0.0, R3);
    const double dtheta = 2.0 * kPi / options.angles;
    std::vector<double> primitive(out.t_edges.size());
    for (std::size_t i = 0; i < out.r.size(); ++i) {
        const double r = out.r.nodes[i];
        std::fill(primitive.begin(), primitive.end(), 0.0);
        for (std::size_t q = 0; q < s_rule.size(); ++q) {
            const double s = s_rule.nodes[q];
            for (int a = 0; a < options.angles; ++a) {
                const double theta = (a + 0.5) * dtheta;
                const double wx = s * std::cos(theta);
                const double wy = s * std::sin(theta);
                const double dist = std::hypot(r - wx, wy);
                if (dist >= rh) continue;
                const double c = 0.5 * r * wy;
                const double weight = s_rule.weights[q] * s * dtheta;
                for (std::size_t e = 0; e < out.t_edges.size(); ++e) {
                    const double x = out.t_edges[e] + c;
                    primitive[e] += weight * (lookup(dist, x + C) - lookup(dist, x - C));
                }
            }
        }
        for (std::size_t j = 0; j < out.cells(); ++j) {
            const double dt = out.t_edges[j + 1] - out.t_edges[j];
            out.values[i * out.cells() + j] = H3 * h3 * (primitive[j + 1] - primitive[j]) / dt;
        }
    }
    return out;
}

std::vector<double> sampled_coefficients(const RadialTSample& h, double lambda, int k_max) {
    if (lambda == 0.0) throw std::invalid_argument("sampled_coefficients: lambda = 0 is excluded");
    RadialProfile slice{h.r, std::vector<double>(h.r.size(), 0.0)};
    std::vector<double> kernel(h.cells());
    for (std::size_t j = 0; j < h.cells(); ++j)
        kernel[j] = (std::sin(lambda * h.t_edges[j + 1]) - std::sin(lambda * h.t_edges[j])) / lambda;
    for (std::size_t i = 0; i < h.r.size(); ++i)
        for (std::size_t j = 0; j < h.cells(); ++j) slice.values[i] += h.at(i, j) * kernel[j];
    return radial_coefficients(slice, lambda, k_max, 1);
}

double mass_outside_ball(const RadialTSample& h, double radius) {
    const auto w = effective_weights(h.r);
    const double R4 = std::pow(radius, 4);
    double outside = 0.0, total = 0.0;
    for (std::size_t i = 0; i < h.r.size(); ++i) {
        const double r = h.r.nodes[i];
        for (std::size_t j = 0; j < h.cells(); ++j) {
            const double a = h.t_edges[j], b = h.t_edges[j + 1];
            const double t_min = (a <= 0.0 && b >= 0.0) ? 0.0 : std::min(std::abs(a), std::abs(b));
            const double mass = w[i] * 2.0 * kPi * r * std::abs(h.at(i, j)) * (b - a);
            total += mass;
            if (r * r * r * r + t_min * t_min >= R4) outside += mass;
        }
    }
    return total > 0.0 ? outside / total : 0.0;
}

cplx group_convolve_point(const GroupFunction& f, const GroupFunction& g, cplx z, double t, const GroupBox& box) {
    if (!(box.z_half > 0.0) || !(box.t_half > 0.0) || box.nz < 2 || box.nt < 2)
        throw std::invalid_argument("group_convolve_point: bad box");
    if (static_cast<std::size_t>(box.nz) * box.nz * box.nt > box.budget)
        throw std::invalid_argument("group_convolve_point: grid exceeds the budget");
    const auto zr = gauss_legendre(box.nz, -box.z_half, box.z_half);
    const auto tr = gauss_legendre(box.nt, -box.t_half, box.t_half);
    cplx acc{};
    for (int a = 0; a < box.nz; ++a) {
        for (int b = 0; b < box.nz; ++b) {
            const cplx w{zr.nodes[a], zr.nodes[b]};
            const double wab = zr.weights[a] * zr.weights[b];
            // x y^{-1} = (z - w, t - s - Im(z conj w) / 2)
            const double shift = t - 0.5 * (z * std::conj(w)).imag();
            for (int c = 0; c < box.nt; ++c) {
                const double s = tr.nodes[c];
                const cplx gv = g(w, s);
                if (gv == cplx{}) continue;
                acc += wab * tr.weights[c] * f(z - w, shift - s) * gv;
            }
        }
    }
    return acc;
}

}  // namespace heis
