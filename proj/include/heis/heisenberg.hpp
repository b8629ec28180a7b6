#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "heis/quadrature.hpp"

namespace heis {

/// A function of the central variable t sampled on its own quadrature rule.
struct CentralProfile {
    QuadratureRule rule;
    std::vector<double> values;

    double integrate() const { return rule.integrate(values); }
};

template <class F>
CentralProfile sample_central(const QuadratureRule& rule, F&& f) {
    CentralProfile out{rule, {}};
    out.values.reserve(rule.size());
    for (double t : rule.nodes) out.values.push_back(f(t));
    return out;
}

/// u(|z|) v(t) with u sampled on a radial grid (measure dr, no Jacobian folded in).
struct SeparableTerm {
    RadialProfile u;
    CentralProfile v;
    double weight = 1.0;
};

/// Finite sum of separable terms on H^n. All terms must share one radial grid.
struct HeisenbergRadialFunction {
    int n = 1;
    std::vector<SeparableTerm> terms;

    void validate() const;
    const RadialGrid& radial_grid() const;
    /// int |f|^2 dz dt
    double l2_norm_sq() const;
    /// int |f| dz dt, single-term functions only
    double l1_norm() const;
};

/// Surface area of the unit sphere in C^n = R^{2n}: 2 pi^n / Gamma(n).
double sphere_area(int n);

/// v^(lambda) = int e^{i lambda t} v(t) dt by quadrature.
std::complex<double> central_transform(const CentralProfile& v, double lambda);

/// f^lambda(r) = sum_terms weight u(r) v^(lambda). Throws if the result has a
/// non-negligible imaginary part (tables store real coefficients).
RadialProfile central_inverse_fourier(const HeisenbergRadialFunction& f, double lambda);

/// R_k(lambda, f) = (2 pi^n / Gamma(n)) int f^lambda(r) psi_k^{n-1}(sqrt|lambda| r) r^{2n-1} dr
/// for k = 0..k_max, given the radial slice f^lambda on its grid.
std::vector<double> radial_coefficients(const RadialProfile& slice, double lambda, int k_max, int n);

/// Coefficient column of f at lambda.
std::vector<double> radial_fourier_coefficients(const HeisenbergRadialFunction& f, double lambda,
                                                int k_max);

/// d(k, n) = binom(k + n - 1, n - 1), exact; throws on 64-bit overflow.
std::uint64_t multiplicity(int k, int n);

/// binom(m, j) exactly; throws on 64-bit overflow.
std::uint64_t binomial(int m, int j);

/// Coefficients R_k(lambda) on a (lambda, k) grid, row-major by lambda.
struct SpectralTable {
    int n = 1;
    int k_max = 0;
    std::vector<double> lambdas;
    std::vector<double> values;  ///< values[l * (k_max + 1) + k]

    static SpectralTable zeros(int n, std::vector<double> lambdas, int k_max);

    std::size_t index(std::size_t l, int k) const { return l * (k_max + 1) + k; }
    double& at(std::size_t l, int k) { return values[index(l, k)]; }
    double at(std::size_t l, int k) const { return values[index(l, k)]; }
    /// (2k + n)|lambda_l|
    double mu(std::size_t l, int k) const;
    /// Position of lambda in the grid, matched to 1e-12 relative; throws if absent.
    std::size_t find_lambda(double lambda) const;
    bool same_grid(const SpectralTable& other) const;
    void validate() const;
};

/// Builds a table column by column from radial_fourier_coefficients.
SpectralTable build_spectral_table(const HeisenbergRadialFunction& f,
                                   const std::vector<double>& lambdas, int k_max);

/// sum_k d(k, n) |R_k(lambda)|^2
double hs_norm_sq(const SpectralTable& table, double lambda);

/// Pointwise product of two tables on identical grids.
SpectralTable convolve_radial(const SpectralTable& a, const SpectralTable& b);

/// Table of delta_r F(z, t) = F(r z, r^2 t): R_k(r^2 lambda) <- r^{-(2n+2)} R_k(lambda).
/// The lambda grid is re-indexed exactly (each node scaled by r^2).
SpectralTable dilate_spectral(const SpectralTable& table, double r);

/// Interpolates each column k onto new lambda nodes (four-point Lagrange in lambda,
/// separately on each sign). Nodes outside the covered range are rejected.
SpectralTable resample_lambda(const SpectralTable& table, const std::vector<double>& lambdas);

/// CSV with header lambda,k,d,R.
void write_table_csv(const SpectralTable& table, const std::filesystem::path& path);
SpectralTable read_table_csv(const std::filesystem::path& path);
/// Compact binary cache; `key` is stored in the header and checked on read.
void write_table_binary(const SpectralTable& table, const std::string& key,
                        const std::filesystem::path& path);
/// Returns false if the file is absent, unreadable or carries a different key.
bool read_table_binary(const std::filesystem::path& path, const std::string& key, SpectralTable& out);

/// Symmetric lambda quadrature: composite Gauss on [0, lambda_max] and its mirror image,
/// the first panel [0, first_panel] followed by geometrically growing panels. No node is at 0.
QuadratureRule symmetric_lambda_rule(double lambda_max, int panels, int per_panel,
                                     double first_panel);

struct PlancherelReport {
    double spatial = 0.0;    ///< int |f|^2
    double spectral = 0.0;   ///< (2 pi)^{-(n+1)} int HS^2 |lambda|^n dlambda
    double relative = 0.0;
    double smallest_lambda = 0.0;
    double k_tail_fraction = 0.0;     ///< extrapolated share of the HS sums lying beyond k_max
    double lambda_edge_fraction = 0.0;  ///< share carried by |lambda| in the outer panel
    bool truncation_dominated = false;
};

PlancherelReport plancherel_check(const HeisenbergRadialFunction& f, const QuadratureRule& lambda_rule,
                                  int k_max, double tolerance = 1e-3);

struct WeylPlancherelReport {
    double spatial = 0.0;   ///< (2 pi)^n ||g||^2
    double spectral = 0.0;  ///< |lambda|^n sum_k d(k, n) |R_k|^2
    double relative = 0.0;
};

WeylPlancherelReport weyl_plancherel_check(const RadialProfile& g, double lambda, int k_max, int n);

/// Point (z, t) of H^n.
struct HeisPoint {
    std::vector<std::complex<double>> z;
    double t = 0.0;
};

/// (z, t)(w, s) = (z + w, t + s + Im(z . conj w) / 2)
HeisPoint group_multiply(const HeisPoint& a, const HeisPoint& b);
HeisPoint group_inverse(const HeisPoint& a);
/// (|z|^4 + t^2)^{1/4}
double koranyi_norm(const HeisPoint& x);
double koranyi_norm(std::complex<double> z, double t);

struct KoranyiBall {
    HeisPoint center;
    double radius = 1.0;

    /// |center^{-1} x| < radius
    bool contains(const HeisPoint& x) const;
};

/// Indicator block F(z, t) = rho^{-2} 1{|z| < a rho} tau^{-2} 1{|t| < tau^2/2} on H^1.
struct BlockSpec {
    double rho = 1.0;
    double tau = 1.0;
    double a = 0.0;  ///< 0 selects 1/sqrt(pi), giving unit mass

    double disc_radius() const;
    /// Koranyi radius of the support, (R^4 + tau^4/4)^{1/4} with R the disc radius.
    double support_radius() const;
    /// a rho + (1/4)^{1/4} tau, an upper bound for support_radius.
    double radius_bound() const;
    double height() const { return 1.0 / (rho * rho * tau * tau); }
};

/// A z-radial function on H^1 stored as t-cell averages at radial quadrature nodes:
/// values[i * cells + j] is the mean over [t_edges[j], t_edges[j+1]] at r = r.nodes[i].
struct RadialTSample {
    RadialGrid r;
    std::vector<double> t_edges;
    std::vector<double> values;

    std::size_t cells() const { return t_edges.size() - 1; }
    double at(std::size_t i, std::size_t j) const { return values[i * cells() + j]; }
    /// int |F| dz dt
    double l1_norm() const;
    /// int F dz dt
    double integral() const;
    double max_abs() const;
};

struct DirectConvolutionOptions {
    int r_panels = 12;
    int r_per_panel = 12;
    int t_cells = 160;
    int s_per_panel = 24;  ///< radial nodes per panel of the inner w-integral
    int angles = 96;       ///< angular nodes of the inner w-integral (sampled kernels only)
    int max_axis = 160;    ///< memory guard: node count allowed along any one axis
};

/// Cell-average samples of a single block on the oracle's grid layout.
RadialTSample sample_block(const BlockSpec& block, const DirectConvolutionOptions& options = {});

/// Direct quadrature of F1 * F2 for two indicator blocks, sampled on an (r, t) grid
/// covering the support. The t-convolution of the two boxes is exact; the w-integral
/// is done in polar coordinates with the angular part in closed form.
RadialTSample group_convolve_blocks(const BlockSpec& f1, const BlockSpec& f2,
                                    const DirectConvolutionOptions& options = {});

/// Direct quadrature of H * F3 for a sampled z-radial H (exact in t for the cell
/// representation, linear in r between nodes) and an indicator block F3.
RadialTSample group_convolve_sampled(const RadialTSample& h, const BlockSpec& f3,
                                     const DirectConvolutionOptions& options = {});

/// R_k(lambda) of a sampled z-radial function: t-transform by quadrature, then radial coefficients.
std::vector<double> sampled_coefficients(const RadialTSample& h, double lambda, int k_max);

/// Fraction of int |F| lying outside the Koranyi ball B(0, radius).
double mass_outside_ball(const RadialTSample& h, double radius);

using GroupFunction = std::function<std::complex<double>(std::complex<double>, double)>;

/// Product Gauss box [-Z, Z]^2 x [-T, T] used as the integration domain of y.
struct GroupBox {
    double z_half = 1.0;
    double t_half = 1.0;
    int nz = 32;
    int nt = 32;
    std::size_t budget = 160ull * 160ull * 160ull;
};

/// (f * g)(x) = int f(x y^{-1}) g(y) dy on H^1 by product Gauss quadrature over the box,
/// which must contain the support of g.
std::complex<double> group_convolve_point(const GroupFunction& f, const GroupFunction& g,
                                          std::complex<double> z, double t, const GroupBox& box);

}  // namespace heis
