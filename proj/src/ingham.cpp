#include "heis/ingham.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "heis/laguerre.hpp"

namespace heis {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;
constexpr double kInf = std::numeric_limits<double>::infinity();

// int_{t0}^{t1} Theta(t)/t dt in the variable u = log t.
double log_integral(const ThetaFunction& theta, double t0, double t1) {
    const double u0 = std::log(t0);
    const double u1 = std::log(t1);
    if (!(u1 > u0)) return 0.0;
    const int panels = std::max(4, static_cast<int>(std::ceil(2.0 * (u1 - u0))));
    std::vector<double> breaks(panels + 1);
    for (int p = 0; p <= panels; ++p) breaks[p] = u0 + (u1 - u0) * p / panels;
    const auto rule = composite_gauss(breaks, 16);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * theta(std::exp(rule.nodes[i]));
    return sum;
}

}  // namespace

const char* to_string(IntegralClass c) {
    switch (c) {
        case IntegralClass::convergent: return "convergent";
        case IntegralClass::divergent: return "divergent";
        default: return "unknown";
    }
}

ThetaFunction theta_inv_sqrt() {
    return {"inv_sqrt", [](double t) { return 1.0 / std::sqrt(1.0 + t); }, IntegralClass::convergent};
}

ThetaFunction theta_inv_log() {
    return {"inv_log", [](double t) { return 1.0 / std::log(kE + t); }, IntegralClass::divergent};
}

ThetaFunction theta_zero() {
    return {"zero", [](double) { return 0.0; }, IntegralClass::convergent};
}

ThetaFunction theta_preset(const std::string& name) {
    if (name == "inv_sqrt") return theta_inv_sqrt();
    if (name == "inv_log") return theta_inv_log();
    if (name == "zero") return theta_zero();
    throw std::invalid_argument("unknown theta preset: " + name);
}

ThetaFunction theta_scaled(const ThetaFunction& theta, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("theta_scaled: eps must be positive");
    auto base = theta.eval;
    return {theta.label + "@eps=" + std::to_string(eps), [base, eps](double y) { return eps * base(eps * y); },
            theta.integral_class};
}

ThetaClassification classify_theta(const ThetaFunction& theta, double T_max) {
    if (!(T_max >= 1e3)) throw std::invalid_argument("classify_theta: T_max must be >= 1e3");
    ThetaClassification out;
    double previous = theta(0.0);
    if (!(previous >= 0.0)) out.monotone = false;
    const double u_max = std::log(T_max);
    for (int i = 0; i <= 400; ++i) {
        const double value = theta(std::exp(-4.0 + (u_max + 4.0) * i / 400.0));
        if (!(value >= 0.0) || value > previous * (1.0 + 1e-12) + 1e-300) out.monotone = false;
        previous = value;
    }
    out.integral = log_integral(theta, 1.0, T_max);

    const double u2 = u_max;
    const double u1 = 0.5 * u_max;
    const double th2 = theta(std::exp(u2));
    const double th1 = theta(std::exp(u1));
    if (th2 <= 0.0) {
        out.log_exponent = kInf;
        out.tail_estimate = 0.0;
    } else {
        out.log_exponent = std::log(th1 / th2) / std::log(u2 / u1);
        out.tail_estimate = out.log_exponent > 1.0 ? th2 * u2 / (out.log_exponent - 1.0) : kInf;
    }
    if (out.log_exponent > 1.5) out.numeric_class = IntegralClass::convergent;
    else if (out.log_exponent < 1.2) out.numeric_class = IntegralClass::divergent;
    else out.numeric_class = IntegralClass::unknown;

    if (theta.integral_class != IntegralClass::unknown) {
        out.reported_class = theta.integral_class;
        out.confidence = "analytic";
    } else {
        out.reported_class = out.numeric_class;
        out.confidence = "numeric";
    }
    return out;
}

double block_a_constant(int n) {
    if (n < 1) throw std::invalid_argument("block_a_constant: n must be >= 1");
    return std::exp((std::lgamma(n + 1.0) - n * std::log(kPi)) / (2.0 * n));
}

void InghamParams::validate(const ThetaFunction& theta) const {
    if (n < 1 || J_max < 1) throw std::invalid_argument("InghamParams: need n >= 1, J_max >= 1");
    if (rho.size() != static_cast<std::size_t>(J_max) || tau.size() != static_cast<std::size_t>(J_max))
        throw std::invalid_argument("InghamParams: sequence length differs from J_max");
    if (!(a > 0.0) || std::abs(4.0 * std::pow(c, 4) - 1.0) > 1e-12 || !(c_n > 0.0))
        throw std::invalid_argument("InghamParams: bad constants");
    for (int j = 1; j <= J_max; ++j) {
        const double r = rho[j - 1];
        const double t = tau[j - 1];
        if (!(r > 0.0) || !(t > 0.0)) throw std::invalid_argument("InghamParams: sequences must be positive");
        if (j > 1 && (r > rho[j - 2] || t > tau[j - 2]))
            throw std::invalid_argument("InghamParams: sequences must be nonincreasing");
        const double lower = c_n * c_n * kE * kE * theta(j) / j;
        if (r < lower) throw std::invalid_argument("InghamParams: rho_j below c_n^2 e^2 Theta(j)/j");
    }
}

BlockSpec InghamParams::block(int j) const {
    if (n != 1) throw std::invalid_argument("InghamParams::block: direct-space blocks need n = 1");
    if (j < 1 || j > J_max) throw std::out_of_range("InghamParams::block: j out of range");
    return BlockSpec{rho[j - 1], tau[j - 1], a};
}

double InghamParams::support_radius_bound(int N) const {
    if (N < 0 || N > J_max) throw std::out_of_range("support_radius_bound: N out of range");
    double sr = 0.0, st = 0.0;
    for (int j = 0; j < N; ++j) {
        sr += rho[j];
        st += tau[j];
    }
    return a * sr + c * st;
}

InghamParams choose_sequences(const ThetaFunction& theta, int J_max, double c_n, int n) {
    if (J_max < 1) throw std::invalid_argument("choose_sequences: J_max must be >= 1");
    if (!(c_n > 0.0)) throw std::invalid_argument("choose_sequences: c_n must be positive");
    if (classify_theta(theta).reported_class == IntegralClass::divergent)
        throw std::invalid_argument("choose_sequences: divergent Theta admits no construction");
    InghamParams p;
    p.n = n;
    p.J_max = J_max;
    p.a = block_a_constant(n);
    p.c = std::pow(0.25, 0.25);
    p.c_n = c_n;
    const double scale = c_n * c_n * kE * kE;
    for (int j = 1; j <= J_max; ++j) {
        p.rho.push_back(scale * theta(j) / j + 1.0 / (static_cast<double>(j) * j));
        p.tau.push_back(1.0 / (static_cast<double>(j) * j));
    }
    p.tau_tail = 1.0 / J_max;
    p.rho_tail = scale * log_integral(theta, J_max, 1e12 * J_max) + 1.0 / J_max;
    p.validate(theta);
    return p;
}

std::vector<double> fj_coefficients(double rho, double lambda, int k_max, int n) {
    if (lambda == 0.0) throw std::invalid_argument("fj_coefficients: lambda = 0 is excluded");
    if (!(rho > 0.0) || k_max < 0 || n < 1) throw std::invalid_argument("fj_coefficients: bad arguments");
    const double R = block_a_constant(n) * rho;
    const double L = std::abs(lambda);
    const double nu = envelope_nu(k_max, n);
    const double r_turn = std::sqrt(2.0 * nu / L);
    const double X = 0.5 * L * R * R;
    const int panels = std::min(4096, 4 + static_cast<int>(std::ceil(std::sqrt(nu * std::min(X, nu)))));
    std::vector<double> breaks;
    const double r_osc = std::min(R, r_turn);
    for (int p = 0; p <= panels; ++p) breaks.push_back(r_osc * p / panels);
    if (R > r_turn * (1.0 + 1e-12))
        for (int p = 1; p <= 4; ++p) breaks.push_back(r_turn + (R - r_turn) * p / 4.0);
    auto grid = make_panel_grid(breaks, 16);
    auto slice = sample_profile(grid, [&](double) { return std::pow(rho, -2.0 * n); });
    return radial_coefficients(slice, lambda, k_max, n);
}

double gj_fourier(double tau, double lambda) {
    const double x = 0.5 * tau * tau * lambda;
    if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0 + x * x * x * x / 120.0;
    return std::sin(x) / x;
}

AdaptiveN adaptive_N(int k, double lambda, const ThetaFunction& theta, int n, int J_max) {
    if (k < 0 || n < 1 || J_max < 0) throw std::invalid_argument("adaptive_N: bad arguments");
    const double y = std::sqrt((2.0 * k + n) * std::abs(lambda));
    const double raw = std::floor(theta(y) * y);
    AdaptiveN out;
    if (raw > J_max) {
        out.N = J_max;
        out.clamped = true;
    } else {
        out.N = std::max(0, static_cast<int>(raw));
    }
    return out;
}

GNTable build_GN_spectral(const InghamParams& params, const ThetaFunction& theta, const std::vector<double>& lambdas,
                          int k_max, std::optional<int> fixed_N) {
    params.validate(theta);
    if (fixed_N && (*fixed_N < 0 || *fixed_N > params.J_max))
        throw std::invalid_argument("build_GN_spectral: fixed N outside [0, J_max]");
    GNTable out;
    out.table = SpectralTable::zeros(params.n, lambdas, k_max);
    const std::size_t cells = out.table.values.size();
    out.log_modulus.assign(cells, 0.0);
    out.N.assign(cells, 0);
    out.clamped.assign(cells, 0);
    out.underflow.assign(cells, 0);
    const double tiny = std::log(std::numeric_limits<double>::min());

    for (std::size_t l = 0; l < lambdas.size(); ++l) {
        const double lambda = lambdas[l];
        int n_max = 0;
        for (int k = 0; k <= k_max; ++k) {
            const std::size_t idx = out.table.index(l, k);
            if (fixed_N) {
                out.N[idx] = *fixed_N;
            } else {
                const auto choice = adaptive_N(k, lambda, theta, params.n, params.J_max);
                out.N[idx] = choice.N;
                out.clamped[idx] = choice.clamped;
            }
            n_max = std::max(n_max, out.N[idx]);
        }
        std::vector<double> log_mod(k_max + 1, 0.0);
        std::vector<int> negative(k_max + 1, 0);
        for (int j = 1; j <= n_max; ++j) {
            const double g = gj_fourier(params.tau[j - 1], lambda);
            const auto column = fj_coefficients(params.rho[j - 1], lambda, k_max, params.n);
            for (int k = 0; k <= k_max; ++k) {
                const std::size_t idx = out.table.index(l, k);
                if (j > out.N[idx]) continue;
                const double factor = g * column[k];
                out.max_factor = std::max(out.max_factor, std::abs(factor));
                log_mod[k] += std::log(std::abs(factor));
                negative[k] ^= factor < 0.0;
            }
        }
        for (int k = 0; k <= k_max; ++k) {
            const std::size_t idx = out.table.index(l, k);
            out.log_modulus[idx] = log_mod[k];
            double value = std::exp(log_mod[k]);
            if (log_mod[k] < tiny) {
                value = 0.0;
                out.underflow[idx] = std::isfinite(log_mod[k]);
            }
            out.table.values[idx] = negative[k] ? -value : value;
        }
    }
    return out;
}

DecayReport verify_decay(const SpectralTable& table, const ThetaFunction& theta, const std::vector<double>* log_modulus) {
    table.validate();
    if (log_modulus && log_modulus->size() != table.values.size())
        throw std::invalid_argument("verify_decay: log moduli do not match the table");
    DecayReport report;
    report.theta_label = theta.label;
    report.log_sup_ratio = -kInf;
    for (std::size_t l = 0; l < table.lambdas.size(); ++l) {
        for (int k = 0; k <= table.k_max; ++k) {
            DecayCell cell;
            cell.k = k;
            cell.lambda = table.lambdas[l];
            cell.mu = table.mu(l, k);
            const double y = std::sqrt(cell.mu);
            const double log_bound = -2.0 * theta(y) * y;
            const double log_mod = log_modulus ? (*log_modulus)[table.index(l, k)] : std::log(std::abs(table.at(l, k)));
            cell.coeff_sq = std::exp(2.0 * log_mod);
            cell.bound = std::exp(log_bound);
            cell.log_ratio = 2.0 * log_mod - log_bound;
            report.log_sup_ratio = std::max(report.log_sup_ratio, cell.log_ratio);
            report.cells.push_back(cell);
        }
    }
    report.fitted_C = std::exp(report.log_sup_ratio);
    report.finite = std::isfinite(report.fitted_C);
    return report;
}

DecayReport verify_decay(const GNTable& gn, const ThetaFunction& theta) {
    return verify_decay(gn.table, theta, &gn.log_modulus);
}

DecayVerdict decay_verdict(const DecayReport& base, const DecayReport& refined, double tolerance) {
    DecayVerdict v;
    v.C = base.fitted_C;
    v.C_refined = refined.fitted_C;
    if (!base.finite || !refined.finite) {
        v.relative_change = kInf;
        return v;
    }
    const double scale = std::max(std::abs(v.C), std::numeric_limits<double>::min());
    v.relative_change = std::abs(v.C_refined - v.C) / scale;
    v.pass = v.relative_change < tolerance;
    return v;
}

void write_decay_csv(const DecayReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "k,lambda,mu,coeff_sq,bound,ratio\n" << std::setprecision(17);
    for (const auto& c : report.cells)
        out << c.k << ',' << c.lambda << ',' << c.mu << ',' << c.coeff_sq << ',' << c.bound << ','
            << std::exp(c.log_ratio) << '\n';
}

SpatialGN build_spatial_GN(const InghamParams& params, int N, const DirectConvolutionOptions& options) {
    if (params.n != 1) throw std::invalid_argument("build_spatial_GN: n = 1 only");
    if (N < 1 || N > 3 || N > params.J_max) throw std::invalid_argument("build_spatial_GN: need 1 <= N <= min(3, J_max)");
    SpatialGN out;
    if (N == 1) {
        out.sample = sample_block(params.block(1), options);
    } else {
        out.sample = group_convolve_blocks(params.block(1), params.block(2), options);
        if (N == 3) out.sample = group_convolve_sampled(out.sample, params.block(3), options);
    }
    out.ball_radius = params.support_radius_bound(N);
    out.mass_outside = mass_outside_ball(out.sample, out.ball_radius);
    out.l1_norm = out.sample.l1_norm();
    out.sup = out.sample.max_abs();
    return out;
}

SpectralTable approximate_identity(const SpectralTable& table, double eps) {
    if (!(eps > 0.0) || eps > 1.0) throw std::invalid_argument("approximate_identity: eps must lie in (0, 1]");
    auto out = dilate_spectral(table, 1.0 / eps);
    const double factor = std::pow(eps, -(2.0 * table.n + 2.0));
    for (auto& v : out.values) v *= factor;
    return out;
}

SpectralTable approximate_identity(const SpectralTable& table, double eps, const std::vector<double>& lambdas) {
    return resample_lambda(approximate_identity(table, eps), lambdas);
}

namespace {

template <class Visit>
void for_each_block_bound_sample(const BlockBoundSweep& sweep, Visit&& visit) {
    for (double rho : sweep.rhos) {
        for (double lambda : sweep.lambdas) {
            const auto column = fj_coefficients(rho, lambda, sweep.k_max, sweep.n);
            for (int k = 0; k <= sweep.k_max; ++k) {
                const double x = rho * std::sqrt((2.0 * k + sweep.n) * std::abs(lambda));
                visit(std::abs(column[k]), std::pow(x, -sweep.n + 0.5));
            }
        }
    }
}

}  // namespace

BlockBoundFit fit_block_bound(const BlockBoundSweep& sweep) {
    BlockBoundFit fit;
    for_each_block_bound_sample(sweep, [&](double value, double shape) {
        ++fit.samples;
        fit.c_n = std::max(fit.c_n, value / shape);
    });
    const double sup = fit.c_n;
    fit.c_n = sup * (1.0 + 1e-9);
    fit.worst_ratio = sup / fit.c_n;
    return fit;
}

BlockBoundFit check_block_bound(const BlockBoundSweep& sweep, double c_n) {
    BlockBoundFit fit;
    fit.c_n = c_n;
    for_each_block_bound_sample(sweep, [&](double value, double shape) {
        ++fit.samples;
        const double ratio = value / (c_n * shape);
        fit.worst_ratio = std::max(fit.worst_ratio, ratio);
        if (ratio > 1.0) ++fit.violations;
    });
    return fit;
}

}  // namespace heis
