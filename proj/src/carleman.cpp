#include "heis/carleman.hpp"

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
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_M(int M) {
    if (M < 1 || M > kMaxLadder) throw std::invalid_argument("ladder: M must lie in [1, 80]");
}

double logsumexp(const std::vector<double>& x, std::size_t count) {
    double top = kNegInf;
    for (std::size_t i = 0; i < count; ++i) top = std::max(top, x[i]);
    if (top == kNegInf) return kNegInf;
    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) sum += std::exp(x[i] - top);
    return top + std::log(sum);
}

// log ||A^m f||^2 = offset + logsumexp_k(base_k + 2m log_eig_k).
SobolevLadder build_ladder(double lambda, const std::vector<double>& base, const std::vector<double>& log_eig,
                           double offset, int M) {
    check_M(M);
    if (base.size() < 2) throw std::invalid_argument("ladder: need at least two coefficients");
    const std::size_t full = base.size();
    const std::size_t half = (full - 1) / 2 + 1;
    SobolevLadder out;
    out.lambda = lambda;
    std::vector<double> terms(full);
    for (int m = 1; m <= M; ++m) {
        for (std::size_t k = 0; k < full; ++k) terms[k] = base[k] + 2.0 * m * log_eig[k];
        const double all = logsumexp(terms, full);
        const double part = logsumexp(terms, half);
        const double log_norm = 0.5 * (offset + all);
        const double change = all == kNegInf ? 1.0 : 1.0 - std::exp(0.5 * (part - all));
        out.m_values.push_back(m);
        out.log_norms.push_back(log_norm);
        out.roots.push_back(std::exp(log_norm / m));
        out.tail_change.push_back(change);
        out.usable.push_back(std::isfinite(log_norm) && change < 0.01 ? 1 : 0);
    }
    out.tail_dominated = !out.usable.back();
    return out;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

double log_integral(const std::function<double(double)>& g, double t0, double t1) {
    const double u0 = std::log(t0);
    const double u1 = std::log(t1);
    if (!(u1 > u0)) return 0.0;
    const int panels = std::max(4, static_cast<int>(std::ceil(4.0 * (u1 - u0))));
    std::vector<double> breaks(panels + 1);
    for (int p = 0; p <= panels; ++p) breaks[p] = u0 + (u1 - u0) * p / panels;
    const auto rule = composite_gauss(breaks, 16);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * g(std::exp(rule.nodes[i]));
    return sum;
}

}  // namespace

std::size_t SobolevLadder::usable_count() const {
    return static_cast<std::size_t>(std::count(usable.begin(), usable.end(), 1));
}

SobolevLadder sobolev_norms_log(int n, double lambda, const std::vector<double>& log_modulus, int M) {
    if (n < 1) throw std::invalid_argument("sobolev_norms: n must be >= 1");
    if (lambda == 0.0 || !std::isfinite(lambda)) throw std::invalid_argument("sobolev_norms: lambda must be nonzero");
    const double a = std::abs(lambda);
    std::vector<double> base(log_modulus.size()), log_eig(log_modulus.size());
    for (std::size_t k = 0; k < log_modulus.size(); ++k) {
        base[k] = log_multiplicity(static_cast<int>(k), n) + 2.0 * log_modulus[k];
        log_eig[k] = std::log((2.0 * k + n) * a);
    }
    return build_ladder(lambda, base, log_eig, n * (std::log(a) - std::log(2.0 * kPi)), M);
}

SobolevLadder sobolev_norms(const SpectralTable& table, double lambda, int M) {
    table.validate();
    const std::size_t l = table.find_lambda(lambda);
    std::vector<double> log_modulus(table.k_max + 1);
    for (int k = 0; k <= table.k_max; ++k) {
        const double v = std::abs(table.at(l, k));
        log_modulus[k] = v > 0.0 ? std::log(v) : kNegInf;
    }
    return sobolev_norms_log(table.n, table.lambdas[l], log_modulus, M);
}

SobolevLadder laguerre_sobolev_norms(const std::vector<double>& coefficients, double delta, int M) {
    if (!(delta > -1.0)) throw std::invalid_argument("laguerre_sobolev_norms: delta must exceed -1");
    std::vector<double> base(coefficients.size()), log_eig(coefficients.size());
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
        const double v = std::abs(coefficients[k]);
        const double log_c = -std::log(psi_norm_sq({static_cast<int>(k), delta}));
        base[k] = v > 0.0 ? log_c + 2.0 * std::log(v) : kNegInf;
        log_eig[k] = std::log(2.0 * k + delta + 1.0);
    }
    return build_ladder(1.0, base, log_eig, 0.0, M);
}

const char* to_string(CarlemanClass c) {
    switch (c) {
        case CarlemanClass::divergent: return "divergent";
        case CarlemanClass::convergent: return "convergent";
        case CarlemanClass::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

CarlemanVerdict carleman_sum(const SobolevLadder& ladder) {
    CarlemanVerdict out;
    double sum = 0.0;
    for (double root : ladder.roots) {
        if (std::isfinite(root) && root > 0.0) sum += 1.0 / root;
        out.partial_sums.push_back(sum);
    }
    if (ladder.usable_count() < 10) {
        out.reason = "fewer than 10 usable m";
        return out;
    }
    const int M = ladder.m_values.back();
    std::vector<double> x, y;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (!ladder.usable[i] || 2 * ladder.m_values[i] < M) continue;
        x.push_back(std::log(static_cast<double>(ladder.m_values[i])));
        y.push_back(std::log(ladder.roots[i]));
    }
    if (x.size() < 2) {
        out.reason = "fewer than two usable m in the upper half";
        return out;
    }
    out.growth_exponent = slope(x, y);
    if (ladder.tail_dominated) {
        out.reason = "tail-dominated ladder";
        return out;
    }
    if (out.growth_exponent <= out.divergent_margin) {
        out.classification = CarlemanClass::divergent;
        out.reason = "roots grow at most linearly";
    } else if (out.growth_exponent >= out.convergent_margin) {
        out.classification = CarlemanClass::convergent;
        out.reason = "roots grow faster than linearly";
    } else {
        out.reason = "growth exponent inside the margin band";
    }
    return out;
}

double log_convexity_defect(const SobolevLadder& ladder) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < ladder.size(); ++i) {
        if (!ladder.usable[i - 1] || !ladder.usable[i] || !ladder.usable[i + 1]) continue;
        worst = std::min(worst, ladder.log_norms[i + 1] - 2.0 * ladder.log_norms[i] + ladder.log_norms[i - 1]);
    }
    return worst;
}

bool roots_nondecreasing(const SobolevLadder& ladder, double slack) {
    double previous = 0.0;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (!ladder.usable[i]) continue;
        if (ladder.roots[i] < previous * (1.0 - slack)) return false;
        previous = ladder.roots[i];
    }
    return true;
}

const char* to_string(SyntheticProfile p) {
    switch (p) {
        case SyntheticProfile::single_mode: return "single_mode";
        case SyntheticProfile::heat: return "heat";
        case SyntheticProfile::poisson: return "poisson";
        case SyntheticProfile::polynomial: return "polynomial";
    }
    return "unknown";
}

SyntheticProfile synthetic_profile(const std::string& name) {
    for (auto p : {SyntheticProfile::single_mode, SyntheticProfile::heat, SyntheticProfile::poisson,
                   SyntheticProfile::polynomial})
        if (name == to_string(p)) return p;
    throw std::invalid_argument("unknown profile: " + name);
}

std::vector<double> synthetic_log_coefficients(SyntheticProfile profile, int n, double lambda, int k_max,
                                               double param) {
    if (k_max < 1 || n < 1 || lambda == 0.0) throw std::invalid_argument("synthetic profile: bad grid");
    std::vector<double> out(k_max + 1);
    for (int k = 0; k <= k_max; ++k) {
        const double mu = (2.0 * k + n) * std::abs(lambda);
        switch (profile) {
            case SyntheticProfile::single_mode: out[k] = k == static_cast<int>(param) ? 0.0 : kNegInf; break;
            case SyntheticProfile::heat: out[k] = -mu; break;
            case SyntheticProfile::poisson: out[k] = -std::sqrt(mu); break;
            case SyntheticProfile::polynomial: out[k] = -param * std::log(mu); break;
        }
    }
    return out;
}

std::vector<double> theta_decay_log_coefficients(const ThetaFunction& theta, int n, double lambda, int k_max) {
    if (k_max < 1 || n < 1 || lambda == 0.0) throw std::invalid_argument("decay profile: bad grid");
    std::vector<double> out(k_max + 1);
    for (int k = 0; k <= k_max; ++k) {
        const double s = std::sqrt((2.0 * k + n) * std::abs(lambda));
        out[k] = -theta(s) * s;
    }
    return out;
}

double heat_root_oracle(int m) { return m / kE; }
double poisson_root_oracle(int m) { return 4.0 * m * m / (kE * kE); }

GrowthBoundReport theta_growth_bound_check(const SobolevLadder& ladder, int n, const ThetaFunction& theta) {
    GrowthBoundReport out;
    out.theta_label = theta.label;
    out.lambda = ladder.lambda;
    out.tail_dominated = ladder.tail_dominated;
    const int M = ladder.m_values.back();
    double sup = kNegInf, sup_half = kNegInf;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (!ladder.usable[i]) continue;
        const int m = ladder.m_values[i];
        const double th = theta(std::pow(static_cast<double>(m), 4));
        const double log_bound = std::log(std::abs(ladder.lambda)) + 4.0 * m * std::log(2.0 * m / th);
        const double r = n * std::log(2.0 * kPi) + 2.0 * ladder.log_norms[i] - log_bound;
        out.m_values.push_back(m);
        out.log_ratio.push_back(r);
        sup = std::max(sup, r);
        if (2 * m <= M) sup_half = std::max(sup_half, r);
    }
    out.fitted_C = std::exp(sup);
    out.fitted_C_half = std::exp(sup_half);
    out.finite = std::isfinite(out.fitted_C) && out.fitted_C > 0.0;
    out.stable = out.finite && std::abs(out.fitted_C - out.fitted_C_half) < 0.1 * out.fitted_C;
    out.pass = out.finite && out.stable && !out.tail_dominated;
    return out;
}

IntegralTestLink integral_test_link(const ThetaFunction& theta, long long M_max) {
    if (M_max < 1000) throw std::invalid_argument("integral_test_link: M_max must be >= 1e3");
    auto g = [&theta](double x) { return theta(x * x * x * x); };
    IntegralTestLink out;
    out.bracket_ok = true;
    out.increasing = true;
    long double sum = 0.0L;
    long long next = 10;
    double previous = -1.0;
    for (long long m = 1; m <= M_max; ++m) {
        const double x = static_cast<double>(m);
        sum += static_cast<long double>(g(x) / x);
        if (m == next || m == M_max) {
            const double s = static_cast<double>(sum);
            const double lower = log_integral(g, 1.0, x + 1.0);
            const double upper = g(1.0) + log_integral(g, 1.0, x);
            out.M_values.push_back(m);
            out.partial_sums.push_back(s);
            out.integrals.push_back(log_integral(g, 1.0, x));
            if (s < lower * (1.0 - 1e-12) || s > upper * (1.0 + 1e-12)) out.bracket_ok = false;
            if (!(s > previous)) out.increasing = false;
            previous = s;
            if (m == next) next = next > M_max / 10 ? M_max : next * 10;
        }
    }
    ThetaFunction composed{theta.label + "(x^4)", g, IntegralClass::unknown};
    out.series_class = classify_theta(composed, static_cast<double>(M_max)).numeric_class;
    out.divergent = out.bracket_ok && out.increasing && out.series_class == IntegralClass::divergent;
    return out;
}

void write_ladder_csv(const SobolevLadder& ladder, const CarlemanVerdict& verdict, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "m,log_norm,root,partial_sum\n" << std::setprecision(17);
    for (std::size_t i = 0; i < ladder.size(); ++i)
        out << ladder.m_values[i] << ',' << ladder.log_norms[i] << ',' << ladder.roots[i] << ','
            << verdict.partial_sums[i] << '\n';
}

}  // namespace heis
