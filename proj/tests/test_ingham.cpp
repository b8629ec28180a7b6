#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "heis/ingham.hpp"
#include "oracles.hpp"

using namespace heis;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

// Frozen result of fit_block_bound over the default sweep.
constexpr double kFittedCn = 1.22271752574;

InghamParams standard_params(int J_max = 40) { return choose_sequences(theta_inv_sqrt(), J_max, kFittedCn); }

double max_relative(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(b[i]));
    }
    return worst / scale;
}

}  // namespace

TEST_CASE("theta presets and classification") {
    const auto s = classify_theta(theta_inv_sqrt());
    CHECK(s.reported_class == IntegralClass::convergent);
    CHECK(s.numeric_class == IntegralClass::convergent);
    CHECK(s.confidence == "analytic");
    CHECK(s.monotone);
    // int_1^inf (1+t)^{-1/2} / t dt = 2 asinh(1)
    CHECK(std::abs(s.integral + s.tail_estimate - 2.0 * std::asinh(1.0)) < 0.01);

    const auto l = classify_theta(theta_inv_log(), 1e8);
    CHECK(l.reported_class == IntegralClass::divergent);
    CHECK(l.numeric_class == IntegralClass::divergent);
    CHECK(std::isinf(l.tail_estimate));
    {
        const auto rule = oracle::gauss_panels(0.0, std::log(1e8), 64, 16);
        long double ref = 0.0L;
        for (std::size_t i = 0; i < rule.x.size(); ++i) ref += rule.w[i] / std::log(kE + std::exp(rule.x[i]));
        CHECK(std::abs(l.integral - static_cast<double>(ref)) < 1e-6 * static_cast<double>(ref));
    }

    const auto z = classify_theta(theta_zero());
    CHECK(z.reported_class == IntegralClass::convergent);
    CHECK(z.integral == 0.0);

    ThetaFunction bumpy{"bumpy", [](double t) { return 1.0 / (1.0 + t) + (t > 5.0 && t < 6.0 ? 0.5 : 0.0); },
                        IntegralClass::unknown};
    const auto b = classify_theta(bumpy);
    CHECK_FALSE(b.monotone);
    CHECK(b.confidence == "numeric");
    CHECK(b.reported_class == IntegralClass::convergent);

    CHECK_THROWS_AS(classify_theta(theta_inv_sqrt(), 100.0), std::invalid_argument);
    CHECK_THROWS_AS(theta_preset("cubic"), std::invalid_argument);
    CHECK(theta_preset("inv_log").label == "inv_log");
    const auto scaled = theta_scaled(theta_inv_sqrt(), 0.5);
    CHECK(scaled(4.0) == doctest::Approx(0.5 / std::sqrt(3.0)));
}

TEST_CASE("sequence choice") {
    const auto p = choose_sequences(theta_inv_sqrt(), 50, 1.0);
    CHECK(p.rho[0] == doctest::Approx(kE * kE / std::sqrt(2.0) + 1.0).epsilon(1e-14));
    CHECK(4.0 * std::pow(p.c, 4) == doctest::Approx(1.0));
    CHECK(p.a == doctest::Approx(1.0 / std::sqrt(kPi)));
    for (int j = 1; j <= 50; ++j) {
        if (j > 1) {
            CHECK(p.rho[j - 1] <= p.rho[j - 2]);
            CHECK(p.tau[j - 1] <= p.tau[j - 2]);
        }
        const double lower = kE * kE / std::sqrt(1.0 + j) / j;
        CHECK(p.rho[j - 1] - lower == doctest::Approx(1.0 / (j * j)).epsilon(1e-10));
    }
    CHECK(p.tau_tail == doctest::Approx(1.0 / 50));
    CHECK(p.rho_tail > 0.0);
    CHECK(std::isfinite(p.rho_tail));
    CHECK_THROWS_AS(choose_sequences(theta_inv_log(), 10, 1.0), std::invalid_argument);
    const auto zero = choose_sequences(theta_zero(), 10, 1.0);
    CHECK(zero.rho[3] == doctest::Approx(1.0 / 16.0));
    CHECK(zero.support_radius_bound(2) ==
          doctest::Approx(zero.a * (1.0 + 0.25) + zero.c * (1.0 + 0.25)));
}

TEST_CASE("block constant gives unit mass") {
    for (int n = 1; n <= 4; ++n) {
        const double a = block_a_constant(n);
        for (double rho : {0.1, 1.0, 3.7}) {
            const auto rule = oracle::gauss_panels(0.0, a * rho, 4, 20);
            long double mass = 0.0L;
            for (std::size_t i = 0; i < rule.x.size(); ++i)
                mass += rule.w[i] * std::pow(rule.x[i], 2 * n - 1) * std::pow(rho, -2.0 * n);
            mass *= 2.0L * std::pow(kPi, n) / std::tgamma(static_cast<double>(n));
            CHECK(std::abs(static_cast<double>(mass) - 1.0) < 1e-10);
        }
    }
    CHECK(block_a_constant(1) == doctest::Approx(1.0 / std::sqrt(kPi)));
}

TEST_CASE("f_j coefficients against an explicit-sum oracle") {
    for (int n : {1, 2}) {
        for (double rho : {0.3, 1.0, 2.5}) {
            for (double lambda : {0.5, -2.0}) {
                const int K = 25;
                const auto column = fj_coefficients(rho, lambda, K, n);
                const double a = block_a_constant(n);
                const auto rule = oracle::gauss_panels(0.0, a, 40, 16);
                for (int k = 0; k <= K; k += 5) {
                    long double acc = 0.0L;
                    for (std::size_t i = 0; i < rule.x.size(); ++i) {
                        const long double x = 0.5L * std::abs(lambda) * rho * rho * rule.x[i] * rule.x[i];
                        acc += rule.w[i] * oracle::laguerre_sum(k, n - 1.0L, x) * std::exp(-0.5L * x) *
                               std::pow(static_cast<long double>(rule.x[i]), 2 * n - 1);
                    }
                    const long double norm = std::exp(std::lgamma(k + 1.0L) + std::lgamma(static_cast<long double>(n)) -
                                                      std::lgamma(k + static_cast<long double>(n)));
                    const double expected =
                        static_cast<double>(acc * norm * 2.0L * std::pow(kPi, n) / std::tgamma(static_cast<double>(n)));
                    CHECK(std::abs(column[k] - expected) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("f_j coefficients: bounds and small-rho limit") {
    const auto tiny = fj_coefficients(1e-3, 1.0, 5, 1);
    for (double r : tiny) CHECK(std::abs(r - 1.0) < 0.05);
    for (double rho : {0.01, 0.3, 1.0, 8.8}) {
        for (double lambda : {-4.0, 0.5, 2.0}) {
            for (double r : fj_coefficients(rho, lambda, 400, 1)) CHECK(std::abs(r) <= 1.0 + 1e-12);
        }
    }
    CHECK_THROWS_AS(fj_coefficients(1.0, 0.0, 3, 1), std::invalid_argument);
}

TEST_CASE("block coefficient bound constant") {
    const BlockBoundSweep sweep;
    const auto fit = fit_block_bound(sweep);
    CHECK(fit.samples == 7u * 3u * 301u);
    CHECK(fit.c_n == doctest::Approx(kFittedCn).epsilon(1e-9));
    const auto check = check_block_bound(sweep, fit.c_n);
    CHECK(check.violations == 0);
    // frozen constant re-asserted on a denser sweep
    BlockBoundSweep dense;
    dense.lambdas = {0.5, 0.75, 1.0, 1.5, 2.0};
    dense.rhos = {0.05, 0.08, 0.1, 0.15, 0.2, 0.3, 0.35, 0.5, 0.6, 0.75, 0.9, 1.0};
    const auto regression = check_block_bound(dense, kFittedCn * (1.0 + 1e-9));
    CHECK(regression.violations == 0);
    CHECK(regression.worst_ratio > 0.9);
}

TEST_CASE("g_j transform") {
    CHECK(gj_fourier(0.7, 0.0) == 1.0);
    for (int i = -2000; i <= 2000; ++i) CHECK(std::abs(gj_fourier(0.8, 0.05 * i)) <= 1.0);
    for (int m = 1; m <= 4; ++m) CHECK(std::abs(gj_fourier(0.5, 2.0 * m * kPi / 0.25)) < 1e-15);
    CHECK(gj_fourier(1.0, 1e-6) == doctest::Approx(1.0));
}

TEST_CASE("adaptive N") {
    for (int k = 0; k <= 50; ++k) CHECK(adaptive_N(k, 3.0, theta_zero(), 1, 40).N == 0);
    CHECK(adaptive_N(0, 100.0, theta_inv_sqrt(), 1, 40).N == 3);
    CHECK(adaptive_N(2, 20.0, theta_inv_sqrt(), 1, 40).N == 3);
    for (int k = 0; k <= 300; ++k) {
        for (double lambda : {0.3, -1.0, 7.0}) {
            const auto choice = adaptive_N(k, lambda, theta_inv_sqrt(), 1, 1000);
            CHECK(choice.N <= std::sqrt((2.0 * k + 1) * std::abs(lambda)));
            CHECK_FALSE(choice.clamped);
        }
    }
    const auto clamped = adaptive_N(10000, 50.0, theta_inv_log(), 1, 5);
    CHECK(clamped.N == 5);
    CHECK(clamped.clamped);
}

TEST_CASE("G_N spectral table") {
    const auto p = standard_params();
    const auto theta = theta_inv_sqrt();
    const std::vector<double> lambdas{-2.0, -1.0, 0.5, 1.0, 2.0};
    const auto gn = build_GN_spectral(p, theta, lambdas, 200);
    CHECK(gn.max_factor <= 1.0);
    for (std::size_t i = 0; i < gn.N.size(); ++i) {
        if (gn.N[i] == 0) CHECK(gn.table.values[i] == 1.0);
        CHECK(std::abs(gn.table.values[i]) <= 1.0);
    }
    // monotone damping in N
    auto previous = build_GN_spectral(p, theta, lambdas, 60, 0);
    for (int N = 1; N <= 6; ++N) {
        const auto next = build_GN_spectral(p, theta, lambdas, 60, N);
        for (std::size_t i = 0; i < next.table.values.size(); ++i)
            CHECK(std::abs(next.table.values[i]) <= std::abs(previous.table.values[i]));
        previous = next;
    }
    CHECK_THROWS_AS(build_GN_spectral(p, theta, lambdas, 10, 41), std::invalid_argument);
}

TEST_CASE("G_2 spectral table against the direct convolution") {
    const auto p = standard_params();
    const auto gn = build_GN_spectral(p, theta_inv_sqrt(), {1.0}, 20, 2);
    const auto spatial = build_spatial_GN(p, 2);
    const auto direct = sampled_coefficients(spatial.sample, 1.0, 20);
    const std::vector<double> spectral(gn.table.values.begin(), gn.table.values.end());
    const double err = max_relative(direct, spectral);
    MESSAGE("G_2 coefficient error " << err);
    CHECK(err < 2e-2);
}

TEST_CASE("decay verification") {
    const auto p = standard_params();
    const auto theta = theta_inv_sqrt();
    const std::vector<double> lambdas{-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
    const auto base = verify_decay(build_GN_spectral(p, theta, lambdas, 200), theta);
    const auto refined = verify_decay(build_GN_spectral(p, theta, lambdas, 400), theta);
    CHECK(base.finite);
    const auto verdict = decay_verdict(base, refined);
    CHECK(verdict.pass);
    CHECK(verdict.relative_change < 0.1);

    auto ones = SpectralTable::zeros(1, lambdas, 200);
    std::fill(ones.values.begin(), ones.values.end(), 1.0);
    auto ones_refined = SpectralTable::zeros(1, lambdas, 400);
    std::fill(ones_refined.values.begin(), ones_refined.values.end(), 1.0);
    const auto control = decay_verdict(verify_decay(ones, theta), verify_decay(ones_refined, theta));
    CHECK_FALSE(control.pass);

    const auto zero = theta_zero();
    const auto trivial = verify_decay(build_GN_spectral(choose_sequences(zero, 10, kFittedCn), zero, lambdas, 100), zero);
    CHECK(trivial.finite);
    CHECK(trivial.fitted_C <= 1.0);

    const auto path = std::filesystem::temp_directory_path() / "heis_decay.csv";
    write_decay_csv(base, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "k,lambda,mu,coeff_sq,bound,ratio");
}

TEST_CASE("spatial G_N: support, mass and sup bound") {
    const auto p = standard_params();
    for (int N = 1; N <= 3; ++N) {
        const auto g = build_spatial_GN(p, N);
        MESSAGE("N = " << N << ": l1 " << g.l1_norm << ", outside " << g.mass_outside);
        CHECK(g.mass_outside < 1e-6);
        CHECK(std::abs(g.l1_norm - 1.0) < 1e-4);
    }
    const auto f23 = group_convolve_blocks(p.block(2), p.block(3));
    CHECK(f23.max_abs() <= 1.0 / (p.rho[1] * p.rho[1] * p.tau[1] * p.tau[1]));
    CHECK_THROWS_AS(build_spatial_GN(p, 4), std::invalid_argument);
}

TEST_CASE("approximate identity") {
    const std::vector<double> lambdas{-2.0, -1.0, 0.5, 1.0, 2.0};
    auto grid = make_panel_grid(std::vector<double>{0.0, 4.0, 8.0, 12.0}, 100);
    auto v_rule = composite_gauss(std::vector<double>{-6.0, -3.0, 0.0, 3.0, 6.0}, 30);
    HeisenbergRadialFunction f{1, {SeparableTerm{sample_profile(grid, [](double r) { return std::exp(-0.5 * r * r); }),
                                                 sample_central(v_rule, [](double t) { return std::exp(-t * t); })}}};
    HeisenbergRadialFunction F{1, {SeparableTerm{sample_profile(grid, [](double r) { return std::exp(-r * r) / kPi; }),
                                                 sample_central(v_rule, [](double t) {
                                                     return std::exp(-t * t) / std::sqrt(kPi);
                                                 })}}};
    const auto table_f = build_spectral_table(f, lambdas, 20);

    auto same = approximate_identity(build_spectral_table(F, lambdas, 20), 1.0);
    CHECK(same.same_grid(table_f));

    const double eps = 0.01;
    std::vector<double> shrunk;
    for (double l : lambdas) shrunk.push_back(l * eps * eps);
    const auto F_eps = approximate_identity(build_spectral_table(F, shrunk, 20), eps);
    REQUIRE(F_eps.same_grid(table_f));
    const auto smoothed = convolve_radial(table_f, F_eps);
    double worst = 0.0;
    for (std::size_t i = 0; i < smoothed.values.size(); ++i)
        worst = std::max(worst, std::abs(smoothed.values[i] - table_f.values[i]));
    CHECK(worst < 0.05);
    CHECK_THROWS_AS(approximate_identity(table_f, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(approximate_identity(table_f, 0.5, {100.0}), std::invalid_argument);

    // decay modulus of F_eps is eps Theta(eps y) with the same constant
    const auto theta = theta_inv_sqrt();
    const auto gn = build_GN_spectral(standard_params(), theta, lambdas, 100);
    const auto base = verify_decay(gn.table, theta);
    const auto scaled = verify_decay(approximate_identity(gn.table, 0.5), theta_scaled(theta, 0.5));
    CHECK(scaled.fitted_C == doctest::Approx(base.fitted_C).epsilon(1e-9));
}
