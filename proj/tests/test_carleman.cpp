#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "heis/carleman.hpp"
#include "heis/laguerre.hpp"
#include "oracles.hpp"

using namespace heis;

namespace {

constexpr double kPi = std::numbers::pi;

SobolevLadder profile_ladder(SyntheticProfile p, int k_max, int M, double param = 0.0, int n = 1, double lambda = 1.0) {
    return sobolev_norms_log(n, lambda, synthetic_log_coefficients(p, n, lambda, k_max, param), M);
}

}  // namespace

TEST_CASE("single mode ladder is exact") {
    auto table = SpectralTable::zeros(2, {-0.5, 1.5}, 12);
    table.at(1, 4) = 0.3;
    const auto ladder = sobolev_norms(table, 1.5, 30);
    const double mu = (2.0 * 4 + 2) * 1.5;
    const double norm0_sq = std::pow(1.5 / (2.0 * kPi), 2) * 5.0 * 0.09;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const int m = ladder.m_values[i];
        CHECK(ladder.log_norms[i] == doctest::Approx(m * std::log(mu) + 0.5 * std::log(norm0_sq)).epsilon(1e-13));
        CHECK(ladder.usable[i]);
    }
    const auto verdict = carleman_sum(ladder);
    CHECK(verdict.classification == CarlemanClass::divergent);
    CHECK(std::abs(verdict.growth_exponent) < 0.1);
    CHECK(log_convexity_defect(ladder) > -1e-9);
    for (std::size_t i = 1; i < verdict.partial_sums.size(); ++i)
        CHECK(verdict.partial_sums[i] >= verdict.partial_sums[i - 1]);
    CHECK_THROWS_AS(sobolev_norms(table, 1.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(sobolev_norms(table, 1.5, 81), std::invalid_argument);
}

TEST_CASE("table and log-coefficient entry points agree") {
    const auto logs = synthetic_log_coefficients(SyntheticProfile::heat, 2, -0.7, 300);
    auto table = SpectralTable::zeros(2, {-0.7}, 300);
    for (int k = 0; k <= 300; ++k) table.at(0, k) = std::exp(logs[k]);
    const auto a = sobolev_norms(table, -0.7, 40);
    const auto b = sobolev_norms_log(2, -0.7, logs, 40);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.log_norms[i] == doctest::Approx(b.log_norms[i]).epsilon(1e-13));
}

TEST_CASE("heat profile against the Laplace oracle") {
    const auto ladder = profile_ladder(SyntheticProfile::heat, 400, 60);
    for (int m = 10; m <= 60; ++m) {
        const double ratio = ladder.roots[m - 1] / heat_root_oracle(m);
        CHECK(std::abs(ratio - 1.0) < 0.15);
    }
    // Stirling-corrected oracle: sum_k mu^{2m} e^{-2 mu} ~ Gamma(2m+1) / 2^{2m+2} at lambda = 1
    for (int m : {20, 40, 60}) {
        const double log_sq = std::lgamma(2.0 * m + 1) - (2.0 * m + 2) * std::log(2.0) - std::log(2.0 * kPi);
        CHECK(ladder.log_norms[m - 1] == doctest::Approx(0.5 * log_sq).epsilon(1e-3));
    }
    const auto verdict = carleman_sum(ladder);
    CHECK(verdict.classification == CarlemanClass::divergent);
    CHECK(verdict.growth_exponent == doctest::Approx(1.0).epsilon(0.05));
    CHECK(log_convexity_defect(ladder) > -1e-9);
    CHECK(roots_nondecreasing(ladder));
}

TEST_CASE("Poisson profile against the Laplace oracle") {
    const auto ladder = profile_ladder(SyntheticProfile::poisson, 60000, 60);
    CHECK_FALSE(ladder.tail_dominated);
    // Gamma-function oracle: sum_k mu^{2m} e^{-2 sqrt mu} ~ Gamma(4m+2) / 2^{4m+2} at lambda = 1
    for (int m = 10; m <= 60; ++m) {
        const double log_sq = std::lgamma(4.0 * m + 2) - (4.0 * m + 2) * std::log(2.0) - std::log(2.0 * kPi);
        CHECK(ladder.log_norms[m - 1] == doctest::Approx(0.5 * log_sq).epsilon(1e-3));
    }
    for (int m = 14; m <= 60; ++m) CHECK(std::abs(ladder.roots[m - 1] / poisson_root_oracle(m) - 1.0) < 0.15);
    const auto verdict = carleman_sum(ladder);
    CHECK(verdict.classification == CarlemanClass::convergent);
    CHECK(verdict.growth_exponent == doctest::Approx(2.0).epsilon(0.05));
    CHECK(log_convexity_defect(ladder) > -1e-9);
    CHECK(roots_nondecreasing(ladder));
}

TEST_CASE("polynomial decay is tail-dominated") {
    const auto ladder = profile_ladder(SyntheticProfile::polynomial, 20000, 30, 3.0);
    CHECK(ladder.tail_dominated);
    const auto verdict = carleman_sum(ladder);
    CHECK(verdict.classification == CarlemanClass::inconclusive);
    CHECK(log_convexity_defect(ladder) > -1e-9);
    // low moments converge: sum_k mu^{2m - 6} with 2m - 6 < -1
    CHECK(ladder.usable[0]);
    CHECK(ladder.usable[1]);
}

TEST_CASE("short ladders are inconclusive") {
    const auto ladder = profile_ladder(SyntheticProfile::heat, 100, 9);
    const auto verdict = carleman_sum(ladder);
    CHECK(verdict.classification == CarlemanClass::inconclusive);
    CHECK(verdict.reason == "fewer than 10 usable m");
    CHECK(synthetic_profile("poisson") == SyntheticProfile::poisson);
    CHECK_THROWS_AS(synthetic_profile("gauss"), std::invalid_argument);
}

TEST_CASE("Laguerre ladder") {
    SUBCASE("single Laguerre function") {
        const double delta = 1.5;
        const int k0 = 3;
        std::vector<double> coeff(10, 0.0);
        coeff[k0] = psi_norm_sq({k0, delta});
        const auto ladder = laguerre_sobolev_norms(coeff, delta, 40);
        const double eig = 2.0 * k0 + delta + 1.0;
        for (std::size_t i = 0; i < ladder.size(); ++i) {
            const int m = ladder.m_values[i];
            CHECK(ladder.roots[i] == doctest::Approx(eig * std::pow(psi_norm_sq({k0, delta}), 0.5 / m)).epsilon(1e-12));
        }
        CHECK(carleman_sum(ladder).classification == CarlemanClass::divergent);
    }
    SUBCASE("exponential coefficients") {
        std::vector<double> coeff(400);
        for (int k = 0; k < 400; ++k) coeff[k] = std::exp(-(2.0 * k + 1.0));
        const auto ladder = laguerre_sobolev_norms(coeff, 0.0, 60);
        const auto verdict = carleman_sum(ladder);
        CHECK(verdict.classification == CarlemanClass::divergent);
        for (int m = 20; m <= 60; ++m) CHECK(std::abs(ladder.roots[m - 1] / heat_root_oracle(m) - 1.0) < 0.15);
    }
    SUBCASE("agrees with the spectral ladder on a Gaussian") {
        for (int n : {1, 2, 3}) {
            const double delta = n - 1.0;
            const double a = 0.5;
            const int K = 80;
            // closed-form Gaussian coefficients at lambda = 1
            const double s = 2.0 * a + 0.5;
            std::vector<double> logs(K + 1), coeff(K + 1);
            for (int k = 0; k <= K; ++k) {
                logs[k] = std::log(2.0 * std::pow(kPi, n) * std::pow(2.0, n - 1)) + k * std::log(s - 1.0) -
                          (k + n) * std::log(s);
                coeff[k] = std::exp(logs[k]) / sphere_area(n);
            }
            // the matched Laguerre coefficients are int f psi_k r^{2 delta + 1} dr
            const auto rule = oracle::gauss_panels(0.0, 14.0, 28, 20);
            for (int k = 0; k <= 12; ++k) {
                long double direct = 0.0L;
                for (std::size_t i = 0; i < rule.x.size(); ++i) {
                    const long double r = rule.x[i];
                    const long double t = 0.5L * r * r;
                    const long double psi = oracle::laguerre_sum(k, delta, t) * std::exp(-0.5L * t) *
                                            std::exp(std::lgamma(k + 1.0L) + std::lgamma(delta + 1.0L) -
                                                     std::lgamma(k + delta + 1.0L));
                    direct += rule.w[i] * std::exp(-a * r * r) * std::pow(r, 2.0L * delta + 1.0L) * psi;
                }
                CHECK(std::abs(static_cast<double>(direct) - coeff[k]) < 1e-12 * coeff[0]);
            }
            const auto lag = laguerre_sobolev_norms(coeff, delta, 20);
            const auto spec = sobolev_norms_log(n, 1.0, logs, 20);
            CHECK(lag.usable_count() == 20);
            for (std::size_t i = 0; i < lag.size(); ++i) {
                const double lhs = 2.0 * lag.log_norms[i] + std::log(sphere_area(n));
                CHECK(std::abs(std::expm1(lhs - 2.0 * spec.log_norms[i])) < 1e-6);
            }
        }
    }
}

TEST_CASE("growth bound for the inverse-log decay profile") {
    const auto theta = theta_inv_log();
    const auto ladder = sobolev_norms_log(1, 1.0, theta_decay_log_coefficients(theta, 1, 1.0, 1000000), 40);
    CHECK_FALSE(ladder.tail_dominated);
    CHECK(log_convexity_defect(ladder) > -1e-9);
    CHECK(roots_nondecreasing(ladder));
    const auto report = theta_growth_bound_check(ladder, 1, theta);
    MESSAGE("growth-bound C = " << report.fitted_C);
    CHECK(report.pass);
    CHECK(report.finite);
    for (double r : report.log_ratio) CHECK(r <= std::log(report.fitted_C) + 1e-12);
}

TEST_CASE("constant Theta reduces to the Poisson ladder") {
    const ThetaFunction one{"one", [](double) { return 1.0; }, IntegralClass::divergent};
    const auto a = sobolev_norms_log(1, 1.0, theta_decay_log_coefficients(one, 1, 1.0, 20000), 30);
    const auto b = profile_ladder(SyntheticProfile::poisson, 20000, 30);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.log_norms[i] == b.log_norms[i]);
    const auto report = theta_growth_bound_check(a, 1, one);
    // ratio (2m/e)^{4m} Gamma-corrections / (2m)^{4m} decays like e^{-4m}
    CHECK(report.pass);
    CHECK(report.log_ratio.back() < report.log_ratio.front());
}

TEST_CASE("integral-test link") {
    const auto link = integral_test_link(theta_inv_log());
    REQUIRE(link.M_values.size() == 6);
    CHECK(link.M_values.back() == 1000000);
    CHECK(link.bracket_ok);
    CHECK(link.increasing);
    CHECK(link.series_class == IntegralClass::divergent);
    CHECK(link.divergent);
    // int_1^M dx / (x log(e + x^4)) grows like log log M / 4
    const double growth = link.integrals.back() - link.integrals[2];
    CHECK(growth == doctest::Approx(0.25 * std::log(std::log(1e6) / std::log(1e3))).epsilon(0.05));

    const auto convergent = integral_test_link(theta_inv_sqrt(), 100000);
    CHECK(convergent.bracket_ok);
    CHECK_FALSE(convergent.divergent);
    CHECK(convergent.M_values.back() == 100000);
    CHECK_THROWS_AS(integral_test_link(theta_inv_sqrt(), 100), std::invalid_argument);
}

TEST_CASE("ladder csv") {
    const auto ladder = profile_ladder(SyntheticProfile::heat, 100, 12);
    const auto verdict = carleman_sum(ladder);
    const auto path = std::filesystem::temp_directory_path() / "heis_ladder.csv";
    write_ladder_csv(ladder, verdict, path);
    std::ifstream in(path);
    std::string line;
    int rows = -1;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 12);
}
