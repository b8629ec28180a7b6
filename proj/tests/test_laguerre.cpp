#include <cmath>
#include <stdexcept>
#include <numbers>

#include "doctest.h"
#include "heis/laguerre.hpp"
#include "oracles.hpp"

using namespace heis;

TEST_CASE("laguerre polynomial: closed values") {
    CHECK(laguerre_poly({0, 1.5}, 7.3) == 1.0);
    CHECK(std::abs(laguerre_poly({1, 1.0}, 2.0)) < 1e-15);
    CHECK(laguerre_poly({2, 0.0}, 1.0) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("laguerre polynomial: recurrence vs explicit sum") {
    double worst = 0.0;
    for (double delta : {-0.5, 0.0, 0.7, 2.0, 5.5}) {
        for (int k = 0; k <= 10; ++k) {
            for (double t : {0.0, 0.3, 1.7, 4.0, 9.5, 21.0}) {
                const long double ref = oracle::laguerre_sum(k, delta, t);
                const double got = laguerre_poly({k, delta}, t);
                const double scale = std::max(1.0, static_cast<double>(std::abs(ref)));
                worst = std::max(worst, std::abs(got - static_cast<double>(ref)) / scale);
            }
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("laguerre polynomial: domain errors") {
    CHECK_THROWS_AS(laguerre_poly({2, -0.6}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(laguerre_poly({2, 0.0}, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(laguerre_poly({-1, 0.0}, 1.0), std::invalid_argument);
}

TEST_CASE("normalized laguerre: values") {
    CHECK(normalized_laguerre({0, 0.0}, 0.0) == 1.0);
    CHECK(normalized_laguerre({0, 0.0}, 2.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    // matches the direct formula at moderate arguments
    for (double delta : {0.0, 1.0, 2.5}) {
        for (int k : {0, 3, 9}) {
            const double t = 3.1;
            const double direct = std::sqrt(std::tgamma(k + 1.0) / std::tgamma(k + delta + 1.0)) *
                                  static_cast<double>(oracle::laguerre_sum(k, delta, t)) *
                                  std::exp(-t / 2) * std::pow(t, delta / 2);
            CHECK(normalized_laguerre({k, delta}, t) == doctest::Approx(direct).epsilon(1e-12));
        }
    }
    // far in the decay region the value underflows to exactly 0 rather than NaN
    CHECK(normalized_laguerre({3, 1.0}, 5000.0) == 0.0);
}

TEST_CASE("normalized laguerre: orthonormality of (3,5) at delta = 1") {
    // substitute t = u^2 so the integrand is smooth at the origin
    auto rule = oracle::gauss_panels(0.0, 20.0, 40, 20);
    double ip = 0.0;
    double n3 = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const double u = rule.x[i];
        const double t = u * u;
        const double a = normalized_laguerre({3, 1.0}, t);
        const double b = normalized_laguerre({5, 1.0}, t);
        ip += rule.w[i] * 2.0 * u * a * b;
        n3 += rule.w[i] * 2.0 * u * a * a;
    }
    CHECK(std::abs(ip) < 1e-8);
    CHECK(std::abs(n3 - 1.0) < 1e-8);
}

TEST_CASE("psi: normalization at the origin and degree zero") {
    for (int k = 0; k <= 100; ++k) CHECK(psi({k, 2.0}, 0.0) == 1.0);
    CHECK(psi({5, 2.0}, 0.0) == 1.0);
    for (double r : {0.4, 1.9, 3.3})
        CHECK(psi({0, 1.0}, r) == doctest::Approx(std::exp(-r * r / 4)).epsilon(1e-15));
    CHECK_THROWS_AS(psi({1, -1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("psi: orthogonality and norms in r^{2 delta+1} dr") {
    auto grid = make_radial_grid(30.0, 400, GridScheme::gauss, 3.0);
    auto p2 = sample_profile(grid, [](double r) { return psi({2, 1.0}, r); });
    auto p4 = sample_profile(grid, [](double r) { return psi({4, 1.0}, r); });
    std::vector<double> prod(grid.size()), sq(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        prod[i] = p2.values[i] * p4.values[i];
        sq[i] = p4.values[i] * p4.values[i];
    }
    CHECK(std::abs(grid.integrate(prod)) < 1e-8);
    CHECK(grid.integrate(sq) == doctest::Approx(psi_norm_sq({4, 1.0})).epsilon(1e-10));
}

TEST_CASE("psi sequence agrees with pointwise evaluation and survives large arguments") {
    auto seq = psi_sequence(0.5, 2.3, 30);
    for (int k = 0; k <= 30; k += 7) CHECK(seq[k] == doctest::Approx(psi({k, 0.5}, 2.3)));
    auto far = psi_sequence(0.0, 80.0, 2000);
    for (double v : far) CHECK(std::isfinite(v));
}

TEST_CASE("phi radial") {
    CHECK(phi_radial(0, 1, 1.0, 2.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(phi_radial(4, 3, 0.7, 0.0) == doctest::Approx(15.0).epsilon(1e-13));  // binom(6, 4)
    CHECK(phi_radial(6, 2, 2.5, 1.1) ==
          doctest::Approx(phi_radial(6, 2, 1.0, std::sqrt(2.5) * 1.1)).epsilon(1e-13));
    CHECK(phi_radial(6, 2, -2.5, 1.1) == doctest::Approx(phi_radial(6, 2, 2.5, 1.1)));
    // direct formula
    const double x = 0.5 * 0.8 * 1.7 * 1.7;
    CHECK(phi_radial(5, 2, 0.8, 1.7) ==
          doctest::Approx(static_cast<double>(oracle::laguerre_sum(5, 1.0, x)) * std::exp(-x / 2))
              .epsilon(1e-12));
    CHECK_THROWS_AS(phi_radial(1, 1, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("envelope: continuity at the first two breakpoints") {
    for (int n : {1, 2, 3}) {
        for (int k = 0; k <= 200; ++k) {
            const double nu = envelope_nu(k, n);
            // evaluate both neighbouring branch formulas at the breakpoint
            for (double x : {1.0 / nu, 0.5 * nu}) {
                const double r = std::sqrt(2.0 * x);
                const double below = x == 1.0 / nu ? std::pow(nu * x, 0.5 * (n - 1.0))
                                                   : std::pow(nu * x, -0.25);
                const double above =
                    x == 1.0 / nu ? std::pow(nu * x, -0.25)
                                  : std::pow(nu, -0.25) *
                                        std::pow(std::cbrt(nu) + std::abs(nu - x), -0.25);
                (void)r;
                const double q = below / above;
                CHECK(q <= 2.0);
                CHECK(q >= 0.5);
            }
        }
    }
}

TEST_CASE("envelope: regime 1 is flat in r for n = 1") {
    const EnvelopeParams p{0.3, 1.0};
    const int k = 7;
    const double r1 = 0.01, r2 = 0.02;
    REQUIRE(envelope_regime(k, 1, 1.0, r2) == EnvelopeRegime::small_r);
    CHECK(laguerre_envelope(k, 1, 1.0, r1, p) == laguerre_envelope(k, 1, 1.0, r2, p));
}

TEST_CASE("envelope: fit dominates and is reproducible from frozen constants") {
    EnvelopeSweep sweep;
    sweep.k_max = 60;
    sweep.r_count = 600;
    auto fit = fit_envelope(sweep);
    CHECK(fit.violations == 0);
    CHECK(fit.params.gamma > 0.0);
    CHECK(fit.params.c_env > 0.0);
    auto again = check_envelope(sweep, fit.params);
    CHECK(again.violations == 0);
    EnvelopeParams tighter = fit.params;
    tighter.c_env *= 0.9;
    CHECK(check_envelope(sweep, tighter).violations > 0);
}

TEST_CASE("default r max") {
    CHECK(default_r_max(10, 1, 1.0) == doctest::Approx(std::sqrt(3.0 * 42.0) + 6.0));
    CHECK_THROWS(default_r_max(10, 1, 0.0));
}

namespace {
RadialProfile uniform_profile(double r_max, int count, double delta, int k) {
    auto grid = make_radial_grid(r_max, count, GridScheme::uniform);
    return sample_profile(grid, [&](double r) { return psi({k, delta}, r); });
}
}  // namespace

TEST_CASE("laguerre operator: eigenfunctions") {
    for (double delta : {0.0, 1.0, 2.5}) {
        for (int k = 0; k <= 10; ++k) {
            auto prof = uniform_profile(16.0, 3200, delta, k);
            auto out = apply_laguerre_operator(prof, delta);
            const double ev = 2.0 * k + delta + 1.0;
            double num = 0.0, den = 0.0;
            for (std::size_t i = 2; i + 2 < prof.values.size(); ++i) {
                const double d = out.values[i] - ev * prof.values[i];
                num += d * d;
                den += prof.values[i] * prof.values[i];
            }
            CHECK(std::sqrt(num / den) < 1e-4);
        }
    }
}

TEST_CASE("laguerre operator: zero and r^2") {
    auto grid = make_radial_grid(4.0, 64, GridScheme::uniform);
    auto zero = sample_profile(grid, [](double) { return 0.0; });
    for (double v : apply_laguerre_operator(zero, 1.0).values) CHECK(v == 0.0);
    const double delta = 1.5;
    auto sq = sample_profile(grid, [](double r) { return r * r; });
    auto out = apply_laguerre_operator(sq, delta);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.nodes[i];
        const double exact = -2.0 - 2.0 * (2.0 * delta + 1.0) + 0.25 * r * r * r * r;
        CHECK(out.values[i] == doctest::Approx(exact).epsilon(1e-9));
    }
    auto coarse = make_radial_grid(1.0, 8, GridScheme::uniform);
    RadialProfile tiny{coarse, std::vector<double>(7, 0.0)};
    CHECK_THROWS(apply_laguerre_operator(tiny, 0.0));
}

TEST_CASE("laguerre orthonormality report") {
    for (double delta : {-0.5, 0.0, 1.0, 2.5, 5.0}) {
        const auto report = laguerre_orthonormality(delta, 50);
        CHECK(report.max_off_diagonal < 1e-8);
        CHECK(report.max_diagonal_error < 1e-8);
        CHECK(report.gram.size() == 51u * 51u);
    }
    const auto single = laguerre_orthonormality(0.0, 0);
    CHECK(single.gram.size() == 1u);
    CHECK(single.gram[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(laguerre_orthonormality(-0.7, 5), std::invalid_argument);
}
