#include <cmath>
#include <filesystem>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "heis/laguerre.hpp"
#include "heis/special_hermite.hpp"

using namespace heis;

namespace {

constexpr double kPi = std::numbers::pi;

PlaneField gaussian(double S, int N, double a, double x0 = 0.0, double y0 = 0.0) {
    return PlaneField::from_function(S, N, [&](double x, double y) {
        return cplx(std::exp(-a * ((x - x0) * (x - x0) + (y - y0) * (y - y0))), 0.0);
    });
}

PlaneField laguerre_field(double S, int N, int k) {
    return PlaneField::from_function(S, N, [&](double x, double y) {
        return cplx(phi_radial(k, 1, 1.0, std::hypot(x, y)), 0.0);
    });
}

}  // namespace

TEST_CASE("plane field: lattice, sampling and io") {
    auto f = PlaneField::from_function(4.0, 32, [](double x, double y) { return cplx(x, y * y); });
    CHECK(f.h == doctest::Approx(0.25));
    CHECK(f.coord(16) == 0.0);
    CHECK(f.sample(0.5, -0.75) == f.at(18, 13));
    // sixth-order interpolation reproduces quintics
    auto poly = PlaneField::from_function(4.0, 32, [](double x, double y) {
        return cplx(std::pow(x, 5) - 2.0 * x * y * y, y * y * y);
    });
    const cplx v = poly.sample(0.37, -1.21);
    CHECK(std::abs(v - cplx(std::pow(0.37, 5) - 2.0 * 0.37 * 1.21 * 1.21, -1.21 * 1.21 * 1.21)) < 1e-11);
    CHECK(poly.sample(10.0, 0.0) == cplx{});

    const auto dir = std::filesystem::temp_directory_path() / "heis_plane_field_test";
    std::filesystem::create_directories(dir);
    write_plane_field(f, dir / "f.bin");
    auto g = read_plane_field(dir / "f.bin");
    CHECK(g.N == f.N);
    CHECK(g.S == f.S);
    CHECK(g.values == f.values);
    write_plane_field_csv(f, dir / "f.csv");
    CHECK(std::filesystem::file_size(dir / "f.csv") > 0);
    std::filesystem::remove_all(dir);
    CHECK_THROWS(PlaneField::zeros(1.0, 4));
}

TEST_CASE("twisted convolution: point mass, linearity, grid mismatch") {
    const double S = 6.0;
    const int N = 32;
    auto f = PlaneField::from_function(S, N, [](double x, double y) {
        return cplx(std::exp(-0.5 * (x * x + y * y)), 0.3 * x * std::exp(-0.6 * (x * x + y * y)));
    });
    auto delta = PlaneField::zeros(S, N);
    delta.at(N / 2, N / 2) = 1.0 / (delta.h * delta.h);
    auto unit = twisted_convolve(f, delta, 1.3);
    CHECK(relative_l2(unit.field, f) < 1e-12);

    auto g = gaussian(S, N, 0.4, 0.5, -0.25);
    auto h = gaussian(S, N, 0.9);
    const cplx a(0.7, -0.2), b(-1.1, 0.4);
    auto lhs = twisted_convolve(a * f + b * h, g, 0.8).field;
    auto rhs = a * twisted_convolve(f, g, 0.8).field + b * twisted_convolve(h, g, 0.8).field;
    CHECK(relative_l2(lhs, rhs) < 1e-13);

    auto wide = gaussian(S, N, 0.02);
    CHECK(twisted_convolve(wide, g, 1.0).truncation_warning);
    CHECK_FALSE(twisted_convolve(f, g, 1.0).truncation_warning);
    CHECK_THROWS(twisted_convolve(f, gaussian(S, 40, 0.5), 1.0));
    CHECK_THROWS(twisted_convolve(f, g, 0.0));
}

TEST_CASE("twisted convolution: analytic kernel matches sampled kernel") {
    const double S = 11.0;
    const int N = 64;
    auto f = gaussian(S, N, 0.5, 0.3, 0.0);
    auto kernel = laguerre_field(S, N, 2);
    auto sampled = twisted_convolve(f, kernel, 1.0).field;
    auto analytic = twisted_convolve_phi(f, 2, 1.0);
    CHECK(relative_l2(sampled, analytic) < 1e-6);
}

TEST_CASE("twisted convolution: lambda scaling relation") {
    // (f x_lambda phi_{k,lambda})(Z / sqrt(lambda)) = lambda^{-1} (F x_1 phi_k)(Z), F(Z) = f(Z / sqrt(lambda));
    // the two lattices are chosen so that node (i, j) of one maps to node (i, j) of the other
    const double lambda = 2.25;
    const double s = std::sqrt(lambda);
    const int N = 64;
    auto f = PlaneField::from_function(8.0, N, [](double x, double y) {
        return cplx(std::exp(-0.8 * (x * x + y * y)) * (1.0 + 0.5 * x), 0.0);
    });
    auto F = PlaneField::from_function(8.0 * s, N, [&](double x, double y) {
        return cplx(std::exp(-0.8 * (x * x + y * y) / lambda) * (1.0 + 0.5 * x / s), 0.0);
    });
    auto a = twisted_convolve_phi(f, 1, lambda);
    auto b = twisted_convolve_phi(F, 1, 1.0);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        num += std::norm(a.values[i] - b.values[i] / lambda);
        den += std::norm(a.values[i]);
    }
    CHECK(std::sqrt(num / den) < 1e-10);
}

TEST_CASE("special Hermite expansion: Parseval with (2 pi)^{-2n}") {
    const double S = 8.0;
    const int N = 64;
    for (int variant = 0; variant < 2; ++variant) {
        auto f = PlaneField::from_function(S, N, [&](double x, double y) {
            const double g = std::exp(-0.5 * (x * x + y * y));
            return variant == 0 ? cplx(g, 0.0) : cplx(x * g, x * y * g);
        });
        auto ex = special_hermite_expansion(f, 40, 1.0);
        double raw = 0.0;
        for (double e : ex.energies) raw += e * (2.0 * kPi) * (2.0 * kPi);
        const double rhs = raw / std::pow(2.0 * kPi, 2.0);
        CHECK(std::abs(rhs - ex.field_energy) / ex.field_energy < 1e-3);
        CHECK_FALSE(ex.truncated);
        // reconstruction
        PlaneField sum = PlaneField::zeros(S, N);
        for (const auto& c : ex.components) sum += c;
        CHECK(relative_l2(sum, f) < 1e-3);
    }
    auto narrow = gaussian(S, N, 3.0);
    CHECK(special_hermite_expansion(narrow, 2, 1.0).truncated);
}

TEST_CASE("special Hermite projection: eigenfunctions, orthogonality, idempotence") {
    const double S = 11.0;
    const int N = 96;
    auto f = PlaneField::from_function(S, N, [](double x, double y) {
        return cplx(std::exp(-0.5 * (x * x + y * y)) * (1.0 + 0.4 * x), 0.2 * y * std::exp(-0.4 * (x * x + y * y)));
    });
    auto comps = twisted_convolve_phi_all(f, 5, 1.0);
    for (int k = 0; k <= 5; ++k) {
        auto L = apply_special_hermite_operator(comps[k], 1.0);
        CHECK(interior_relative_l2(L, (2.0 * k + 1.0) * comps[k]) < 1e-3);
    }
    auto phi3 = laguerre_field(S, N, 3);
    CHECK(std::sqrt(project_special_hermite(phi3, 1, 1.0).norm_sq()) < 1e-6);
    CHECK(relative_l2(project_special_hermite(phi3, 3, 1.0), phi3) < 1e-6);
    auto p2 = project_special_hermite(f, 2, 1.0);
    CHECK(relative_l2(project_special_hermite(p2, 2, 1.0), p2) < 1e-6);
}

TEST_CASE("special Hermite operator: radial eigenfunctions, rotation, lambda = 0") {
    const double S = 8.0;
    const int N = 128;
    for (int k = 0; k <= 5; ++k) {
        auto phi = laguerre_field(S, N, k);
        auto L = apply_special_hermite_operator(phi, 1.0);
        CHECK(interior_relative_l2(L, (2.0 * k + 1.0) * phi) < 1e-3);
    }
    auto radial = gaussian(S, 160, 1.0 / 12.0);
    CHECK(std::sqrt(apply_rotation(radial).norm_sq()) < 1e-8);
    auto f = PlaneField::from_function(S, 64, [](double x, double y) {
        return cplx(std::exp(-0.5 * (x * x + y * y)) * x, y * std::exp(-(x * x + y * y)));
    });
    auto a = apply_special_hermite_operator(f, 0.0);
    auto b = apply_laplacian(f);
    b *= -1.0;
    CHECK(a.values == b.values);
}

TEST_CASE("twisted translation: identity, isometry, invariance, rejection") {
    const double S = 10.0;
    const int N = 160;
    auto g = PlaneField::from_function(S, N, [](double x, double y) {
        return cplx(std::exp(-0.5 * ((x - 0.3) * (x - 0.3) + y * y)), 0.2 * x * std::exp(-0.4 * (x * x + y * y)));
    });
    CHECK(twisted_translate(g, {0.0, 0.0}, 1.0).values == g.values);
    for (double lambda : {1.0, -0.7}) {
        for (cplx w : {cplx(0.8, -0.5), cplx(-1.3, 0.2)}) {
            auto tg = twisted_translate(g, w, lambda);
            CHECK(std::abs(tg.norm_sq() / g.norm_sq() - 1.0) < 1e-4);
            auto a = twisted_translate(apply_special_hermite_operator(g, lambda), w, lambda);
            auto b = apply_special_hermite_operator(tg, lambda);
            CHECK(interior_relative_l2(a, b, 8) < 1e-3);
        }
    }
    CHECK_THROWS_AS(twisted_translate(g, {7.0, 0.0}, 1.0), std::invalid_argument);
}

TEST_CASE("Hecke-Bochner: spectral side against direct quadrature") {
    const double S = 8.0;
    const int N = 64;
    auto grid = make_radial_grid(14.0, 300, GridScheme::gauss);
    for (int p = 0; p <= 2; ++p) {
        const BigradedHarmonic P{p, 0};
        auto g = sample_profile(grid, [](double r) { return std::exp(-0.5 * r * r); });
        auto f = PlaneField::from_function(S, N, [&](double x, double y) {
            return P(cplx(x, y)) * std::exp(-0.5 * (x * x + y * y));
        });
        auto direct = twisted_convolve_phi_all(f, 5, 1.0);
        for (int k = 0; k <= 5; ++k) {
            auto spectral = hecke_bochner_project(g, P, k, 1, S, N);
            if (k < p) {
                CHECK(spectral.norm_sq() == 0.0);
                CHECK(std::sqrt(direct[k].norm_sq()) < 1e-6);
            } else {
                CHECK(relative_l2(spectral, direct[k]) < 1e-2);
            }
        }
    }
    // p = q = 0 is the radial projection g x phi_k = R_k phi_k
    auto g = sample_profile(grid, [](double r) { return std::exp(-r * r); });
    auto radial = PlaneField::from_function(S, N, [](double x, double y) { return cplx(std::exp(-(x * x + y * y)), 0.0); });
    CHECK(relative_l2(hecke_bochner_project(g, {0, 0}, 3, 1, S, N), twisted_convolve_phi(radial, 3, 1.0)) < 1e-6);
    // the spec example: z e^{-|z|^2/4} at k = 1
    auto g4 = sample_profile(grid, [](double r) { return std::exp(-0.25 * r * r); });
    auto f4 = PlaneField::from_function(S, N, [](double x, double y) { return cplx(x, y) * std::exp(-0.25 * (x * x + y * y)); });
    CHECK(relative_l2(hecke_bochner_project(g4, {1, 0}, 1, 1, S, N), twisted_convolve_phi(f4, 1, 1.0)) < 1e-2);
    CHECK_THROWS(hecke_bochner_coefficient(g, {1, 1}, 2, 1));
}

TEST_CASE("circle modes") {
    const double S = 8.0;
    const int N = 256;
    auto radial = gaussian(S, N, 0.3);
    for (auto [p, q] : {std::pair{1, 0}, std::pair{0, 1}, std::pair{2, 0}, std::pair{0, 3}}) {
        auto m = spherical_harmonic_coefficient(radial, p, q);
        double worst = 0.0;
        for (const auto& v : m.values) worst = std::max(worst, std::abs(v));
        CHECK(worst < 1e-8);
    }
    auto m00 = spherical_harmonic_coefficient(radial, 0, 0);
    CHECK(std::abs(m00.at_origin - 1.0) < 1e-6);

    auto f = PlaneField::from_function(S, N, [](double x, double y) {
        return cplx(x, y) * std::exp(-0.25 * (x * x + y * y));
    });
    auto m10 = spherical_harmonic_coefficient(f, 1, 0);
    double worst = 0.0;
    for (std::size_t i = 0; i < m10.values.size(); ++i) {
        const double r = m10.grid.nodes[i];
        worst = std::max(worst, std::abs(m10.values[i] - std::exp(-0.25 * r * r)));
    }
    CHECK(worst < 1e-6);
    CHECK(std::abs(m10.at_origin - 1.0) < 1e-6);
    CHECK_THROWS(spherical_harmonic_coefficient(f, 1, 0, 32));
}

TEST_CASE("circle modes: Laguerre orthogonality against a single mode") {
    // f = z phi_j^{1}(|z|) has G_{1,0} = phi_j^{1}; int G phi_k^{1} r^3 dr = delta_jk 2 Gamma(j+2)/j!
    const double S = 9.0;
    const int N = 144;
    const int j = 2;
    auto f = PlaneField::from_function(S, N, [&](double x, double y) {
        return cplx(x, y) * phi_radial(j, 2, 1.0, std::hypot(x, y));
    });
    auto mode = spherical_harmonic_coefficient(f, 1, 0);
    for (int k = 0; k <= 4; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < mode.values.size(); ++i) {
            const double r = mode.grid.nodes[i];
            acc += mode.grid.weights[i] * mode.values[i].real() * phi_radial(k, 2, 1.0, r) * r * r * r;
        }
        const double expected = k == j ? 2.0 * std::tgamma(j + 2.0) / std::tgamma(j + 1.0) : 0.0;
        CHECK(std::abs(acc - expected) < 1e-3 * 2.0 * std::tgamma(j + 2.0) / std::tgamma(j + 1.0));
    }
}

TEST_CASE("vanishing order") {
    const double S = 8.0;
    const int N = 160;
    auto quartic = PlaneField::from_function(S, N, [](double x, double y) {
        const double r2 = x * x + y * y;
        return cplx(r2 * r2 * std::exp(-0.25 * r2), 0.0);
    });
    auto rep = vanishing_order(quartic, {0.0, 0.0}, 5);
    for (int m = 0; m <= 3; ++m) CHECK(rep.derivatives[m] <= rep.noise_floor);
    CHECK(rep.derivatives[4] == doctest::Approx(24.0).epsilon(1e-4));
    CHECK(rep.derivatives[4] > 1e4 * rep.noise_floor);

    auto g = gaussian(S, N, 0.25);
    auto rg = vanishing_order(g, {0.0, 0.0}, 2);
    CHECK(rg.derivatives[0] == doctest::Approx(1.0).epsilon(1e-10));

    const cplx w(0.75, -0.5);
    auto shifted = twisted_translate(quartic, w, 1.0);
    auto a = vanishing_order(shifted, w, 5);
    auto b = vanishing_order(twisted_translate(shifted, -w, 1.0), {0.0, 0.0}, 5);
    for (int m = 0; m <= 5; ++m)
        CHECK(std::abs(a.derivatives[m] - b.derivatives[m]) <= 10.0 * std::max(a.noise_floor, b.noise_floor) + 1e-6 * b.derivatives[m]);
    CHECK_THROWS(vanishing_order(g, {0.0, 0.0}, 7));
}
