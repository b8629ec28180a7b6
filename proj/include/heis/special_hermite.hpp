#pragma once

#include <vector>

#include "heis/plane_field.hpp"
#include "heis/quadrature.hpp"

namespace heis {

/// Width of the lattice ring on which the finite-difference operators are not evaluated.
inline constexpr int kStencilRing = 3;

struct SpecialHermiteEigenpair {
    int k = 0;
    double lambda = 1.0;
    double eigenvalue = 1.0;  ///< (2k + n)|lambda|
};

SpecialHermiteEigenpair special_hermite_eigenpair(int k, double lambda, int n);

struct TwistedConvolution {
    PlaneField field;
    double boundary_fraction = 0.0;  ///< larger of the two input edge-energy fractions
    bool truncation_warning = false; ///< boundary_fraction above 1e-6
};

/// Direct lattice quadrature of
///   (f x_lambda g)(z) = int f(z - w) g(w) e^{(i lambda/2) Im(z conj w)} dw,
/// with g taken as zero off the lattice.
TwistedConvolution twisted_convolve(const PlaneField& f, const PlaneField& g, double lambda);

/// f x_lambda phi_{k,lambda}^0 with the Laguerre kernel evaluated in closed form.
PlaneField twisted_convolve_phi(const PlaneField& f, int k, double lambda);

/// f x_lambda phi_{k,lambda}^0 for k = 0..k_max in a single lattice pass.
std::vector<PlaneField> twisted_convolve_phi_all(const PlaneField& f, int k_max, double lambda);

/// k-th special Hermite component P_k f = (|lambda| / 2 pi) f x_lambda phi_{k,lambda}^0.
PlaneField project_special_hermite(const PlaneField& f, int k, double lambda);

struct SpecialHermiteExpansion {
    std::vector<PlaneField> components;  ///< P_0 f .. P_K f
    std::vector<double> energies;        ///< ||P_k f||^2
    double field_energy = 0.0;           ///< ||f||^2
    double tail_energy = 0.0;            ///< ||f||^2 - sum_k ||P_k f||^2
    bool truncated = false;              ///< relative tail above tolerance
};

SpecialHermiteExpansion special_hermite_expansion(const PlaneField& f, int k_max, double lambda,
                                                  double tail_tolerance = 1e-3);

/// Sixth-order seven-point-per-axis Laplacian; the outer kStencilRing rows are set to zero.
PlaneField apply_laplacian(const PlaneField& f);

/// Rotation field N f = x df/dy - y df/dx, same stencil and ring convention.
PlaneField apply_rotation(const PlaneField& f);

/// The special Hermite operator acting on the lambda-slice f^lambda = int e^{i lambda t} f dt:
///   L_lambda f = -Laplacian f + (lambda^2/4)|z|^2 f - i lambda N f.
/// Commutes with twisted_translate and has f x_lambda phi_{k,lambda} as eigenfunctions.
PlaneField apply_special_hermite_operator(const PlaneField& f, double lambda);

/// ||a - b|| / ||b|| restricted to nodes at least `ring` away from the lattice edge.
double interior_relative_l2(const PlaneField& a, const PlaneField& b, int ring = kStencilRing);

/// (T_w^lambda f)(z) = e^{(i lambda/2) Im(w conj z)} f(z - w), resampled by sixth-order
/// Lagrange interpolation. Throws when more than 1e-6 of the energy would leave the lattice.
PlaneField twisted_translate(const PlaneField& f, cplx w, double lambda);

/// Solid harmonic z^p conj(z)^q on C (n = 1, so p q = 0).
struct BigradedHarmonic {
    int p = 0;
    int q = 0;

    void validate(int n = 1) const;
    cplx operator()(cplx z) const;
};

/// Scalar c with (P g) x phi_k^{n-1} = c P(z) phi_{k-p}^{m-1}(|z|), m = n + p + q;
/// zero for k < p. c = (2 pi)^{-(p+q)} R_{k-p}(g; m) with R the radial
/// coefficient on C^m. g is sampled on its own radial grid with measure dr.
double hecke_bochner_coefficient(const RadialProfile& g, const BigradedHarmonic& P, int k, int n);

/// Spectral side of the Hecke-Bochner identity at lambda = 1, evaluated on an S, N lattice.
PlaneField hecke_bochner_project(const RadialProfile& g, const BigradedHarmonic& P, int k, int n,
                                 double S, int N);

/// Radial profile of the (p, q) circle mode: r^{-(p+q)} (1/2 pi) int f(r e^{i theta}) e^{-i(p-q) theta}.
struct AngularMode {
    RadialGrid grid;           ///< uniform, spacing h, up to the inscribed radius
    std::vector<cplx> values;
    cplx at_origin;            ///< even quartic fit of the samples near r = 0
};

AngularMode spherical_harmonic_coefficient(const PlaneField& f, int p, int q, int angles = 128);

struct VanishingReport {
    std::vector<double> derivatives;  ///< max over directions of |d^m/dr^m f(r w)| at r = 0
    double noise_floor = 0.0;
};

/// Radial derivatives at the point w after twisting w to the origin. max_order <= 6.
VanishingReport vanishing_order(const PlaneField& f, cplx w, int max_order, double lambda = 1.0);

}  // namespace heis
