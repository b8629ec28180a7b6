#pragma once

#include <vector>

#include "heis/quadrature.hpp"

namespace heis {

/// Degree k and type delta of a Laguerre polynomial L_k^delta.
struct LaguerreOrder {
    int k = 0;
    double delta = 0.0;

    /// Throws std::invalid_argument unless k >= 0 and delta >= -1/2.
    void validate() const;
};

/// L_k^delta(t) by the upward three-term recurrence.
double laguerre_poly(LaguerreOrder order, double t);

/// Orthonormal Laguerre function on (0, inf) with respect to dt:
///   (k! / Gamma(k+delta+1))^{1/2} L_k^delta(t) e^{-t/2} t^{delta/2}.
/// The gamma ratio is taken in log space; returns 0 when the result underflows.
double normalized_laguerre(LaguerreOrder order, double t);

/// normalized_laguerre for k = 0..k_max at one point.
std::vector<double> normalized_laguerre_sequence(double delta, double t, int k_max);

struct OrthonormalityReport {
    double delta = 0.0;
    int k_max = 0;
    std::vector<double> gram;     ///< gram[j * (k_max + 1) + k] = <L_j, L_k>
    double max_off_diagonal = 0.0;
    double max_diagonal_error = 0.0;
};

/// Gram matrix of normalized_laguerre for k <= k_max in L^2(dt), computed with t = u^2
/// on Gauss panels past the last turning point.
OrthonormalityReport laguerre_orthonormality(double delta, int k_max);

/// psi_k^delta(r) = k! Gamma(delta+1)/Gamma(k+delta+1) L_k^delta(r^2/2) e^{-r^2/4},
/// so that psi_k^delta(0) = 1. Requires delta > -1.
double psi(LaguerreOrder order, double r);

/// psi_k^delta(r) for k = 0..k_max.
std::vector<double> psi_sequence(double delta, double r, int k_max);

/// Squared norm of psi_k^delta in L^2(R+, r^{2 delta + 1} dr):
///   2^delta Gamma(delta+1)^2 k! / Gamma(k+delta+1).
/// Its reciprocal is the Laguerre Plancherel weight c_k^delta.
double psi_norm_sq(LaguerreOrder order);

/// phi_{k,lambda}^{n-1}(r) = L_k^{n-1}(|lambda| r^2 / 2) e^{-|lambda| r^2 / 4}.
double phi_radial(int k, int n, double lambda, double r);

/// C_{k,n}^2 phi_{k,lambda}^{n-1}(r) = psi_k^{n-1}(sqrt|lambda| r), bounded by 1.
std::vector<double> phi_normalized_sequence(int n, double lambda, double r, int k_max);

/// log of binom(k+n-1, k) = (k+n-1)! / (k! (n-1)!).
double log_multiplicity(int k, int n);

struct EnvelopeParams {
    double gamma = 0.0;
    double c_env = 0.0;

    void validate() const;
};

enum class EnvelopeRegime { small_r, oscillatory, transition, exponential };

/// nu(k) = 2(2k+n).
inline double envelope_nu(int k, int n) { return 2.0 * (2.0 * k + n); }

EnvelopeRegime envelope_regime(int k, int n, double lambda, double r);

/// The four-regime majorant of C_{k,n} |phi_{k,lambda}^{n-1}(r)|, including the
/// prefactor (r sqrt|lambda|)^{-(n-1)} and the multiplicative constant c_env.
double laguerre_envelope(int k, int n, double lambda, double r, const EnvelopeParams& params);

/// Regime shape without c_env and without the exponential-regime factor; used by fits.
double envelope_shape(int k, int n, double lambda, double r, double gamma);

struct EnvelopeSweep {
    int n = 1;
    int k_max = 200;
    std::vector<double> lambdas{0.5, 1.0, 2.0};
    int r_count = 2000;   ///< uniform r samples on (0, R_max]
    double r_max = 0.0;   ///< 0 selects default_r_max(k_max, n, min |lambda|)
};

struct EnvelopeFit {
    EnvelopeParams params;
    std::size_t samples = 0;
    std::size_t violations = 0;   ///< samples above the fitted envelope
    double worst_ratio = 0.0;     ///< max of value / envelope after the fit
};

/// Fits (c_env, gamma): c_env is the sup of value/shape over the algebraic regimes,
/// gamma the largest rate keeping the exponential regime under c_env e^{-gamma x}.
EnvelopeFit fit_envelope(const EnvelopeSweep& sweep);

/// Re-checks a sweep against frozen constants.
EnvelopeFit check_envelope(const EnvelopeSweep& sweep, const EnvelopeParams& params);

/// Default radial cutoff sqrt(3 nu(K)/|lambda_min|) + 6/sqrt(|lambda_min|).
double default_r_max(int k_max, int n, double lambda_min);

/// Fourth-order finite-difference application of
///   L_delta = -d^2/dr^2 - (2 delta + 1)/r d/dr + r^2/4
/// on a uniform grid; one-sided stencils at both ends.
RadialProfile apply_laguerre_operator(const RadialProfile& profile, double delta);

}  // namespace heis
