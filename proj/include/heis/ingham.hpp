#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "heis/heisenberg.hpp"

namespace heis {

enum class IntegralClass { convergent, divergent, unknown };

const char* to_string(IntegralClass c);

/// Nonincreasing Theta on [0, inf) together with the class of int_1^inf Theta(t)/t dt.
struct ThetaFunction {
    std::string label;
    std::function<double(double)> eval;
    IntegralClass integral_class = IntegralClass::unknown;

    double operator()(double t) const { return eval(t); }
};

/// (1 + t)^{-1/2}
ThetaFunction theta_inv_sqrt();
/// 1 / log(e + t)
ThetaFunction theta_inv_log();
ThetaFunction theta_zero();
/// "inv_sqrt", "inv_log" or "zero"; throws otherwise.
ThetaFunction theta_preset(const std::string& name);
/// y -> eps Theta(eps y), the modulus of the approximate identity F_eps.
ThetaFunction theta_scaled(const ThetaFunction& theta, double eps);

struct ThetaClassification {
    double integral = 0.0;        ///< int_1^T Theta(t)/t dt
    double tail_estimate = 0.0;   ///< extrapolated int_T^inf, infinite when the tail looks divergent
    double log_exponent = 0.0;    ///< s in Theta(e^u) ~ u^{-s} near u = log T
    IntegralClass numeric_class = IntegralClass::unknown;
    IntegralClass reported_class = IntegralClass::unknown;  ///< analytic class when the preset has one
    std::string confidence;       ///< "analytic" or "numeric"
    bool monotone = true;
};

/// Requires T_max >= 1e3.
ThetaClassification classify_theta(const ThetaFunction& theta, double T_max = 1e6);

struct InghamParams {
    int n = 1;
    std::vector<double> rho;  ///< rho[j-1] = rho_j
    std::vector<double> tau;  ///< tau[j-1] = tau_j
    double a = 0.0;
    double c = 0.0;           ///< 4 c^4 = 1
    double c_n = 0.0;
    int J_max = 0;
    double rho_tail = 0.0;    ///< estimate of sum_{j > J_max} rho_j
    double tau_tail = 0.0;    ///< bound on sum_{j > J_max} tau_j

    /// Throws unless the sequences are positive, nonincreasing and satisfy the lower bound.
    void validate(const ThetaFunction& theta) const;
    BlockSpec block(int j) const;
    /// a sum_{j<=N} rho_j + c sum_{j<=N} tau_j
    double support_radius_bound(int N) const;
};

/// rho_j = c_n^2 e^2 Theta(j)/j + j^{-2}, tau_j = j^{-2}. Rejects divergent-class Theta.
InghamParams choose_sequences(const ThetaFunction& theta, int J_max, double c_n, int n = 1);

/// (n! / pi^n)^{1/(2n)}: the ball of radius a rho in C^n has volume rho^{2n}.
double block_a_constant(int n);

/// R_k(lambda, f_j) for k = 0..k_max with f_j = rho^{-2n} 1{|z| < a rho}. Panels are
/// refined with the oscillation count of the top Laguerre function and split at its turning point.
std::vector<double> fj_coefficients(double rho, double lambda, int k_max, int n);

/// sin(tau^2 lambda / 2) / (tau^2 lambda / 2), equal to 1 at lambda = 0.
double gj_fourier(double tau, double lambda);

struct AdaptiveN {
    int N = 0;
    bool clamped = false;
};

/// floor(Theta(sqrt(mu)) sqrt(mu)) with mu = (2k + n)|lambda|, clamped to [0, J_max].
AdaptiveN adaptive_N(int k, double lambda, const ThetaFunction& theta, int n, int J_max);

struct GNTable {
    SpectralTable table;
    std::vector<double> log_modulus;   ///< log |R_k(lambda, G_N)|, -inf for an exact zero
    std::vector<int> N;                ///< factor count per cell
    std::vector<std::uint8_t> clamped; ///< N reached J_max
    std::vector<std::uint8_t> underflow; ///< stored value flushed to zero
    double max_factor = 0.0;           ///< largest |factor| seen, at most 1
};

/// Product of ghat_j(lambda) R_k(lambda, f_j) over j <= N(k, lambda) in log space.
/// With fixed_N the adaptive rule is replaced by a constant N.
GNTable build_GN_spectral(const InghamParams& params, const ThetaFunction& theta,
                          const std::vector<double>& lambdas, int k_max,
                          std::optional<int> fixed_N = std::nullopt);

struct DecayCell {
    int k = 0;
    double lambda = 0.0;
    double mu = 0.0;
    double coeff_sq = 0.0;
    double bound = 0.0;      ///< e^{-2 Theta(sqrt mu) sqrt mu}
    double log_ratio = 0.0;  ///< log(coeff_sq / bound)
};

struct DecayReport {
    std::string theta_label;
    std::vector<DecayCell> cells;
    double log_sup_ratio = 0.0;
    double fitted_C = 0.0;   ///< sup ratio, +inf on overflow
    bool finite = false;
};

/// Ratios |R_k|^2 / e^{-2 Theta(sqrt mu) sqrt mu} over the table. When log moduli are
/// supplied (from build_GN_spectral) they replace the stored values.
DecayReport verify_decay(const SpectralTable& table, const ThetaFunction& theta,
                         const std::vector<double>* log_modulus = nullptr);
DecayReport verify_decay(const GNTable& gn, const ThetaFunction& theta);

struct DecayVerdict {
    double C = 0.0;
    double C_refined = 0.0;
    double relative_change = 0.0;
    bool pass = false;
};

/// PASS iff both constants are finite and differ by less than `tolerance` relative.
DecayVerdict decay_verdict(const DecayReport& base, const DecayReport& refined, double tolerance = 0.1);

/// CSV with header k,lambda,mu,coeff_sq,bound,ratio.
void write_decay_csv(const DecayReport& report, const std::filesystem::path& path);

struct SpatialGN {
    RadialTSample sample;
    double ball_radius = 0.0;   ///< a sum rho + c sum tau over j <= N
    double mass_outside = 0.0;
    double l1_norm = 0.0;
    double sup = 0.0;
};

/// F_1 * ... * F_N on H^1 by direct quadrature, N <= 3.
SpatialGN build_spatial_GN(const InghamParams& params, int N, const DirectConvolutionOptions& options = {});

/// Table of F_eps = eps^{-(2n+2)} delta_{1/eps} F: R_k(lambda, F_eps) = R_k(eps^2 lambda, F).
/// The lambda grid is re-indexed by 1/eps^2. eps in (0, 1].
SpectralTable approximate_identity(const SpectralTable& table, double eps);
/// Same, resampled onto `lambdas`; throws when the dilated grid does not cover them.
SpectralTable approximate_identity(const SpectralTable& table, double eps, const std::vector<double>& lambdas);

struct BlockBoundSweep {
    int n = 1;
    int k_max = 300;
    std::vector<double> lambdas{0.5, 1.0, 2.0};
    std::vector<double> rhos{0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0};
};

struct BlockBoundFit {
    double c_n = 0.0;
    std::size_t samples = 0;
    std::size_t violations = 0;
    double worst_ratio = 0.0;  ///< max |R_k| / bound
};

/// Smallest c_n (nudged up by 1e-9 relative) with |R_k| <= c_n (rho sqrt mu)^{-n+1/2} on the sweep.
BlockBoundFit fit_block_bound(const BlockBoundSweep& sweep);
/// Counts violations of a given c_n over the sweep.
BlockBoundFit check_block_bound(const BlockBoundSweep& sweep, double c_n);

}  // namespace heis
