#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "heis/heisenberg.hpp"
#include "heis/ingham.hpp"

namespace heis {

/// Spectral Sobolev norms of one lambda slice, m = 1..M, kept in log space.
struct SobolevLadder {
    double lambda = 0.0;
    std::vector<int> m_values;
    std::vector<double> log_norms;     ///< log ||L^m f||_2
    std::vector<double> roots;         ///< ||L^m f||_2^{1/m} = (||L^m f||_2^2)^{1/(2m)}
    std::vector<double> tail_change;   ///< relative change of the norm between k_max/2 and k_max
    std::vector<unsigned char> usable; ///< finite and tail change below 1%
    bool tail_dominated = false;       ///< the m = M norm is not resolved by the table

    std::size_t size() const { return m_values.size(); }
    std::size_t usable_count() const;
};

/// Hard cap on M.
inline constexpr int kMaxLadder = 80;

/// (2 pi)^n ||L_lambda^m f^lambda||^2 = |lambda|^n sum_k d(k, n) mu_k^{2m} |R_k(lambda)|^2.
/// Requires a table with at least two k values so the tail check has a half table.
SobolevLadder sobolev_norms(const SpectralTable& table, double lambda, int M);

/// Same with the coefficients given as log |R_k| (entries may be -inf).
SobolevLadder sobolev_norms_log(int n, double lambda, const std::vector<double>& log_modulus, int M);

/// ||L_delta^m f||^2 = sum_k (2k + delta + 1)^{2m} c_k^delta |coeff_k|^2 in L^2(r^{2 delta + 1} dr),
/// with coeff_k = int f psi_k^delta r^{2 delta + 1} dr.
SobolevLadder laguerre_sobolev_norms(const std::vector<double>& coefficients, double delta, int M);

enum class CarlemanClass { divergent, convergent, inconclusive };

const char* to_string(CarlemanClass c);

struct CarlemanVerdict {
    std::vector<double> partial_sums;  ///< sum_{m' <= m} 1 / roots_{m'}
    double growth_exponent = 0.0;      ///< slope of log roots against log m over the upper half
    double divergent_margin = 1.05;
    double convergent_margin = 1.25;
    CarlemanClass classification = CarlemanClass::inconclusive;
    std::string reason;
};

/// alpha <= 1.05 divergent, alpha >= 1.25 convergent, otherwise (or with fewer than
/// ten usable m, or a tail-dominated ladder) inconclusive.
CarlemanVerdict carleman_sum(const SobolevLadder& ladder);

/// Smallest second difference of log norms over consecutive usable m.
double log_convexity_defect(const SobolevLadder& ladder);
/// True when roots never decrease by more than `slack` relative over usable m.
bool roots_nondecreasing(const SobolevLadder& ladder, double slack = 1e-12);

enum class SyntheticProfile { single_mode, heat, poisson, polynomial };

const char* to_string(SyntheticProfile p);
/// "single_mode", "heat", "poisson" or "polynomial"; throws otherwise.
SyntheticProfile synthetic_profile(const std::string& name);

/// log |R_k| for k = 0..k_max: single mode (k == k0 gives 0), heat -mu_k,
/// Poisson -sqrt(mu_k), polynomial -s log mu_k. `param` is k0 or s.
std::vector<double> synthetic_log_coefficients(SyntheticProfile profile, int n, double lambda, int k_max,
                                               double param = 0.0);
/// log |R_k| = -Theta(sqrt mu_k) sqrt mu_k, the extremal profile of the decay hypothesis.
std::vector<double> theta_decay_log_coefficients(const ThetaFunction& theta, int n, double lambda, int k_max);

/// Laplace-method leading terms: heat m/e, Poisson 4 m^2 / e^2.
double heat_root_oracle(int m);
double poisson_root_oracle(int m);

struct GrowthBoundReport {
    std::string theta_label;
    double lambda = 0.0;
    std::vector<int> m_values;
    std::vector<double> log_ratio;  ///< log((2 pi)^n ||L^m f||^2 / (|lambda| (2m / Theta(m^4))^{4m}))
    double fitted_C = 0.0;          ///< sup ratio over m <= M
    double fitted_C_half = 0.0;     ///< sup ratio over m <= M/2
    bool finite = false;
    bool stable = false;            ///< the two constants differ by less than 10%
    bool pass = false;
    bool tail_dominated = false;
};

/// Compares the ladder of a decay-profile slice with C |lambda| (2m / Theta(m^4))^{4m}.
GrowthBoundReport theta_growth_bound_check(const SobolevLadder& ladder, int n, const ThetaFunction& theta);

struct IntegralTestLink {
    std::vector<long long> M_values;  ///< 10, 100, ..., M_max
    std::vector<double> partial_sums; ///< sum_{m <= M} Theta(m^4)/m
    std::vector<double> integrals;    ///< int_1^M Theta(x^4)/x dx
    bool bracket_ok = false;          ///< int_1^{M+1} <= S(M) <= Theta(1) + int_1^M at every M
    bool increasing = false;
    IntegralClass series_class = IntegralClass::unknown;  ///< numeric class of Theta(x^4)
    bool divergent = false;
};

/// Partial sums of sum_m Theta(m^4)/m at every decade up to M_max (at least 1e3).
IntegralTestLink integral_test_link(const ThetaFunction& theta, long long M_max = 1000000);

/// CSV with header m,log_norm,root,partial_sum.
void write_ladder_csv(const SobolevLadder& ladder, const CarlemanVerdict& verdict, const std::filesystem::path& path);

}  // namespace heis
