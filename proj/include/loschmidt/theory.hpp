#pragma once

// Closed-form predictions for the mean and variance of the fidelity in a
// chaotic system: regime classification, the four-term semiclassical
// variance, the quartic short-time onset, the critical time where the two
// meet and the peak variance there.

#include <cstddef>
#include <span>
#include <utility>

#include "loschmidt/quantum_core.hpp"

namespace loschmidt {

inline constexpr double kGammaPrefactor = 0.024;

struct TheoryParams {
  double lambda = 0.0;    // Lyapunov exponent, > 0
  double gamma = 0.0;     // golden-rule width, >= 0
  double hbar_eff = 0.0;  // in (0, 1]
  double B = kTwoPi;      // bandwidth
  double Delta = 0.0;     // B * hbar_eff
  int d = 1;              // degrees of freedom
  double alpha0 = 1.0;    // alpha(t) = alpha0 * t^-d
  double c4 = 1.0;        // quartic-onset prefactor
};

// Fills Delta = B * hbar_eff and validates. alpha0 <= 0 selects
// default_alpha0 (which needs gamma > 0).
TheoryParams make_theory_params(double lambda, double gamma, double hbar_eff, double B = kTwoPi, int d = 1,
                                double alpha0 = 0.0, double c4 = 1.0);
void validate(const TheoryParams& p);

enum class Regime { weak, golden_rule, strong };
const char* to_string(Regime r);

// weak: gamma < Delta; golden_rule: Delta <= gamma <= B; strong: gamma > B.
Regime classify_regime(const TheoryParams& p);

// prefactor * (dK * N)^2.
double gamma_from_dk(const SystemParams& params, double prefactor = kGammaPrefactor);

double ehrenfest_time(const TheoryParams& p);

// Average fidelity by regime. sigma2_onset overrides the weak-regime
// Gaussian rate; zero means gamma * Delta / hbar_eff.
double mean_fidelity(const TheoryParams& p, double t, double sigma2_onset = 0.0);

struct VarianceTerms {
  double lyapunov = 0.0;  // alpha^2 exp(-2 lambda t)
  double mixed = 0.0;     // 2 alpha exp(-(lambda + gamma) t)
  double golden = 0.0;    // 2 hbar exp(-gamma t), t >= t_E
  double ergodic = 0.0;   // hbar^2, t >= t_E
  double total = 0.0;
};

// Requires t > 0.
VarianceTerms variance_terms(const TheoryParams& p, double t);
double variance_prediction(const TheoryParams& p, double t);

// c4 * (gamma * B)^2 * t^4.
double short_time_variance(const TheoryParams& p, double t);

struct CriticalTime {
  double numeric = 0.0;      // smallest positive crossing, bisection
  double leading = 0.0;      // (alpha0 / (sqrt(c4) gamma B))^(1/(2+d))
  double first_order = 0.0;  // leading * (1 - lambda * leading / (2+d))
};

// Throws NoRootError if the curves do not cross in (0, 10 t_E].
CriticalTime critical_time(const TheoryParams& p);

struct PeakVariance {
  double t_c = 0.0;
  double unclamped = 0.0;  // short_time_variance(t_c)
  double bound = 0.0;      // min(1, mean_fidelity(t_c)^2)
  double value = 0.0;      // min(unclamped, bound)
  double large_gamma_branch = 0.0;
  double small_gamma_branch = 0.0;
};

PeakVariance peak_variance(const TheoryParams& p);

// c_alpha * (gamma * lambda)^(-d/2).
double default_alpha0(const TheoryParams& p, double c_alpha = 1.0);

// Least-squares alpha0 from variance data in a Lyapunov-dominated window,
// assuming variance ~ alpha0^2 t^-2d exp(-2 lambda t).
double fit_alpha0(std::span<const double> times, std::span<const double> variance,
                  std::pair<double, double> window, double lambda, int d = 1);

}  // namespace loschmidt
