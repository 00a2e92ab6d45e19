#include "loschmidt/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "loschmidt/errors.hpp"

namespace loschmidt {

void validate(const TheoryParams& p) {
  if (!(p.lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  if (!(p.gamma >= 0.0)) throw InvalidArgument("gamma must be nonnegative");
  if (!(p.hbar_eff > 0.0 && p.hbar_eff <= 1.0)) throw InvalidArgument("hbar_eff must lie in (0, 1]");
  if (!(p.B > 0.0)) throw InvalidArgument("bandwidth must be positive");
  if (p.d < 1) throw InvalidArgument("d must be a positive integer");
  if (!(p.alpha0 > 0.0)) throw InvalidArgument("alpha0 must be positive");
  if (!(p.c4 > 0.0)) throw InvalidArgument("c4 must be positive");
  if (std::abs(p.Delta - p.B * p.hbar_eff) > 1e-12) throw InvalidArgument("Delta must equal B * hbar_eff");
}

TheoryParams make_theory_params(double lambda, double gamma, double hbar_eff, double B, int d, double alpha0,
                                double c4) {
  TheoryParams p;
  p.lambda = lambda;
  p.gamma = gamma;
  p.hbar_eff = hbar_eff;
  p.B = B;
  p.Delta = B * hbar_eff;
  p.d = d;
  p.c4 = c4;
  p.alpha0 = 1.0;
  if (alpha0 > 0.0) {
    p.alpha0 = alpha0;
  } else {
    validate(p);
    p.alpha0 = default_alpha0(p);
  }
  validate(p);
  return p;
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::weak: return "weak";
    case Regime::golden_rule: return "golden_rule";
    case Regime::strong: return "strong";
  }
  return "unknown";
}

Regime classify_regime(const TheoryParams& p) {
  if (p.gamma < p.Delta) return Regime::weak;
  if (p.gamma <= p.B) return Regime::golden_rule;
  return Regime::strong;
}

double gamma_from_dk(const SystemParams& params, double prefactor) {
  const double x = params.dK * static_cast<double>(params.N);
  return prefactor * x * x;
}

double ehrenfest_time(const TheoryParams& p) {
  if (!(p.lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  return std::log(1.0 / p.hbar_eff) / p.lambda;
}

double mean_fidelity(const TheoryParams& p, double t, double sigma2_onset) {
  if (!(t >= 0.0)) throw InvalidArgument("time must be nonnegative");
  switch (classify_regime(p)) {
    case Regime::weak: {
      const double s2 = sigma2_onset > 0.0 ? sigma2_onset : p.gamma * p.Delta / p.hbar_eff;
      return std::exp(-s2 * t * t);
    }
    case Regime::golden_rule:
      return std::max(std::exp(-std::min(p.gamma, p.lambda) * t), p.hbar_eff);
    case Regime::strong:
      return std::exp(-p.B * p.B * t * t);
  }
  return 0.0;
}

VarianceTerms variance_terms(const TheoryParams& p, double t) {
  if (!(t > 0.0)) throw InvalidArgument("variance prediction needs t > 0");
  const double alpha = p.alpha0 * std::pow(t, -p.d);
  const bool ergodic = t >= ehrenfest_time(p);
  VarianceTerms v;
  v.lyapunov = alpha * alpha * std::exp(-2.0 * p.lambda * t);
  v.mixed = 2.0 * alpha * std::exp(-(p.lambda + p.gamma) * t);
  v.golden = ergodic ? 2.0 * p.hbar_eff * std::exp(-p.gamma * t) : 0.0;
  v.ergodic = ergodic ? p.hbar_eff * p.hbar_eff : 0.0;
  v.total = v.lyapunov + v.mixed + v.golden + v.ergodic;
  return v;
}

double variance_prediction(const TheoryParams& p, double t) { return variance_terms(p, t).total; }

double short_time_variance(const TheoryParams& p, double t) {
  const double gb = p.gamma * p.B;
  return p.c4 * gb * gb * t * t * t * t;
}

CriticalTime critical_time(const TheoryParams& p) {
  validate(p);
  CriticalTime out;
  if (p.gamma > 0.0) {
    out.leading = std::pow(p.alpha0 / (std::sqrt(p.c4) * p.gamma * p.B), 1.0 / (2.0 + p.d));
    out.first_order = out.leading * (1.0 - p.lambda * out.leading / (2.0 + p.d));
  }
  const double upper = 10.0 * ehrenfest_time(p);
  if (!(upper > 0.0) || !(p.gamma > 0.0))
    throw NoRootError("no crossing of the quartic onset and the semiclassical variance: empty search range");

  auto excess = [&](double t) { return short_time_variance(p, t) - variance_prediction(p, t); };

  // The semiclassical branch diverges as t -> 0, so the excess starts
  // negative; scan a log grid for the first sign change, then bisect.
  constexpr int kGrid = 4000;
  const double lo_end = upper * 1e-12;
  const double ratio = std::pow(upper / lo_end, 1.0 / kGrid);
  double a = lo_end;
  if (excess(a) >= 0.0) throw NoRootError("quartic onset already exceeds the semiclassical variance at t -> 0");
  double b = 0.0;
  bool found = false;
  for (int i = 1; i <= kGrid; ++i) {
    const double t = (i == kGrid) ? upper : lo_end * std::pow(ratio, i);
    if (excess(t) >= 0.0) {
      b = t;
      found = true;
      break;
    }
    a = t;
  }
  if (!found)
    throw NoRootError("quartic onset and semiclassical variance do not cross in (0, " + std::to_string(upper) + "]");
  for (int it = 0; it < 200 && (b - a) > 1e-15 * b; ++it) {
    const double m = 0.5 * (a + b);
    (excess(m) >= 0.0 ? b : a) = m;
  }
  out.numeric = 0.5 * (a + b);
  return out;
}

PeakVariance peak_variance(const TheoryParams& p) {
  const CriticalTime tc = critical_time(p);
  PeakVariance out;
  out.t_c = tc.numeric;
  out.unclamped = short_time_variance(p, tc.numeric);
  const double mean = mean_fidelity(p, tc.numeric);
  out.bound = std::min(1.0, mean * mean);
  out.value = std::min(out.unclamped, out.bound);

  const double x = p.alpha0 / (std::sqrt(p.c4) * p.gamma * p.B);
  const double gb = p.gamma * p.B;
  const double e = 1.0 / (2.0 + p.d);
  out.large_gamma_branch = p.c4 * gb * gb * std::pow(x, 4.0 * e) * (1.0 - 4.0 * p.lambda * e * std::pow(x, e));
  out.small_gamma_branch =
      2.0 * p.hbar_eff * (1.0 - std::pow(2.0 * p.hbar_eff, 0.25) * std::sqrt(p.gamma / p.B));
  return out;
}

double default_alpha0(const TheoryParams& p, double c_alpha) {
  if (!(p.gamma > 0.0) || !(p.lambda > 0.0)) throw InvalidArgument("default alpha0 needs gamma > 0 and lambda > 0");
  return c_alpha * std::pow(p.gamma * p.lambda, -0.5 * p.d);
}

double fit_alpha0(std::span<const double> times, std::span<const double> variance, std::pair<double, double> window,
                  double lambda, int d) {
  if (times.size() != variance.size()) throw InvalidArgument("times and variance differ in length");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (t < window.first || t > window.second) continue;
    if (!(t > 0.0) || !(variance[i] > 0.0)) throw InvalidArgument("alpha0 fit needs positive times and variances");
    sum += 0.5 * (std::log(variance[i]) + 2.0 * d * std::log(t) + 2.0 * lambda * t);
    ++n;
  }
  if (n == 0) throw FitError("no points in the alpha0 fit window");
  return std::exp(sum / static_cast<double>(n));
}

}  // namespace loschmidt
