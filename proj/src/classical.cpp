#include "loschmidt/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "loschmidt/counter_rng.hpp"
#include "loschmidt/errors.hpp"
#include "loschmidt/parallel.hpp"
#include "loschmidt/quantum_core.hpp"

namespace loschmidt {

double wrap_angle(double v) {
  double r = std::fmod(v, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r >= kTwoPi ? 0.0 : r;
}

namespace {

// sin on [0, 2 pi) reflected about the double nearest pi, so sin(pi) is exactly 0
// and (pi, 0) stays a fixed point. The reflections are exact subtractions.
double torus_sin(double x) {
  constexpr double pi = kTwoPi / 2.0;
  if (x < pi / 2.0) return std::sin(x);
  if (x < 1.5 * pi) return std::sin(pi - x);
  return -std::sin(kTwoPi - x);
}

}  // namespace

PhasePoint standard_map_step(PhasePoint point, double K) {
  const double p = wrap_angle(point.p + K * torus_sin(wrap_angle(point.x)));
  return {wrap_angle(point.x + p), p};
}

std::array<double, 4> standard_map_jacobian(PhasePoint point, double K) {
  const double kc = K * std::cos(point.x);
  return {1.0 + kc, 1.0, kc, 1.0};
}

double analytic_lyapunov(double K) {
  if (!(K > 0.0)) throw InvalidArgument("kick strength must be positive");
  return std::log(K / 2.0);
}

std::vector<double> finite_time_exponents(double K, std::size_t t, std::size_t n_traj, std::uint64_t seed,
                                          unsigned threads) {
  if (t < 1) throw InvalidArgument("trajectory length must be positive");
  if (n_traj < 1) throw InvalidArgument("need at least one trajectory");
  const CounterRng rng(seed, /*stream=*/1);
  std::vector<double> out(n_traj);
  parallel_for(
      n_traj, threads, [](unsigned) { return 0; },
      [&](int, std::size_t i) {
        const auto c = 3 * static_cast<std::uint64_t>(i);
        PhasePoint pt{kTwoPi * rng.uniform(c), kTwoPi * rng.uniform(c + 1)};
        const double angle = kTwoPi * rng.uniform(c + 2);
        double dx = std::cos(angle);
        double dp = std::sin(angle);
        double log_growth = 0.0;
        for (std::size_t s = 0; s < t; ++s) {
          const auto J = standard_map_jacobian(pt, K);
          const double nx = J[0] * dx + J[1] * dp;
          const double np = J[2] * dx + J[3] * dp;
          const double len = std::hypot(nx, np);
          log_growth += std::log(len);
          dx = nx / len;
          dp = np / len;
          pt = standard_map_step(pt, K);
        }
        out[i] = log_growth / static_cast<double>(t);
      });
  return out;
}

LyapunovEstimate benettin_lyapunov(double K, std::size_t t, std::size_t n_traj, std::uint64_t seed,
                                   unsigned threads) {
  const auto ex = finite_time_exponents(K, t, n_traj, seed, threads);
  LyapunovEstimate est;
  est.t = t;
  est.n_traj = n_traj;
  est.lambda_mean = std::accumulate(ex.begin(), ex.end(), 0.0) / static_cast<double>(ex.size());
  if (ex.size() > 1) {
    double ss = 0.0;
    for (double e : ex) ss += (e - est.lambda_mean) * (e - est.lambda_mean);
    est.lambda_std = std::sqrt(ss / static_cast<double>(ex.size() - 1));
  }
  return est;
}

double effective_decay_exponent(std::span<const double> exponents, std::size_t t) {
  if (exponents.empty()) throw InvalidArgument("no exponents to average");
  if (t < 1) throw InvalidArgument("time must be positive");
  const double T = static_cast<double>(t);
  // log-mean-exp of -lambda_i t, shifted by the largest term.
  double top = -std::numeric_limits<double>::infinity();
  for (double e : exponents) top = std::max(top, -e * T);
  double s = 0.0;
  for (double e : exponents) s += std::exp(-e * T - top);
  const double log_mean = top + std::log(s / static_cast<double>(exponents.size()));
  return -log_mean / T;
}

double effective_decay_exponent(double K, std::size_t t, std::size_t n_traj, std::uint64_t seed, unsigned threads) {
  const auto ex = finite_time_exponents(K, t, n_traj, seed, threads);
  return effective_decay_exponent(ex, t);
}

}  // namespace loschmidt
