#pragma once

// Classical standard map on the 2 pi torus, the limit of the kicked rotator:
//   p' = p + K sin x,  x' = x + p'   (both mod 2 pi).

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace loschmidt {

struct PhasePoint {
  double x = 0.0;
  double p = 0.0;
};

double wrap_angle(double v);  // into [0, 2 pi)

PhasePoint standard_map_step(PhasePoint point, double K);

// Row-major Jacobian d(x', p')/d(x, p) of the kick-then-drift step.
std::array<double, 4> standard_map_jacobian(PhasePoint point, double K);

// ln(K/2). Throws InvalidArgument for K <= 0; the form is only accurate for
// K > 7, see analytic_lyapunov_valid.
double analytic_lyapunov(double K);
constexpr bool analytic_lyapunov_valid(double K) { return K > 7.0; }

struct LyapunovEstimate {
  double lambda_mean = 0.0;
  double lambda_std = 0.0;
  std::size_t t = 0;
  std::size_t n_traj = 0;
};

// Finite-time exponent of each of n_traj trajectories over t steps.
// Trajectory i starts from a point and tangent direction drawn from (seed, i).
std::vector<double> finite_time_exponents(double K, std::size_t t, std::size_t n_traj, std::uint64_t seed,
                                          unsigned threads = 1);

LyapunovEstimate benettin_lyapunov(double K, std::size_t t, std::size_t n_traj, std::uint64_t seed,
                                   unsigned threads = 1);

// Annealed exponent -(1/t) ln < exp(-lambda_i t) >.
double effective_decay_exponent(std::span<const double> exponents, std::size_t t);
double effective_decay_exponent(double K, std::size_t t, std::size_t n_traj, std::uint64_t seed,
                                unsigned threads = 1);

}  // namespace loschmidt
