#pragma once

// Least-squares fits on log-transformed data.

#include <span>
#include <utility>

namespace loschmidt {

struct FitResult {
  double rate_or_exponent = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;  // rms of the log-space residuals
  std::pair<double, double> window{0.0, 0.0};
  std::size_t n_points = 0;
};

// y ~ prefactor * exp(-rate * t) over points with t in [lo, hi] (inclusive).
// Needs at least 4 points in the window, all with y > 0.
FitResult fit_exponential(std::span<const double> times, std::span<const double> values,
                          std::pair<double, double> window);

// y ~ prefactor * x^exponent; at least 3 points, all x > 0 and y > 0.
FitResult fit_powerlaw(std::span<const double> x, std::span<const double> y);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

// Ordinary least squares of v on u.
LineFit fit_line(std::span<const double> u, std::span<const double> v);

}  // namespace loschmidt
