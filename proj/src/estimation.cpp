#include "loschmidt/estimation.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "loschmidt/errors.hpp"

namespace loschmidt {

LineFit fit_line(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw InvalidArgument("fit inputs differ in length");
  const std::size_t n = u.size();
  if (n < 2) throw FitError("line fit needs at least two points");
  double mu = 0.0, mv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mu += u[i];
    mv += v[i];
  }
  mu /= static_cast<double>(n);
  mv /= static_cast<double>(n);
  double suu = 0.0, suv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    suv += (u[i] - mu) * (v[i] - mv);
  }
  if (!(suu > 0.0)) throw FitError("abscissae are all equal");
  LineFit f;
  f.slope = suv / suu;
  f.intercept = mv - f.slope * mu;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = v[i] - (f.intercept + f.slope * u[i]);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / static_cast<double>(n));
  return f;
}

FitResult fit_exponential(std::span<const double> times, std::span<const double> values,
                          std::pair<double, double> window) {
  if (times.size() != values.size()) throw InvalidArgument("times and values differ in length");
  if (!(window.first < window.second)) throw InvalidArgument("fit window must satisfy t_lo < t_hi");
  std::vector<double> t, lv;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < window.first || times[i] > window.second) continue;
    if (!(values[i] > 0.0))
      throw InvalidArgument("nonpositive value " + std::to_string(values[i]) + " at t=" + std::to_string(times[i]));
    t.push_back(times[i]);
    lv.push_back(std::log(values[i]));
  }
  if (t.size() < 4) throw InvalidArgument("exponential fit needs at least 4 points in the window");
  const LineFit line = fit_line(t, lv);
  FitResult r;
  r.rate_or_exponent = -line.slope;
  r.prefactor = std::exp(line.intercept);
  r.residual = line.rms;
  r.window = window;
  r.n_points = t.size();
  return r;
}

FitResult fit_powerlaw(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("x and y differ in length");
  if (x.size() < 3) throw InvalidArgument("power-law fit needs at least 3 points");
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("power-law fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const LineFit line = fit_line(lx, ly);
  FitResult r;
  r.rate_or_exponent = line.slope;
  r.prefactor = std::exp(line.intercept);
  r.residual = line.rms;
  r.window = {x.front(), x.back()};
  r.n_points = x.size();
  return r;
}

}  // namespace loschmidt
