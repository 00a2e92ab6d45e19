#include "loschmidt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/tools/minima.hpp>
#include <Eigen/Eigenvalues>

#include "loschmidt/errors.hpp"
#include "loschmidt/estimation.hpp"

namespace loschmidt {

double wrap_phase(double phase) {
  double r = std::remainder(phase, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

QuasiSpectrum diagonalize_unitary(const Eigen::MatrixXcd& U) {
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(U, true);
  if (schur.info() != Eigen::Success) throw NumericalError("complex Schur decomposition did not converge");
  const auto& T = schur.matrixT();
  const Eigen::Index n = T.rows();
  QuasiSpectrum out;
  out.eigenphases.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> ev = T(i, i);
    out.max_modulus_error = std::max(out.max_modulus_error, std::abs(std::abs(ev) - 1.0));
    out.eigenphases(i) = wrap_phase(std::arg(ev));
    for (Eigen::Index j = i + 1; j < n; ++j) out.max_offdiagonal = std::max(out.max_offdiagonal, std::abs(T(i, j)));
  }
  if (out.max_modulus_error > 1e-8)
    throw NumericalError("eigenvalue modulus deviates from 1 by " + std::to_string(out.max_modulus_error));
  out.eigenvectors = schur.matrixU();
  return out;
}

QuasiSpectrum diagonalize_floquet(const SystemParams& params, Kick which, std::size_t dense_limit) {
  return diagonalize_unitary(dense_floquet_matrix(params, which, dense_limit));
}

double SpectralDensity::integral() const {
  double s = 0.0;
  for (double r : rho) s += r * bin_width;
  return s;
}

SpectralDensity spectral_density(const QuasiSpectrum& unperturbed, const QuasiSpectrum& perturbed,
                                 std::size_t n_bins) {
  if (n_bins < 1) throw InvalidArgument("need at least one bin");
  const Eigen::Index n = unperturbed.eigenvectors.cols();
  if (perturbed.eigenvectors.cols() != n) throw InvalidArgument("spectra of different dimension");

  // overlap(beta, alpha) = <phi0_beta | phi_alpha>
  const Eigen::MatrixXd weights = (unperturbed.eigenvectors.adjoint() * perturbed.eigenvectors).cwiseAbs2();

  SpectralDensity out;
  out.bin_width = kTwoPi / static_cast<double>(n_bins);
  out.bin_centers.resize(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i)
    out.bin_centers[i] = -std::numbers::pi + (static_cast<double>(i) + 0.5) * out.bin_width;
  std::vector<double> mass(n_bins, 0.0);
  out.weight_sums.assign(static_cast<std::size_t>(n), 0.0);

  for (Eigen::Index beta = 0; beta < n; ++beta) {
    double sum = 0.0;
    for (Eigen::Index alpha = 0; alpha < n; ++alpha) {
      const double w = weights(beta, alpha);
      sum += w;
      const double eps = wrap_phase(perturbed.eigenphases(alpha) - unperturbed.eigenphases(beta));
      auto bin = static_cast<std::ptrdiff_t>(std::floor((eps + std::numbers::pi) / out.bin_width));
      bin = std::clamp<std::ptrdiff_t>(bin, 0, static_cast<std::ptrdiff_t>(n_bins) - 1);
      mass[static_cast<std::size_t>(bin)] += w;
    }
    out.weight_sums[static_cast<std::size_t>(beta)] = sum;
  }
  double total = 0.0;
  for (double m : mass) total += m;
  out.rho.resize(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i) out.rho[i] = mass[i] / (total * out.bin_width);
  return out;
}

SpectralDensity local_spectral_density(const SystemParams& params, std::size_t n_bins, std::size_t dense_limit) {
  const QuasiSpectrum s0 = diagonalize_floquet(params, Kick::unperturbed, dense_limit);
  const QuasiSpectrum s1 = diagonalize_floquet(params, Kick::perturbed, dense_limit);
  SpectralDensity out = spectral_density(s0, s1, n_bins);
  try {
    const LorentzianFit fit = fit_lorentzian(out);
    out.fitted_gamma = fit.gamma;
    out.fit_residual = fit.residual;
    out.fit_resolved = fit.resolved;
  } catch (const FitError&) {
    out.fitted_gamma = 0.0;
    out.fit_residual = std::numeric_limits<double>::infinity();
    out.fit_resolved = false;
  }
  return out;
}

double wrapped_lorentzian_cdf(double gamma, double eps) {
  // Wrapped Cauchy with scale gamma/2: coth(gamma/4) = (1 + r)/(1 - r), r = exp(-gamma/2).
  const double coth = 1.0 / std::tanh(0.25 * gamma);
  return 0.5 + std::atan(coth * std::tan(0.5 * eps)) / std::numbers::pi;
}

double lorentzian_bin_average(double gamma, double lo, double hi) {
  return (wrapped_lorentzian_cdf(gamma, hi) - wrapped_lorentzian_cdf(gamma, lo)) / (hi - lo);
}

LorentzianFit fit_lorentzian(const SpectralDensity& density) {
  const std::size_t n = density.rho.size();
  if (n < 3 || density.bin_centers.size() != n || !(density.bin_width > 0.0))
    throw InvalidArgument("density needs at least 3 bins with matching centers");
  if (std::abs(density.integral() - 1.0) > 1e-6) throw InvalidArgument("density is not normalized");
  const double bw = density.bin_width;

  // Half-maximum width estimate around the peak.
  const auto peak_it = std::max_element(density.rho.begin(), density.rho.end());
  const auto peak = static_cast<std::size_t>(peak_it - density.rho.begin());
  const double half = 0.5 * *peak_it;
  if (!(half > 0.0)) throw FitError("density is identically zero");
  auto crossing = [&](int dir) {
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(peak);
    while (true) {
      const std::ptrdiff_t j = i + dir;
      if (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) return density.bin_centers[static_cast<std::size_t>(i)];
      const double rj = density.rho[static_cast<std::size_t>(j)];
      if (rj < half) {
        const double ri = density.rho[static_cast<std::size_t>(i)];
        const double f = (ri - half) / (ri - rj);
        return density.bin_centers[static_cast<std::size_t>(i)] + dir * f * bw;
      }
      i = j;
    }
  };
  const double estimate = std::max(crossing(+1) - crossing(-1), bw);
  const double window = std::min(std::numbers::pi / 2.0, 20.0 * estimate);

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(density.bin_centers[i]) <= window) idx.push_back(i);
  if (idx.size() < 3) throw FitError("fewer than 3 bins inside the fit window");

  double norm2 = 0.0;
  for (std::size_t i : idx) norm2 += density.rho[i] * density.rho[i];
  auto sse = [&](double log_gamma) {
    const double g = std::exp(log_gamma);
    double s = 0.0;
    for (std::size_t i : idx) {
      const double c = density.bin_centers[i];
      const double r = density.rho[i] - lorentzian_bin_average(g, c - 0.5 * bw, c + 0.5 * bw);
      s += r * r;
    }
    return s;
  };

  const double lo = std::log(bw / 50.0);
  const double hi = std::log(kTwoPi);
  // Coarse scan picks the basin, Brent refines it.
  constexpr int kScan = 200;
  double best = lo;
  double best_val = sse(lo);
  for (int k = 1; k <= kScan; ++k) {
    const double lg = lo + (hi - lo) * k / kScan;
    const double v = sse(lg);
    if (v < best_val) {
      best_val = v;
      best = lg;
    }
  }
  const double step = (hi - lo) / kScan;
  const auto [log_gamma, min_sse] = boost::math::tools::brent_find_minima(
      sse, std::max(lo, best - step), std::min(hi, best + step), 52);

  LorentzianFit fit;
  fit.gamma = std::exp(log_gamma);
  fit.residual = std::sqrt(min_sse / norm2);
  fit.window = window;
  fit.resolved = fit.gamma >= bw;
  if (log_gamma >= hi - 1e-6) throw FitError("Lorentzian width runs into the bandwidth; shape is not Lorentzian");
  return fit;
}

ScalingFit gamma_scaling_fit(std::span<const WidthSample> samples) {
  if (samples.size() < 3) throw InvalidArgument("width scaling fit needs at least 3 samples");
  std::vector<double> x, y;
  for (const auto& s : samples) {
    x.push_back(s.dK * static_cast<double>(s.N));
    y.push_back(s.gamma);
  }
  const FitResult f = fit_powerlaw(x, y);
  return {f.prefactor, f.rate_or_exponent, f.residual};
}

}  // namespace loschmidt
