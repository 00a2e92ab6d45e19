#pragma once

// Exact diagonalization of Floquet operators and the local spectral density
// of unperturbed eigenstates over the perturbed eigenbasis.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "loschmidt/quantum_core.hpp"

namespace loschmidt {

struct QuasiSpectrum {
  Eigen::VectorXd eigenphases;   // arg of eigenvalues, in (-pi, pi]
  Eigen::MatrixXcd eigenvectors;  // columns, orthonormal
  double max_modulus_error = 0.0;  // max | |lambda| - 1 |
  double max_offdiagonal = 0.0;    // largest strictly upper Schur entry
};

// Uses the complex Schur form: for a unitary (normal) matrix T is diagonal
// up to rounding and the Schur vectors are orthonormal eigenvectors, also
// across (near-)degenerate eigenphases. Throws NumericalError when the
// solver fails or an eigenvalue is off the unit circle by more than 1e-8.
QuasiSpectrum diagonalize_unitary(const Eigen::MatrixXcd& U);
QuasiSpectrum diagonalize_floquet(const SystemParams& params, Kick which,
                                  std::size_t dense_limit = kDefaultDenseLimit);

double wrap_phase(double phase);  // into (-pi, pi]

inline constexpr std::size_t kDefaultLdosBins = 201;

struct LorentzianFit {
  double gamma = 0.0;     // full width at half maximum
  double residual = 0.0;  // ||rho - model|| / ||rho|| over the fit window
  double window = 0.0;    // fitted |eps| <= window
  bool resolved = false;  // false when gamma is below one bin width
};

struct SpectralDensity {
  std::vector<double> bin_centers;
  std::vector<double> rho;
  double bin_width = 0.0;
  double fitted_gamma = 0.0;
  double fit_residual = 0.0;
  bool fit_resolved = false;
  // Per unperturbed state beta, sum over alpha of |<phi0_beta|phi_alpha>|^2.
  std::vector<double> weight_sums;

  double integral() const;
};

// Histogram only, no fit.
SpectralDensity spectral_density(const QuasiSpectrum& unperturbed, const QuasiSpectrum& perturbed,
                                 std::size_t n_bins = kDefaultLdosBins);

// Diagonalizes both Floquet operators, bins the overlap weights of every
// unperturbed eigenstate at the wrapped phase difference, averages over
// states and fits a Lorentzian (fit failure leaves fitted_gamma at 0).
SpectralDensity local_spectral_density(const SystemParams& params, std::size_t n_bins = kDefaultLdosBins,
                                       std::size_t dense_limit = kDefaultDenseLimit);

// Least squares against bin averages of the unit-area Lorentzian
// (gamma/2pi) / (eps^2 + gamma^2/4), periodized onto the quasienergy circle
// so the model integrates to one over (-pi, pi]. For gamma << 2 pi the
// periodic images are negligible. The window is |eps| <= min(pi/2, 20 w)
// with w the half-maximum width read off the data.
LorentzianFit fit_lorentzian(const SpectralDensity& density);

// Cumulative distribution of the periodized Lorentzian on [-pi, eps].
double wrapped_lorentzian_cdf(double gamma, double eps);

// Average of the periodized Lorentzian density over the bin [lo, hi].
double lorentzian_bin_average(double gamma, double lo, double hi);

struct WidthSample {
  std::size_t N = 0;
  double dK = 0.0;
  double gamma = 0.0;
};

struct ScalingFit {
  double prefactor = 0.0;
  double exponent = 0.0;
  double residual = 0.0;
};

// gamma ~ prefactor * (dK N)^exponent, log-log regression. Needs >= 3 samples.
ScalingFit gamma_scaling_fit(std::span<const WidthSample> samples);

}  // namespace loschmidt
