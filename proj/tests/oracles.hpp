#pragma once

// Independent brute-force references used only by the tests. Nothing here
// calls into the FFT path.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "loschmidt/quantum_core.hpp"

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;

inline std::vector<cplx> random_state(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  double s = 0.0;
  for (auto& a : v) {
    a = {g(gen), g(gen)};
    s += std::norm(a);
  }
  for (auto& a : v) a /= std::sqrt(s);
  return v;
}

// O(N^2) unitary DFT, sign -1 for position -> momentum.
inline std::vector<cplx> direct_dft(const std::vector<cplx>& in, int sign) {
  const std::size_t n = in.size();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx s{0.0, 0.0};
    for (std::size_t l = 0; l < n; ++l)
      s += in[l] * std::polar(1.0, sign * 2.0 * kPi * static_cast<double>(k * l % n) / static_cast<double>(n));
    out[k] = s / std::sqrt(static_cast<double>(n));
  }
  return out;
}

// Floquet matrix written straight from the closed-form element, with the
// phases evaluated in long double and no shared helpers.
inline Eigen::MatrixXcd floquet_matrix(std::size_t n, double K) {
  Eigen::MatrixXcd U(n, n);
  const long double N = static_cast<long double>(n);
  const long double pi = 3.141592653589793238462643383279502884L;
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t lp = 0; lp < n; ++lp) {
      const long double m = static_cast<long double>(l) - static_cast<long double>(lp);
      const long double ph = pi * m * m / N - N * K * std::cos(2 * pi * static_cast<long double>(lp) / N) / (2 * pi);
      U(l, lp) = std::polar(1.0, static_cast<double>(std::fmod(ph, 2 * pi))) / std::sqrt(static_cast<double>(n));
    }
  return U;
}

// M(n) for n = 0..n_max by explicit matrix powers.
inline std::vector<double> fidelity_trace(std::size_t n, double K0, double dK, const Eigen::VectorXcd& psi0,
                                          std::size_t n_max) {
  const Eigen::MatrixXcd U0 = floquet_matrix(n, K0);
  const Eigen::MatrixXcd U1 = floquet_matrix(n, K0 + dK);
  const Eigen::MatrixXcd echo_step = U1.adjoint();
  std::vector<double> m(n_max + 1);
  Eigen::MatrixXcd forward = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd backward = Eigen::MatrixXcd::Identity(n, n);
  for (std::size_t k = 0; k <= n_max; ++k) {
    const cplx amp = psi0.dot(backward * forward * psi0);
    m[k] = std::norm(amp);
    forward = U0 * forward;
    backward = backward * echo_step;
  }
  return m;
}

}  // namespace oracle
