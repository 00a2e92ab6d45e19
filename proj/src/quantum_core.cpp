#include "loschmidt/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "fft_engine.hpp"
#include "loschmidt/errors.hpp"

namespace loschmidt {

SystemParams make_params(std::size_t N, double K0, double dK) {
  if (N < 2) throw InvalidArgument("N must be at least 2, got " + std::to_string(N));
  // The circulant free propagator N^{-1/2} exp[i pi m^2/N] is periodic in m
  // only for even N.
  if (N % 2 != 0) throw InvalidArgument("N must be even, got " + std::to_string(N));
  if (!(K0 > 0.0) || !std::isfinite(K0)) throw InvalidArgument("K0 must be positive");
  if (!(dK >= 0.0) || !std::isfinite(dK)) throw InvalidArgument("dK must be nonnegative");
  SystemParams p;
  p.N = N;
  p.K0 = K0;
  p.dK = dK;
  p.hbar_eff = 1.0 / static_cast<double>(N);
  p.B = kTwoPi;
  p.Delta = p.B * p.hbar_eff;
  return p;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amplitudes_) s += std::norm(a);
  return std::sqrt(s);
}

cplx StateVector::inner(const StateVector& other) const {
  if (other.rep_ != rep_) throw RepresentationError("inner product across representations");
  if (other.size() != size()) throw InvalidArgument("inner product of states of different size");
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) s += std::conj(amplitudes_[i]) * other.amplitudes_[i];
  return s;
}

double default_width(const SystemParams& params) { return std::sqrt(params.hbar_eff / 2.0); }

WavepacketSpec make_wavepacket(const SystemParams& params, double x0, double p0) {
  return WavepacketSpec{x0, p0, default_width(params)};
}

void validate(const WavepacketSpec& spec) {
  if (!(spec.x0 >= 0.0 && spec.x0 < kTwoPi)) throw InvalidArgument("x0 must lie in [0, 2pi)");
  if (!(spec.p0 >= 0.0 && spec.p0 < kTwoPi)) throw InvalidArgument("p0 must lie in [0, 2pi)");
  if (!(spec.width > 0.0 && spec.width < kTwoPi / 4.0))
    throw InvalidArgument("width must lie in (0, pi/2)");
}

StateVector build_coherent_state(const SystemParams& params, const WavepacketSpec& spec) {
  validate(spec);
  const std::size_t N = params.N;
  const double pi = std::numbers::pi;
  // Momentum p0 in [0, 2pi) maps onto wavenumber N p0 / (2 pi) (hbar = 2 pi/N).
  const double wavenumber = spec.p0 * static_cast<double>(N) / kTwoPi;
  const double two_var = 2.0 * spec.width * spec.width;
  // Images beyond W contribute below 1e-14: the nearest omitted one sits at
  // |d| >= 2 pi (W+1) - pi.
  const double reach = spec.width * std::sqrt(2.0 * std::log(1e14));
  const int W = std::max(0, static_cast<int>(std::ceil((reach + pi) / kTwoPi)) - 1);

  std::vector<cplx> amp(N);
  for (std::size_t l = 0; l < N; ++l) {
    const double x = kTwoPi * static_cast<double>(l) / static_cast<double>(N);
    double d0 = std::remainder(x - spec.x0, kTwoPi);  // in [-pi, pi]
    cplx sum{0.0, 0.0};
    for (int w = -W; w <= W; ++w) {
      const double d = d0 + kTwoPi * w;
      sum += std::polar(std::exp(-d * d / two_var), wavenumber * d);
    }
    amp[l] = sum;
  }
  double n2 = 0.0;
  for (const auto& a : amp) n2 += std::norm(a);
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& a : amp) a *= inv;
  return StateVector(std::move(amp), Representation::position);
}

StateVector position_delta(std::size_t N, std::size_t site) {
  if (site >= N) throw InvalidArgument("site index out of range");
  std::vector<cplx> amp(N, cplx{0.0, 0.0});
  amp[site] = 1.0;
  return StateVector(std::move(amp), Representation::position);
}

namespace {

StateVector unitary_dft(const StateVector& state, bool forward) {
  const std::size_t N = state.size();
  std::vector<cplx> out(state.amplitudes().begin(), state.amplitudes().end());
  detail::FftEngine fft(N);
  if (forward)
    fft.forward(out.data());
  else
    fft.backward(out.data());
  const double s = 1.0 / std::sqrt(static_cast<double>(N));
  for (auto& a : out) a *= s;
  return StateVector(std::move(out), forward ? Representation::momentum : Representation::position);
}

// exp(i pi r / N) for r = m^2 mod 2N, keeping the argument small.
cplx quadratic_phase(std::size_t N, std::uint64_t m, double sign) {
  const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(N);
  const std::uint64_t r = ((m % two_n) * (m % two_n)) % two_n;
  return std::polar(1.0, sign * std::numbers::pi * static_cast<double>(r) / static_cast<double>(N));
}

}  // namespace

StateVector to_momentum(const StateVector& state) {
  if (state.rep() != Representation::position) throw RepresentationError("to_momentum expects a position-space state");
  return unitary_dft(state, true);
}

StateVector to_position(const StateVector& state) {
  if (state.rep() != Representation::momentum) throw RepresentationError("to_position expects a momentum-space state");
  return unitary_dft(state, false);
}

cplx kick_factor(const SystemParams& params, double K, std::size_t l) {
  const double N = static_cast<double>(params.N);
  const double phase = -N * K * std::cos(kTwoPi * static_cast<double>(l) / N) / kTwoPi;
  return std::polar(1.0, phase);
}

cplx kinetic_factor(std::size_t N, std::size_t k) {
  return std::polar(1.0, std::numbers::pi / 4.0) * quadratic_phase(N, k, -1.0);
}

cplx free_propagator_element(std::size_t N, std::ptrdiff_t l, std::ptrdiff_t lp) {
  const auto m = static_cast<std::uint64_t>(l > lp ? l - lp : lp - l);
  return quadratic_phase(N, m, 1.0) / std::sqrt(static_cast<double>(N));
}

FloquetPropagator::FloquetPropagator(const SystemParams& params)
    : params_(params),
      kick0_(params.N),
      kick1_(params.N),
      kinetic_(params.N),
      fft_(std::make_unique<detail::FftEngine>(params.N)) {
  const double inv_n = 1.0 / static_cast<double>(params.N);
  for (std::size_t l = 0; l < params.N; ++l) {
    kick0_[l] = kick_factor(params, params.kick_strength(false), l);
    kick1_[l] = kick_factor(params, params.kick_strength(true), l);
    kinetic_[l] = kinetic_factor(params.N, l) * inv_n;
  }
}

FloquetPropagator::~FloquetPropagator() = default;
FloquetPropagator::FloquetPropagator(FloquetPropagator&&) noexcept = default;
FloquetPropagator& FloquetPropagator::operator=(FloquetPropagator&&) noexcept = default;

void FloquetPropagator::step(std::span<cplx> psi, Kick which, Direction direction) {
  if (psi.size() != params_.N) throw InvalidArgument("state size does not match N");
  const auto& kick = which == Kick::perturbed ? kick1_ : kick0_;
  const std::size_t N = params_.N;
  if (direction == Direction::forward) {
    for (std::size_t l = 0; l < N; ++l) psi[l] *= kick[l];
    fft_->forward(psi.data());
    for (std::size_t k = 0; k < N; ++k) psi[k] *= kinetic_[k];
    fft_->backward(psi.data());
  } else {
    fft_->forward(psi.data());
    for (std::size_t k = 0; k < N; ++k) psi[k] *= std::conj(kinetic_[k]);
    fft_->backward(psi.data());
    for (std::size_t l = 0; l < N; ++l) psi[l] *= std::conj(kick[l]);
  }
}

void FloquetPropagator::step(StateVector& state, Kick which, Direction direction) {
  if (state.rep() != Representation::position) throw RepresentationError("Floquet step expects a position-space state");
  step(state.amplitudes(), which, direction);
}

StateVector apply_floquet(const StateVector& state, const SystemParams& params, Kick which,
                          Direction direction) {
  StateVector out = state;
  FloquetPropagator prop(params);
  prop.step(out, which, direction);
  return out;
}

UnitaryMatrix dense_floquet_matrix(const SystemParams& params, Kick which, std::size_t dense_limit) {
  const std::size_t N = params.N;
  if (N > dense_limit)
    throw SizeLimitError("dense Floquet matrix requested for N=" + std::to_string(N) +
                         " above the limit " + std::to_string(dense_limit));
  const double K = params.kick_strength(which == Kick::perturbed);
  std::vector<cplx> kick(N);
  for (std::size_t l = 0; l < N; ++l) kick[l] = kick_factor(params, K, l);
  // G depends only on |l - l'|.
  std::vector<cplx> g(N);
  for (std::size_t m = 0; m < N; ++m) g[m] = free_propagator_element(N, static_cast<std::ptrdiff_t>(m), 0);
  UnitaryMatrix U(N, N);
  for (std::size_t lp = 0; lp < N; ++lp)
    for (std::size_t l = 0; l < N; ++l)
      U(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(lp)) = g[l > lp ? l - lp : lp - l] * kick[lp];
  return U;
}

Eigen::VectorXcd to_eigen(const StateVector& state) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(state.size()));
  for (std::size_t i = 0; i < state.size(); ++i) v(static_cast<Eigen::Index>(i)) = state[i];
  return v;
}

StateVector from_eigen(const Eigen::VectorXcd& v, Representation rep) {
  std::vector<cplx> amp(v.data(), v.data() + v.size());
  return StateVector(std::move(amp), rep);
}

}  // namespace loschmidt
