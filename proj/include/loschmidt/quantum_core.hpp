#pragma once

// Torus-quantized kicked rotator.
//
// Grids: x_l = 2*pi*l/N and p_l = 2*pi*l/N, l = 0..N-1, hbar_eff = 1/N.
// One period of the unperturbed map is U = G * V(K) where V(K) is the
// diagonal kick exp[-i N K cos(x_l) / (2 pi)] and G is the circulant free
// propagator with position-space element N^{-1/2} exp[i pi (l-l')^2 / N].
// In momentum space G is diagonal with eigenvalue
// exp(i pi/4) * exp(-i pi k^2 / N) (quadratic Gauss sum, N even).

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace loschmidt {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr std::size_t kDefaultDenseLimit = 4096;

struct SystemParams {
  std::size_t N = 0;
  double K0 = 0.0;
  double dK = 0.0;
  double hbar_eff = 0.0;  // 1/N
  double Delta = 0.0;     // level spacing B * hbar_eff
  double B = kTwoPi;      // bandwidth of the quasienergy circle

  double kick_strength(bool perturbed) const { return perturbed ? K0 + dK : K0; }
};

// Throws InvalidArgument for N < 2, odd N, K0 <= 0 or dK < 0.
SystemParams make_params(std::size_t N, double K0, double dK);

enum class Representation { position, momentum };
enum class Kick { unperturbed, perturbed };
enum class Direction { forward, backward };

class StateVector {
 public:
  StateVector() = default;
  StateVector(std::vector<cplx> amplitudes, Representation rep)
      : amplitudes_(std::move(amplitudes)), rep_(rep) {}

  std::size_t size() const { return amplitudes_.size(); }
  Representation rep() const { return rep_; }
  std::span<const cplx> amplitudes() const { return amplitudes_; }
  std::span<cplx> amplitudes() { return amplitudes_; }
  const cplx& operator[](std::size_t i) const { return amplitudes_[i]; }
  cplx& operator[](std::size_t i) { return amplitudes_[i]; }

  double norm() const;
  // <this|other>, both must share a representation.
  cplx inner(const StateVector& other) const;

 private:
  std::vector<cplx> amplitudes_;
  Representation rep_ = Representation::position;
};

// Gaussian packet centred at (x0, p0) on the torus. `width` is the
// standard deviation of the amplitude envelope exp[-d^2 / (2 width^2)].
struct WavepacketSpec {
  double x0 = 0.0;
  double p0 = 0.0;
  double width = 0.0;
};

double default_width(const SystemParams& params);
WavepacketSpec make_wavepacket(const SystemParams& params, double x0, double p0);
void validate(const WavepacketSpec& spec);

StateVector build_coherent_state(const SystemParams& params, const WavepacketSpec& spec);
StateVector position_delta(std::size_t N, std::size_t site);

// Unitary DFT with 1/sqrt(N) normalization.
StateVector to_momentum(const StateVector& state);
StateVector to_position(const StateVector& state);

// Per-site phase factors shared by the split-step and dense paths.
cplx kick_factor(const SystemParams& params, double K, std::size_t l);
cplx kinetic_factor(std::size_t N, std::size_t k);
cplx free_propagator_element(std::size_t N, std::ptrdiff_t l, std::ptrdiff_t lp);

namespace detail {
class FftEngine;
}

// Split-step Floquet evolution bound to one SystemParams. Owns FFT plans and
// aligned scratch memory; not shareable between threads, construct one per
// worker. Results do not depend on which instance performs the step.
class FloquetPropagator {
 public:
  explicit FloquetPropagator(const SystemParams& params);
  ~FloquetPropagator();
  FloquetPropagator(FloquetPropagator&&) noexcept;
  FloquetPropagator& operator=(FloquetPropagator&&) noexcept;
  FloquetPropagator(const FloquetPropagator&) = delete;
  FloquetPropagator& operator=(const FloquetPropagator&) = delete;

  const SystemParams& params() const { return params_; }

  // In-place one-period step on position amplitudes.
  void step(std::span<cplx> psi, Kick which, Direction direction);
  void step(StateVector& state, Kick which, Direction direction);

 private:
  SystemParams params_;
  std::vector<cplx> kick0_;
  std::vector<cplx> kick1_;
  std::vector<cplx> kinetic_;  // includes the 1/N of the inverse FFT
  std::unique_ptr<detail::FftEngine> fft_;
};

StateVector apply_floquet(const StateVector& state, const SystemParams& params, Kick which,
                          Direction direction);

using UnitaryMatrix = Eigen::MatrixXcd;

// Position-space Floquet matrix with entries
//   N^{-1/2} exp[i pi (l-l')^2/N] exp[-i N K cos(2 pi l'/N) / (2 pi)].
UnitaryMatrix dense_floquet_matrix(const SystemParams& params, Kick which,
                                   std::size_t dense_limit = kDefaultDenseLimit);

Eigen::VectorXcd to_eigen(const StateVector& state);
StateVector from_eigen(const Eigen::VectorXcd& v, Representation rep = Representation::position);

}  // namespace loschmidt
