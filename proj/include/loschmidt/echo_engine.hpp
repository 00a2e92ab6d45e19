#pragma once

// Fidelity M(n) = |<psi0| (U_dK^dagger)^n (U_0)^n |psi0>|^2 for single
// coherent states and for ensembles of random initial packets.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "loschmidt/quantum_core.hpp"

namespace loschmidt {

struct FidelityTrace {
  std::vector<double> m;  // m[n], n = 0..n_max
  SystemParams params;
  WavepacketSpec spec;
};

enum class EchoMethod {
  // <U_dK^n psi | U_0^n psi>: one forward pass per copy.
  overlap,
  // Literal forward-then-backward echo, O(n_max^2) steps. Validation only.
  literal,
};

FidelityTrace fidelity_trace(const SystemParams& params, const WavepacketSpec& spec, std::size_t n_max,
                             EchoMethod method = EchoMethod::overlap);

// Same, reusing a caller-owned propagator (hot loop of run_ensemble).
FidelityTrace fidelity_trace(FloquetPropagator& propagator, const WavepacketSpec& spec, std::size_t n_max,
                             EchoMethod method = EchoMethod::overlap);

// Spec i depends only on (seed, i). Widths are left at zero; callers fill
// them in from SystemParams via default_width or their own choice.
std::vector<WavepacketSpec> sample_initial_specs(std::uint64_t seed, std::size_t count);
WavepacketSpec sample_initial_spec(std::uint64_t seed, std::size_t index);

struct Distribution {
  std::vector<double> bin_edges;  // n_bins + 1 edges on [0, 1]
  std::vector<std::size_t> counts;
  std::size_t total = 0;

  double bin_width() const { return bin_edges.size() > 1 ? bin_edges[1] - bin_edges[0] : 0.0; }
  double bin_center(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
  // Normalized so that sum(density) * bin_width == 1.
  std::vector<double> density() const;
};

// Uniform bins on [0, 1]; [a, b) except the last bin, which is closed.
// Samples within 1e-12 of the interval are clamped onto it, anything further
// out is rejected with InvalidArgument.
Distribution histogram_fidelity(std::span<const double> samples, std::size_t n_bins);

struct TimeHistogram {
  std::size_t time = 0;
  Distribution distribution;
};

struct EnsembleResult {
  std::vector<std::size_t> times;
  std::vector<double> mean;
  std::vector<double> variance;  // unbiased, clamped at 0
  std::size_t n_samples = 0;
  std::vector<TimeHistogram> histograms;
  std::uint64_t seed = 0;
};

struct EnsembleOptions {
  std::size_t n_max = 0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> histogram_times;
  std::size_t n_bins = 50;
  unsigned threads = 1;
  // Packet width; zero selects default_width(params).
  double width = 0.0;
  // Every trial uses this packet instead of a random one (testing aid).
  std::optional<WavepacketSpec> fixed_spec;
  EchoMethod method = EchoMethod::overlap;
};

// One fidelity trace per trial, trial i in slot i. Accepts n_samples >= 1.
std::vector<std::vector<double>> compute_traces(const SystemParams& params, const EnsembleOptions& options);

// Throws InvalidArgument when n_samples < 2 or a histogram time exceeds n_max.
EnsembleResult run_ensemble(const SystemParams& params, const EnsembleOptions& options);

struct VariancePeak {
  double t = 0.0;
  double value = 0.0;
  std::size_t argmax = 0;  // raw sample index
  bool refined = false;
};

// Argmax of variance[t] over t >= 1, refined by a least-squares parabola
// through the samples within 2 kicks of it when that parabola is concave
// with its vertex inside those samples. Needs at least 2 entries.
VariancePeak locate_variance_peak(std::span<const double> variance);

// Two-pass mean and unbiased variance of traces[i][n] over i, in index order.
void reduce_traces(std::span<const std::vector<double>> traces, std::vector<double>& mean,
                   std::vector<double>& variance);

}  // namespace loschmidt
