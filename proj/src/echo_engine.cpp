#include "loschmidt/echo_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "loschmidt/counter_rng.hpp"
#include "loschmidt/errors.hpp"
#include "loschmidt/parallel.hpp"

namespace loschmidt {

namespace {

double overlap_fidelity(std::span<const cplx> a, std::span<const cplx> b) {
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return std::norm(s);
}

}  // namespace

FidelityTrace fidelity_trace(FloquetPropagator& propagator, const WavepacketSpec& spec, std::size_t n_max,
                             EchoMethod method) {
  const SystemParams& params = propagator.params();
  const StateVector psi0 = build_coherent_state(params, spec);

  FidelityTrace trace;
  trace.params = params;
  trace.spec = spec;
  trace.m.resize(n_max + 1);
  trace.m[0] = overlap_fidelity(psi0.amplitudes(), psi0.amplitudes());

  if (method == EchoMethod::overlap) {
    std::vector<cplx> unperturbed(psi0.amplitudes().begin(), psi0.amplitudes().end());
    std::vector<cplx> perturbed = unperturbed;
    for (std::size_t n = 1; n <= n_max; ++n) {
      propagator.step(unperturbed, Kick::unperturbed, Direction::forward);
      propagator.step(perturbed, Kick::perturbed, Direction::forward);
      trace.m[n] = overlap_fidelity(perturbed, unperturbed);
    }
    return trace;
  }

  std::vector<cplx> forward(psi0.amplitudes().begin(), psi0.amplitudes().end());
  std::vector<cplx> echo;
  for (std::size_t n = 1; n <= n_max; ++n) {
    propagator.step(forward, Kick::unperturbed, Direction::forward);
    echo = forward;
    for (std::size_t k = 0; k < n; ++k) propagator.step(echo, Kick::perturbed, Direction::backward);
    trace.m[n] = overlap_fidelity(psi0.amplitudes(), echo);
  }
  return trace;
}

FidelityTrace fidelity_trace(const SystemParams& params, const WavepacketSpec& spec, std::size_t n_max,
                             EchoMethod method) {
  FloquetPropagator propagator(params);
  return fidelity_trace(propagator, spec, n_max, method);
}

WavepacketSpec sample_initial_spec(std::uint64_t seed, std::size_t index) {
  const CounterRng rng(seed, /*stream=*/0);
  const auto i = static_cast<std::uint64_t>(index);
  WavepacketSpec spec;
  // uniform() < 1 strictly, so both land in [0, 2 pi).
  spec.x0 = std::min(kTwoPi * rng.uniform(2 * i), std::nextafter(kTwoPi, 0.0));
  spec.p0 = std::min(kTwoPi * rng.uniform(2 * i + 1), std::nextafter(kTwoPi, 0.0));
  return spec;
}

std::vector<WavepacketSpec> sample_initial_specs(std::uint64_t seed, std::size_t count) {
  if (count < 1) throw InvalidArgument("sample count must be at least 1");
  std::vector<WavepacketSpec> specs(count);
  for (std::size_t i = 0; i < count; ++i) specs[i] = sample_initial_spec(seed, i);
  return specs;
}

std::vector<double> Distribution::density() const {
  std::vector<double> d(counts.size(), 0.0);
  if (total == 0) return d;
  const double scale = 1.0 / (static_cast<double>(total) * bin_width());
  for (std::size_t i = 0; i < counts.size(); ++i) d[i] = static_cast<double>(counts[i]) * scale;
  return d;
}

Distribution histogram_fidelity(std::span<const double> samples, std::size_t n_bins) {
  if (n_bins < 1) throw InvalidArgument("histogram needs at least one bin");
  constexpr double tol = 1e-12;
  Distribution dist;
  dist.bin_edges.resize(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i) dist.bin_edges[i] = static_cast<double>(i) / static_cast<double>(n_bins);
  dist.counts.assign(n_bins, 0);
  for (double s : samples) {
    if (!(s >= -tol && s <= 1.0 + tol))
      throw InvalidArgument("fidelity sample " + std::to_string(s) + " outside [0, 1]");
    const double v = std::clamp(s, 0.0, 1.0);
    auto bin = static_cast<std::size_t>(v * static_cast<double>(n_bins));
    if (bin >= n_bins) bin = n_bins - 1;
    ++dist.counts[bin];
  }
  dist.total = samples.size();
  return dist;
}

std::vector<std::vector<double>> compute_traces(const SystemParams& params, const EnsembleOptions& options) {
  if (options.n_samples < 1) throw InvalidArgument("n_samples must be at least 1");
  const double width = options.width > 0.0 ? options.width : default_width(params);
  std::vector<std::vector<double>> traces(options.n_samples);
  parallel_for(
      options.n_samples, options.threads, [&](unsigned) { return FloquetPropagator(params); },
      [&](FloquetPropagator& prop, std::size_t i) {
        WavepacketSpec spec = options.fixed_spec ? *options.fixed_spec : sample_initial_spec(options.seed, i);
        if (!options.fixed_spec) spec.width = width;
        traces[i] = fidelity_trace(prop, spec, options.n_max, options.method).m;
      });
  return traces;
}

void reduce_traces(std::span<const std::vector<double>> traces, std::vector<double>& mean,
                   std::vector<double>& variance) {
  const std::size_t S = traces.size();
  const std::size_t T = S > 0 ? traces.front().size() : 0;
  mean.assign(T, 0.0);
  variance.assign(T, 0.0);
  if (S == 0) return;
  for (const auto& tr : traces)
    for (std::size_t n = 0; n < T; ++n) mean[n] += tr[n];
  for (auto& m : mean) m /= static_cast<double>(S);
  if (S < 2) return;
  for (const auto& tr : traces)
    for (std::size_t n = 0; n < T; ++n) {
      const double d = tr[n] - mean[n];
      variance[n] += d * d;
    }
  for (auto& v : variance) v = std::max(0.0, v / static_cast<double>(S - 1));
}

EnsembleResult run_ensemble(const SystemParams& params, const EnsembleOptions& options) {
  if (options.n_samples < 2) throw InvalidArgument("n_samples must be at least 2 to report a variance");
  for (std::size_t t : options.histogram_times)
    if (t > options.n_max)
      throw InvalidArgument("histogram time " + std::to_string(t) + " exceeds n_max " + std::to_string(options.n_max));

  const auto traces = compute_traces(params, options);

  EnsembleResult result;
  result.n_samples = options.n_samples;
  result.seed = options.seed;
  result.times.resize(options.n_max + 1);
  for (std::size_t n = 0; n <= options.n_max; ++n) result.times[n] = n;
  reduce_traces(traces, result.mean, result.variance);

  std::vector<double> column(traces.size());
  for (std::size_t t : options.histogram_times) {
    for (std::size_t i = 0; i < traces.size(); ++i) column[i] = traces[i][t];
    result.histograms.push_back({t, histogram_fidelity(column, options.n_bins)});
  }
  return result;
}

VariancePeak locate_variance_peak(std::span<const double> variance) {
  if (variance.size() < 2) throw InvalidArgument("peak search needs at least two samples");
  std::size_t best = 1;
  for (std::size_t i = 1; i < variance.size(); ++i)
    if (variance[i] > variance[best]) best = i;
  VariancePeak peak{static_cast<double>(best), variance[best], best, false};
  const std::size_t lo = best >= 2 ? best - 2 : 0;
  const std::size_t hi = std::min(variance.size() - 1, best + 2);
  if (hi - lo < 2) return peak;

  // v = c0 + c1 u + c2 u^2 with u = t - best
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  for (std::size_t i = lo; i <= hi; ++i) {
    const double u = static_cast<double>(i) - static_cast<double>(best);
    const Eigen::Vector3d row(1.0, u, u * u);
    A += row * row.transpose();
    b += row * variance[i];
  }
  const Eigen::Vector3d c = A.colPivHouseholderQr().solve(b);
  if (!(c(2) < 0.0)) return peak;
  const double u = -c(1) / (2.0 * c(2));
  const double ulo = static_cast<double>(lo) - static_cast<double>(best);
  const double uhi = static_cast<double>(hi) - static_cast<double>(best);
  if (u < ulo || u > uhi) return peak;
  peak.t = static_cast<double>(best) + u;
  peak.value = c(0) + c(1) * u + c(2) * u * u;
  peak.refined = true;
  return peak;
}

}  // namespace loschmidt
