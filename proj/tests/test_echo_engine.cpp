#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "loschmidt/echo_engine.hpp"
#include "loschmidt/errors.hpp"
#include "oracles.hpp"

using namespace loschmidt;

TEST_CASE("fidelity trace starts at one and stays in [0, 1]") {
  const auto p = make_params(512, 9.95, 2e-3);
  const auto tr = fidelity_trace(p, make_wavepacket(p, 2.0, 3.0), 200);
  REQUIRE(tr.m.size() == 201);
  CHECK(std::abs(tr.m[0] - 1.0) < 1e-12);
  for (double m : tr.m) {
    CHECK(m >= 0.0);
    CHECK(m <= 1.0 + 1e-12);
  }
}

TEST_CASE("dK = 0 gives perfect echo") {
  const auto p = make_params(256, 9.95, 0.0);
  const auto tr = fidelity_trace(p, make_wavepacket(p, 1.0, 5.0), 1000);
  for (double m : tr.m) CHECK(std::abs(m - 1.0) < 1e-11);
}

TEST_CASE("fidelity trace matches dense matrix powers") {
  const auto p = make_params(64, 9.95, 0.1);
  const auto spec = make_wavepacket(p, 2.2, 4.1);
  const auto tr = fidelity_trace(p, spec, 10);
  const auto ref = oracle::fidelity_trace(64, 9.95, 0.1, to_eigen(build_coherent_state(p, spec)), 10);
  for (std::size_t n = 0; n <= 10; ++n) CHECK(std::abs(tr.m[n] - ref[n]) < 1e-9);
}

TEST_CASE("literal echo agrees with the overlap form") {
  const auto p = make_params(128, 9.95, 0.02);
  const auto spec = make_wavepacket(p, 4.0, 0.7);
  const auto a = fidelity_trace(p, spec, 40, EchoMethod::overlap);
  const auto b = fidelity_trace(p, spec, 40, EchoMethod::literal);
  for (std::size_t n = 0; n <= 40; ++n) CHECK(std::abs(a.m[n] - b.m[n]) < 1e-10);
}

TEST_CASE("initial packets are a deterministic function of (seed, index)") {
  const auto a = sample_initial_specs(42, 100);
  const auto b = sample_initial_specs(42, 100);
  std::set<std::pair<double, double>> distinct;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x0 == b[i].x0);
    CHECK(a[i].p0 == b[i].p0);
    CHECK(a[i].x0 == sample_initial_spec(42, i).x0);
    CHECK(a[i].x0 >= 0.0);
    CHECK(a[i].x0 < kTwoPi);
    CHECK(a[i].p0 >= 0.0);
    CHECK(a[i].p0 < kTwoPi);
    distinct.insert({a[i].x0, a[i].p0});
  }
  CHECK(distinct.size() == a.size());
  CHECK(sample_initial_specs(43, 1)[0].x0 != a[0].x0);
  CHECK_THROWS_AS(sample_initial_specs(1, 0), InvalidArgument);
}

TEST_CASE("sampled centres are uniform") {
  const std::size_t S = 10000;
  const auto specs = sample_initial_specs(7, S);
  double mx = 0.0, mp = 0.0;
  for (const auto& s : specs) {
    mx += s.x0;
    mp += s.p0;
  }
  mx /= S;
  mp /= S;
  const double stderr_uniform = kTwoPi / std::sqrt(12.0) / std::sqrt(static_cast<double>(S));
  CHECK(std::abs(mx - std::numbers::pi) < 5 * stderr_uniform);
  CHECK(std::abs(mp - std::numbers::pi) < 5 * stderr_uniform);
}

TEST_CASE("histogram edge conventions") {
  SUBCASE("constant samples fall in one bin") {
    const std::vector<double> s(17, 0.5);
    const auto d = histogram_fidelity(s, 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(d.counts[i] == (i == 5 ? 17u : 0u));
  }
  SUBCASE("endpoints") {
    const std::vector<double> s{0.0, 1.0};
    const auto d = histogram_fidelity(s, 2);
    CHECK(d.counts[0] == 1);
    CHECK(d.counts[1] == 1);
  }
  SUBCASE("density integrates to one") {
    std::vector<double> s;
    for (int i = 0; i < 1000; ++i) s.push_back(std::fmod(i * 0.61803398875, 1.0));
    const auto d = histogram_fidelity(s, 37);
    double integral = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < 37; ++i) {
      integral += d.density()[i] * d.bin_width();
      count += d.counts[i];
    }
    CHECK(count == 1000);
    CHECK(std::abs(integral - 1.0) < 1e-12);
  }
  SUBCASE("rounding slack and rejects") {
    const std::vector<double> ok{1.0 + 1e-13, -1e-13};
    CHECK(histogram_fidelity(ok, 4).total == 2);
    const std::vector<double> bad{1.1};
    CHECK_THROWS_AS(histogram_fidelity(bad, 4), InvalidArgument);
    const std::vector<double> neg{-0.01};
    CHECK_THROWS_AS(histogram_fidelity(neg, 4), InvalidArgument);
    CHECK_THROWS_AS(histogram_fidelity(ok, 0), InvalidArgument);
  }
}

TEST_CASE("ensemble with identical trials has zero variance") {
  const auto p = make_params(256, 9.95, 5e-3);
  EnsembleOptions o;
  o.n_max = 50;
  o.n_samples = 8;
  o.fixed_spec = make_wavepacket(p, 1.0, 2.0);
  const auto r = run_ensemble(p, o);
  for (double v : r.variance) CHECK(std::abs(v) < 1e-15);
}

TEST_CASE("ensemble at dK = 0") {
  const auto p = make_params(256, 9.95, 0.0);
  EnsembleOptions o;
  o.n_max = 100;
  o.n_samples = 10;
  o.seed = 3;
  const auto r = run_ensemble(p, o);
  for (std::size_t n = 0; n <= 100; ++n) {
    CHECK(std::abs(r.mean[n] - 1.0) < 1e-11);
    CHECK(std::abs(r.variance[n]) < 1e-11);
  }
}

TEST_CASE("ensemble preconditions") {
  const auto p = make_params(64, 9.95, 0.01);
  EnsembleOptions o;
  o.n_max = 5;
  o.n_samples = 1;
  CHECK_THROWS_AS(run_ensemble(p, o), InvalidArgument);
  o.n_samples = 4;
  o.histogram_times = {6};
  CHECK_THROWS_AS(run_ensemble(p, o), InvalidArgument);
}

TEST_CASE("ensemble results do not depend on the thread count") {
  const auto p = make_params(512, 9.95, 1e-3);
  EnsembleOptions o;
  o.n_max = 60;
  o.n_samples = 23;
  o.seed = 99;
  o.histogram_times = {10, 60};
  o.n_bins = 20;
  o.threads = 1;
  const auto a = run_ensemble(p, o);
  o.threads = 4;
  const auto b = run_ensemble(p, o);
  o.threads = 7;
  const auto c = run_ensemble(p, o);
  CHECK(a.mean == b.mean);
  CHECK(a.variance == b.variance);
  CHECK(a.mean == c.mean);
  CHECK(a.variance == c.variance);
  REQUIRE(a.histograms.size() == 2);
  CHECK(a.histograms[1].distribution.counts == c.histograms[1].distribution.counts);
}

TEST_CASE("variance respects the bound for [0, 1]-valued samples") {
  for (double dK : {2e-3, 2e-2}) {
    const auto p = make_params(256, 9.95, dK);
    EnsembleOptions o;
    o.n_max = 80;
    o.n_samples = 12;
    o.seed = 5;
    const auto r = run_ensemble(p, o);
    const double S = static_cast<double>(o.n_samples);
    for (std::size_t n = 0; n <= o.n_max; ++n) {
      CHECK(r.variance[n] >= 0.0);
      // Unbiased estimator: S/(S-1) times the population bound.
      CHECK(r.variance[n] <= S / (S - 1) * r.mean[n] * (1.0 - r.mean[n]) + 1e-12);
    }
  }
}

TEST_CASE("ensemble statistics equal a brute-force dense computation") {
  for (std::size_t N : {8u, 16u, 32u, 64u}) {
    const auto p = make_params(N, 9.95, 0.05);
    EnsembleOptions o;
    o.n_max = 10;
    o.n_samples = 6;
    o.seed = 2024;
    const auto r = run_ensemble(p, o);

    std::vector<std::vector<double>> traces;
    for (std::size_t i = 0; i < o.n_samples; ++i) {
      auto spec = sample_initial_spec(o.seed, i);
      spec.width = default_width(p);
      traces.push_back(oracle::fidelity_trace(N, 9.95, 0.05, to_eigen(build_coherent_state(p, spec)), 10));
    }
    for (std::size_t n = 0; n <= 10; ++n) {
      double mean = 0.0;
      for (const auto& t : traces) mean += t[n];
      mean /= o.n_samples;
      double var = 0.0;
      for (const auto& t : traces) var += (t[n] - mean) * (t[n] - mean);
      var /= (o.n_samples - 1);
      CHECK(std::abs(r.mean[n] - mean) < 1e-9);
      CHECK(std::abs(r.variance[n] - var) < 1e-9);
    }
  }
}

TEST_CASE("variance peak location") {
  // exact parabola: vertex recovered
  std::vector<double> v;
  for (int t = 0; t <= 20; ++t) v.push_back(5.0 - 0.1 * (t - 7.3) * (t - 7.3));
  const auto pk = locate_variance_peak(v);
  CHECK(pk.argmax == 7);
  CHECK(pk.refined);
  CHECK(pk.t == doctest::Approx(7.3).epsilon(1e-12));
  CHECK(pk.value == doctest::Approx(5.0).epsilon(1e-12));

  // monotone data peaks at the end, unrefined
  const std::vector<double> up{0, 1, 2, 3, 4};
  const auto end = locate_variance_peak(up);
  CHECK(end.argmax == 4);
  CHECK(end.t == 4.0);
  CHECK_FALSE(end.refined);

  // t = 0 is ignored even if it is the largest entry
  const std::vector<double> first{9, 1, 3, 2, 1, 0.5};
  CHECK(locate_variance_peak(first).argmax == 2);
  CHECK_THROWS_AS(locate_variance_peak(std::vector<double>{1.0}), InvalidArgument);
}
