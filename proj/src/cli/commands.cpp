#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "csv.hpp"
#include "loschmidt/classical.hpp"
#include "loschmidt/cli.hpp"
#include "loschmidt/echo_engine.hpp"
#include "loschmidt/errors.hpp"
#include "loschmidt/estimation.hpp"
#include "loschmidt/parallel.hpp"
#include "loschmidt/spectral.hpp"
#include "loschmidt/theory.hpp"

namespace loschmidt::cli {

namespace {

struct KeySpec {
  std::string name;
  std::optional<std::string> fallback;  // nullopt: required unless optional
  bool optional = false;                // may stay unset
};

// Typed view of the settings a command accepts.
class Args {
 public:
  Args(const Config& config, const std::vector<KeySpec>& keys) {
    for (const auto& [key, s] : config.entries()) {
      if (key == "command" || key == "threads" || key == "out") continue;
      const bool known = std::any_of(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.name == key; });
      if (!known) throw ConfigError(s.origin + ": unknown key '" + key + "'");
    }
    for (const auto& k : keys) {
      if (const Setting* s = config.find(k.name)) {
        values_[k.name] = *s;
      } else if (k.fallback) {
        values_[k.name] = Setting{*k.fallback, "default"};
      } else if (!k.optional) {
        throw ConfigError("missing required key '" + k.name + "'");
      }
      if (values_.count(k.name)) resolved_.emplace_back(k.name, values_[k.name].value);
    }
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  const std::string& str(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second.value;
  }

  double real(const std::string& key) const { return parse_real(key, str(key)); }

  std::uint64_t integer(const std::string& key) const { return parse_integer(key, str(key)); }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split(key)) out.push_back(parse_real(key, item));
    return out;
  }

  std::vector<std::uint64_t> integers(const std::string& key) const {
    std::vector<std::uint64_t> out;
    for (const auto& item : split(key)) out.push_back(parse_integer(key, item));
    return out;
  }

  std::vector<std::pair<std::string, std::string>> resolved() const { return resolved_; }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    const auto it = values_.find(key);
    const std::string where = it == values_.end() ? "" : " (" + it->second.origin + ")";
    throw ConfigError("key '" + key + "'" + where + ": " + why);
  }

 private:
  std::vector<std::string> split(const std::string& key) const {
    std::vector<std::string> out;
    std::stringstream ss(str(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      const auto e = item.find_last_not_of(" \t");
      if (b == std::string::npos) fail(key, "empty list entry");
      out.push_back(item.substr(b, e - b + 1));
    }
    if (out.empty()) fail(key, "empty list");
    return out;
  }

  double parse_real(const std::string& key, const std::string& text) const {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size() || !std::isfinite(v))
      fail(key, "'" + text + "' is not a number");
    return v;
  }

  std::uint64_t parse_integer(const std::string& key, const std::string& text) const {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size())
      fail(key, "'" + text + "' is not a nonnegative integer");
    return v;
  }

  std::map<std::string, Setting> values_;
  std::vector<std::pair<std::string, std::string>> resolved_;
};

std::string num(double v) { return format_number(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }

std::string note(const std::string& key, double v) { return " " + key + "=" + num(v); }

std::size_t positive_size(const Args& a, const std::string& key) {
  const auto v = a.integer(key);
  if (v == 0) a.fail(key, "must be positive");
  return static_cast<std::size_t>(v);
}

SystemParams system_params(const Args& a, std::size_t N) {
  try {
    return make_params(N, a.real("K0"), a.real("dK"));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("invalid system parameters: ") + e.what());
  }
}

EnsembleOptions ensemble_options(const Args& a, unsigned threads) {
  EnsembleOptions o;
  o.n_max = positive_size(a, "n_max");
  o.n_samples = positive_size(a, "n_samples");
  o.seed = a.integer("seed");
  o.threads = threads;
  o.width = a.real("width");
  if (o.width < 0.0) a.fail("width", "must be >= 0 (0 selects the default)");
  const auto& m = a.str("method");
  if (m == "overlap") {
    o.method = EchoMethod::overlap;
  } else if (m == "literal") {
    o.method = EchoMethod::literal;
  } else {
    a.fail("method", "expected overlap or literal");
  }
  return o;
}

const std::vector<KeySpec> kEnsembleKeys = {
    {"K0", "9.95"}, {"dK", std::nullopt}, {"n_max", std::nullopt}, {"n_samples", std::nullopt},
    {"seed", "1"},  {"width", "0"},       {"method", "overlap"},
};

std::vector<KeySpec> with(std::vector<KeySpec> front, const std::vector<KeySpec>& back) {
  front.insert(front.end(), back.begin(), back.end());
  return front;
}

// ---------------------------------------------------------------- echo

Table run_echo(const Args& a, unsigned threads) {
  const auto p = system_params(a, positive_size(a, "N"));
  const auto o = ensemble_options(a, threads);
  if (o.n_samples < 2) a.fail("n_samples", "echo needs at least 2 samples for a variance");

  const auto r = run_ensemble(p, o);
  Table t;
  t.notes.push_back(note("gamma", gamma_from_dk(p)));
  t.notes.push_back(note("hbar_eff", p.hbar_eff));
  t.columns = {"t", "mean_M", "var_M", "stderr_mean"};
  const double S = static_cast<double>(r.n_samples);
  for (std::size_t i = 0; i < r.times.size(); ++i)
    t.rows.push_back({num(std::uint64_t{r.times[i]}), num(r.mean[i]), num(r.variance[i]),
                      num(std::sqrt(r.variance[i] / S))});
  return t;
}

// ----------------------------------------------------------- histogram

Table run_histogram(const Args& a, unsigned threads) {
  const auto p = system_params(a, positive_size(a, "N"));
  EnsembleOptions o;
  o.n_samples = positive_size(a, "n_samples");
  o.seed = a.integer("seed");
  o.threads = threads;
  o.width = a.real("width");
  if (o.width < 0.0) a.fail("width", "must be >= 0 (0 selects the default)");
  const auto bins = positive_size(a, "bins");
  const auto times = a.integers("times");
  o.n_max = *std::max_element(times.begin(), times.end());

  const auto traces = compute_traces(p, o);
  Table t;
  t.notes.push_back(note("gamma", gamma_from_dk(p)));
  t.columns = {"t", "bin_center", "density"};
  std::vector<double> samples(traces.size());
  for (auto time : times) {
    for (std::size_t s = 0; s < traces.size(); ++s) samples[s] = traces[s][time];
    const auto d = histogram_fidelity(samples, bins);
    const auto rho = d.density();
    for (std::size_t i = 0; i < rho.size(); ++i) t.rows.push_back({num(time), num(d.bin_center(i)), num(rho[i])});
  }
  return t;
}

// ---------------------------------------------------------------- ldos

Table run_ldos(const Args& a, unsigned threads) {
  const auto Ns = a.integers("N");
  const auto bins = positive_size(a, "bins");
  const auto limit = positive_size(a, "dense_limit");
  std::vector<SystemParams> params;
  for (auto N : Ns) {
    if (N > limit) a.fail("N", "N=" + std::to_string(N) + " exceeds dense_limit=" + std::to_string(limit));
    params.push_back(system_params(a, static_cast<std::size_t>(N)));
  }

  std::vector<SpectralDensity> out(params.size());
  parallel_for(
      params.size(), threads, [](unsigned) { return 0; },
      [&](int, std::size_t i) { out[i] = local_spectral_density(params[i], bins, limit); });

  Table t;
  t.columns = {"N", "bin_center", "rho"};
  std::vector<WidthSample> widths;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& d = out[k];
    t.notes.push_back(" fit N=" + num(Ns[k]) + " gamma=" + num(d.fitted_gamma) + " residual=" + num(d.fit_residual) +
                      " resolved=" + (d.fit_resolved ? "1" : "0") + " predicted=" + num(gamma_from_dk(params[k])));
    if (d.fitted_gamma > 0.0) widths.push_back({params[k].N, params[k].dK, d.fitted_gamma});
    for (std::size_t i = 0; i < d.rho.size(); ++i) t.rows.push_back({num(Ns[k]), num(d.bin_centers[i]), num(d.rho[i])});
  }
  if (widths.size() >= 3) {
    const auto s = gamma_scaling_fit(widths);
    t.notes.push_back(" scaling exponent=" + num(s.exponent) + " prefactor=" + num(s.prefactor) +
                      " residual=" + num(s.residual));
  }
  return t;
}

// ----------------------------------------------------------- scan-peak

// The sweep is given either as dK values (same for every N) or as Gamma/B
// values, converted per N through Gamma = prefactor * (dK N)^2.
Table run_scan_peak(const Args& a, unsigned threads) {
  const auto Ns = a.integers("N");
  const double prefactor = a.real("gamma_prefactor");
  if (!(prefactor > 0.0)) a.fail("gamma_prefactor", "must be positive");
  if (a.has("dK") == a.has("gamma_over_B")) throw ConfigError("scan-peak needs exactly one of dK or gamma_over_B");
  const bool by_gamma = a.has("gamma_over_B");
  const auto sweep = a.reals(by_gamma ? "gamma_over_B" : "dK");
  for (double v : sweep)
    if (by_gamma && !(v > 0.0)) a.fail("gamma_over_B", "values must be positive");
  auto o = ensemble_options(a, threads);
  if (o.n_samples < 2) a.fail("n_samples", "needs at least 2 samples for a variance");
  std::vector<SystemParams> params;
  for (auto N : Ns)
    for (double v : sweep) {
      const double dk = by_gamma ? std::sqrt(v * kTwoPi / prefactor) / static_cast<double>(N) : v;
      try {
        params.push_back(make_params(static_cast<std::size_t>(N), a.real("K0"), dk));
      } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("invalid system parameters: ") + e.what());
      }
    }

  Table t;
  t.columns = {"N", "dK", "gamma", "gamma_over_B", "t_c", "sigma2_tc"};
  for (const auto& p : params) {
    const auto r = run_ensemble(p, o);
    const VariancePeak pk = locate_variance_peak(r.variance);
    const double g = gamma_from_dk(p, prefactor);
    t.rows.push_back({num(std::uint64_t{p.N}), num(p.dK), num(g), num(g / p.B), num(pk.t), num(pk.value)});
  }
  return t;
}

// -------------------------------------------------------------- theory

Table run_theory(const Args& a, unsigned) {
  const double lambda = a.has("lambda") ? a.real("lambda") : std::log(a.real("K0") / 2.0);
  double hbar = 0.0;
  if (a.has("hbar")) {
    hbar = a.real("hbar");
  } else if (a.has("N")) {
    hbar = 1.0 / static_cast<double>(positive_size(a, "N"));
  } else {
    throw ConfigError("theory needs hbar or N");
  }
  double gamma = 0.0;
  if (a.has("gamma")) {
    gamma = a.real("gamma");
  } else if (a.has("N") && a.has("dK")) {
    const double x = a.real("dK") * static_cast<double>(a.integer("N"));
    gamma = a.real("gamma_prefactor") * x * x;
  } else {
    throw ConfigError("theory needs gamma or both N and dK");
  }
  const auto d = a.integer("d");
  const double t_min = a.real("t_min"), t_max = a.real("t_max"), dt = a.real("dt");
  if (!(t_min > 0.0)) a.fail("t_min", "must be positive");
  if (!(t_max >= t_min)) a.fail("t_max", "must be >= t_min");
  if (!(dt > 0.0)) a.fail("dt", "must be positive");
  if ((t_max - t_min) / dt > 1e7) a.fail("dt", "too many rows");

  TheoryParams p;
  try {
    double alpha0 = a.real("alpha0");
    if (alpha0 <= 0.0) {
      p = make_theory_params(lambda, gamma, hbar, a.real("B"), static_cast<int>(d), 1.0, a.real("c4"));
      alpha0 = default_alpha0(p, a.real("c_alpha"));
    }
    p = make_theory_params(lambda, gamma, hbar, a.real("B"), static_cast<int>(d), alpha0, a.real("c4"));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("invalid theory parameters: ") + e.what());
  }

  Table t;
  t.notes.push_back(" regime=" + std::string(to_string(classify_regime(p))));
  t.notes.push_back(note("lambda", p.lambda) + note("gamma", p.gamma) + note("hbar_eff", p.hbar_eff) +
                    note("alpha0", p.alpha0));
  t.notes.push_back(note("t_E", ehrenfest_time(p)));
  try {
    const auto pv = peak_variance(p);
    const auto tc = critical_time(p);
    t.notes.push_back(note("t_c", tc.numeric) + note("t_c_leading", tc.leading) + note("sigma2_tc", pv.value));
  } catch (const NoRootError&) {
    t.notes.push_back(" t_c=none");
  }
  t.columns = {"t", "sigma2_total", "term1", "term2", "term3", "term4", "mean_M_prediction"};
  const auto n = static_cast<std::size_t>(std::floor((t_max - t_min) / dt + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) {
    const double time = t_min + static_cast<double>(i) * dt;
    const auto v = variance_terms(p, time);
    t.rows.push_back({num(time), num(v.total), num(v.lyapunov), num(v.mixed), num(v.golden), num(v.ergodic),
                      num(mean_fidelity(p, time))});
  }
  return t;
}

// ----------------------------------------------------------- classical

Table run_classical(const Args& a, unsigned threads) {
  const auto Ks = a.reals("K");
  for (double K : Ks)
    if (!(K > 0.0)) a.fail("K", "kick strengths must be positive");
  const auto steps = positive_size(a, "t");
  const auto n_traj = positive_size(a, "n_traj");
  const auto seed = a.integer("seed");
  const auto l1_times = a.integers("lambda1_times");
  for (auto lt : l1_times)
    if (lt == 0) a.fail("lambda1_times", "times must be positive");
  const auto l1_traj = positive_size(a, "lambda1_traj");

  Table t;
  t.columns = {"K", "lambda_analytic", "lambda_benettin", "lambda_std"};
  for (auto lt : l1_times) t.columns.push_back("lambda1_t" + num(lt));
  for (double K : Ks) {
    const auto est = benettin_lyapunov(K, steps, n_traj, seed, threads);
    std::vector<std::string> row{num(K), num(analytic_lyapunov(K)), num(est.lambda_mean), num(est.lambda_std)};
    for (auto lt : l1_times) row.push_back(num(effective_decay_exponent(K, lt, l1_traj, seed, threads)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ----------------------------------------------------------------- fit

Table run_fit(const Args& a, unsigned) {
  const auto& path = a.str("input");
  std::ifstream in(path);
  if (!in) a.fail("input", "cannot open '" + path + "'");
  const CsvData data = read_csv(in, path);
  const auto& xname = a.str("x");
  const auto& yname = a.str("y");
  const auto xi = data.column(xname);
  const auto yi = data.column(yname);
  if (!xi) a.fail("x", "no column '" + xname + "' in " + path);
  if (!yi) a.fail("y", "no column '" + yname + "' in " + path);
  std::optional<std::size_t> si;
  double svalue = 0.0;
  if (a.has("select")) {
    const auto& sel = a.str("select");
    const auto eq = sel.find('=');
    if (eq == std::string::npos) a.fail("select", "expected column=value");
    si = data.column(sel.substr(0, eq));
    if (!si) a.fail("select", "no column '" + sel.substr(0, eq) + "'");
    const auto text = sel.substr(eq + 1);
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), svalue);
    if (ec != std::errc() || p != text.data() + text.size()) a.fail("select", "'" + text + "' is not a number");
  }
  const double lo = a.real("x_min"), hi = a.real("x_max");
  if (!(lo < hi)) a.fail("x_max", "must exceed x_min");

  std::vector<double> xs, ys;
  for (const auto& row : data.rows) {
    if (si && row[*si] != svalue) continue;
    xs.push_back(row[*xi]);
    ys.push_back(row[*yi]);
  }
  FitResult f;
  const auto& model = a.str("model");
  if (model == "exp") {
    f = fit_exponential(xs, ys, {lo, hi});
  } else if (model == "power") {
    std::vector<double> wx, wy;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (xs[i] >= lo && xs[i] <= hi) {
        wx.push_back(xs[i]);
        wy.push_back(ys[i]);
      }
    f = fit_powerlaw(wx, wy);
    f.window = {lo, hi};
  } else {
    a.fail("model", "expected exp or power");
  }
  Table t;
  t.columns = {"model", "rate_or_exponent", "prefactor", "residual", "n_points", "x_min", "x_max"};
  t.rows.push_back({model, num(f.rate_or_exponent), num(f.prefactor), num(f.residual),
                    num(std::uint64_t{f.n_points}), num(f.window.first), num(f.window.second)});
  return t;
}

struct CommandDef {
  std::string name;
  std::vector<KeySpec> keys;
  std::function<Table(const Args&, unsigned)> run;
};

const std::vector<CommandDef>& registry() {
  static const std::vector<CommandDef> defs = {
      {"echo", with({{"N", std::nullopt}}, kEnsembleKeys), run_echo},
      {"histogram",
       {{"N", std::nullopt},
        {"K0", "9.95"},
        {"dK", std::nullopt},
        {"times", std::nullopt},
        {"n_samples", std::nullopt},
        {"bins", "50"},
        {"seed", "1"},
        {"width", "0"}},
       run_histogram},
      {"ldos", {{"N", std::nullopt}, {"K0", "12.56"}, {"dK", std::nullopt}, {"bins", "201"}, {"dense_limit", "4096"}},
       run_ldos},
      {"scan-peak",
       {{"N", std::nullopt},
        {"K0", "9.95"},
        {"dK", std::nullopt, true},
        {"gamma_over_B", std::nullopt, true},
        {"gamma_prefactor", "0.024"},
        {"n_max", std::nullopt},
        {"n_samples", std::nullopt},
        {"seed", "1"},
        {"width", "0"},
        {"method", "overlap"}},
       run_scan_peak},
      {"theory",
       {{"K0", "9.95"},
        {"lambda", std::nullopt, true},
        {"gamma", std::nullopt, true},
        {"N", std::nullopt, true},
        {"dK", std::nullopt, true},
        {"hbar", std::nullopt, true},
        {"gamma_prefactor", "0.024"},
        {"B", "6.283185307179586"},
        {"d", "1"},
        {"alpha0", "0"},
        {"c_alpha", "1"},
        {"c4", "1"},
        {"t_min", "1"},
        {"t_max", "100"},
        {"dt", "1"}},
       run_theory},
      {"classical",
       {{"K", std::nullopt},
        {"t", "10000"},
        {"n_traj", "100"},
        {"seed", "1"},
        {"lambda1_times", "10,15,20,30"},
        {"lambda1_traj", "10000"}},
       run_classical},
      {"fit",
       {{"input", std::nullopt},
        {"x", "t"},
        {"y", "var_M"},
        {"model", "exp"},
        {"x_min", std::nullopt},
        {"x_max", std::nullopt},
        {"select", std::nullopt, true}},
       run_fit},
  };
  return defs;
}

}  // namespace

std::vector<std::string> command_names() {
  std::vector<std::string> out;
  for (const auto& d : registry()) out.push_back(d.name);
  return out;
}

Output run_command(const std::string& command, const Config& config, unsigned threads) {
  const auto& defs = registry();
  const auto it = std::find_if(defs.begin(), defs.end(), [&](const CommandDef& d) { return d.name == command; });
  if (it == defs.end()) throw ConfigError("unknown command '" + command + "'");
  if (const Setting* s = config.find("command"); s && s->value != command)
    throw ConfigError(s->origin + ": config is for command '" + s->value + "', not '" + command + "'");

  const Args args(config, it->keys);
  Output out;
  out.command = command;
  out.settings = args.resolved();
  out.table = it->run(args, std::max(1u, threads));
  return out;
}

}  // namespace loschmidt::cli
